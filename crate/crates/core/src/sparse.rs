//! Compressed-row symmetric matrices and an envelope (profile) Cholesky
//! factorization under reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const PIVOT_RTOL: f64 = 1e-12;

/// Symmetric matrix in compressed row storage; both triangles are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetricMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymmetricMatrix {
    /// Zero matrix with the given (symmetric) sparsity pattern. Each row's
    /// column list is sorted and deduplicated.
    pub fn from_pattern(mut rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            col_indices.extend_from_slice(row);
            row_offsets.push(col_indices.len());
        }
        let values = vec![0.0; col_indices.len()];
        SparseSymmetricMatrix {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (cols, _) = self.row(i);
        cols.binary_search(&j).ok().map(|k| self.row_offsets[i] + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` at (i, j); panics if (i, j) is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) not in sparsity pattern"));
        self.values[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// x^T A x
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Reverse Cuthill-McKee ordering; returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseSymmetricMatrix) -> Vec<usize> {
    let n = a.dim();
    let adj = |i: usize| a.row(i).0.iter().copied().filter(move |&j| j != i);
    let degree: Vec<usize> = (0..n).map(|i| adj(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    // BFS level structure from `root` over unvisited nodes: (last level, depth)
    let bfs_levels = |root: usize, visited: &[bool]| -> (Vec<usize>, usize) {
        let mut seen = visited.to_vec();
        let mut frontier = vec![root];
        seen[root] = true;
        let mut depth = 0;
        loop {
            let mut next = Vec::new();
            for &u in &frontier {
                for v in adj(u) {
                    if !seen[v] {
                        seen[v] = true;
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                return (frontier, depth);
            }
            frontier = next;
            depth += 1;
        }
    };

    while order.len() < n {
        // lowest-degree unvisited node starts a component
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        // pseudo-peripheral node search
        let mut root = seed;
        let (mut last, mut depth) = bfs_levels(root, &visited);
        loop {
            let cand = *last.iter().min_by_key(|&&i| (degree[i], i)).unwrap();
            let (l2, d2) = bfs_levels(cand, &visited);
            if d2 > depth {
                root = cand;
                last = l2;
                depth = d2;
            } else {
                break;
            }
        }
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adj(u).filter(|&v| !visited[v]).collect();
            nbrs.sort_unstable_by_key(|&v| (degree[v], v));
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Lower-triangular envelope Cholesky factor of P A P^T.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseSymmetricMatrix) -> Result<Self> {
        Self::factor_with_ordering(a, reverse_cuthill_mckee(a))
    }

    pub fn factor_with_ordering(a: &SparseSymmetricMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for new_i in 0..n {
            for &j in a.row(perm[new_i]).0 {
                let new_j = inv[j];
                if new_j < first[new_i] {
                    first[new_i] = new_j;
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; start[n]];
        for new_i in 0..n {
            let (cols, vals) = a.row(perm[new_i]);
            for (&j, &v) in cols.iter().zip(vals) {
                let new_j = inv[j];
                if new_j <= new_i {
                    data[start[new_i] + new_j - first[new_i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = data.split_at_mut(start[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[start[j]..start[j] + (j - fj + 1)];
                let s = dot(&row_i[k0 - fi..j - fi], &row_j[k0 - fj..j - fj]);
                row_i[j - fi] = (row_i[j - fi] - s) / row_j[j - fj];
            }
            let diag = row_i[i - fi];
            let d = diag - dot(&row_i[..i - fi], &row_i[..i - fi]);
            // a pivot lost to cancellation signals a (numerically) singular matrix
            if !(d > PIVOT_RTOL * diag.abs()) || !d.is_finite() {
                return Err(Error::Factorization {
                    pivot: perm[i],
                    value: d,
                });
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(EnvelopeCholesky {
            n,
            perm,
            first,
            start,
            data,
        })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s = dot(&row[..i - fi], &y[fi..i]);
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let xi = y[i] / row[i - fi];
            y[i] = xi;
            for (yk, &l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize without reassociation
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// 1D Laplacian plus a few long-range couplings.
    fn sample(n: usize) -> SparseSymmetricMatrix {
        let mut rows = vec![Vec::new(); n];
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 4.0));
            if i + 1 < n {
                entries.push((i, i + 1, -1.0));
                entries.push((i + 1, i, -1.0));
            }
            if i + 7 < n && i % 3 == 0 {
                entries.push((i, i + 7, -0.5));
                entries.push((i + 7, i, -0.5));
            }
        }
        for &(i, j, _) in &entries {
            rows[i].push(j);
        }
        let mut a = SparseSymmetricMatrix::from_pattern(rows);
        for (i, j, v) in entries {
            a.add(i, j, v);
        }
        a
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = sample(50);
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let f = EnvelopeCholesky::factor(&a).unwrap();
        let y = f.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_fails() {
        let mut a = SparseSymmetricMatrix::from_pattern(vec![vec![0, 1], vec![0, 1]]);
        a.add(0, 0, 1.0);
        a.add(0, 1, 2.0);
        a.add(1, 0, 2.0);
        a.add(1, 1, 1.0);
        assert!(matches!(
            EnvelopeCholesky::factor(&a),
            Err(Error::Factorization { .. })
        ));
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = sample(40);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..40).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn solve_is_exact_for_any_ordering(seed in 0u64..1000, n in 2usize..40) {
            let a = sample(n);
            // deterministic shuffle
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let f = EnvelopeCholesky::factor_with_ordering(&a, perm).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
            let y = f.solve(&a.mul_vec(&x));
            for (u, v) in x.iter().zip(&y) {
                prop_assert!((u - v).abs() < 1e-10 * u.abs());
            }
        }
    }
}
