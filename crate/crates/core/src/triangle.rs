//! Dihedral reduction of the Dirichlet problem on P_N^r to the mixed problem
//! on the right triangle T(pi/N, r), and the inverse unfolding of a triangle
//! eigenfunction onto the whole polygon.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::femeig::{solve_polygon, solve_triangle, ConvergenceSeries, EigenField, SolverOptions};
use crate::geometry::{Point, RegularPolygonSpec, TriangleSpec};
use crate::mesh::Mesh;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub n: usize,
    pub r: f64,
    pub lambda_polygon: ConvergenceSeries,
    pub mu_triangle: ConvergenceSeries,
    pub relative_gap: f64,
    pub certified: bool,
}

/// Solves the polygon and the triangle problem independently and compares
/// the extrapolated eigenvalues.
pub fn verify_reduction(
    n: usize,
    r: f64,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<ReductionReport> {
    verify_reduction_with(n, r, levels.clone(), levels, opts)
}

pub fn verify_reduction_with(
    n: usize,
    r: f64,
    polygon_levels: RangeInclusive<u32>,
    triangle_levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<ReductionReport> {
    let spec = RegularPolygonSpec::new(n, r);
    spec.validate()?;
    let poly = solve_polygon(&spec, polygon_levels, opts)?.series;
    let tri = solve_triangle(&TriangleSpec::for_polygon(n, r), triangle_levels, opts)?.series;
    let lambda = poly.extrapolated;
    let relative_gap = (lambda - tri.extrapolated).abs() / lambda;
    let budget = 3.0 * (poly.error_estimate + tri.error_estimate) / lambda;
    Ok(ReductionReport {
        n,
        r,
        certified: relative_gap < budget.max(1e-3),
        lambda_polygon: poly,
        mu_triangle: tri,
        relative_gap,
    })
}

/// 2x2 orthogonal matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orthogonal([[f64; 2]; 2]);

impl Orthogonal {
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Orthogonal([[c, -s], [s, c]])
    }

    /// Reflection across the line through the origin at `angle`.
    pub fn reflection(angle: f64) -> Self {
        let (s, c) = (2.0 * angle).sin_cos();
        Orthogonal([[c, s], [s, -c]])
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = &self.0;
        Point::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)
    }

    pub fn apply_transpose(&self, p: Point) -> Point {
        let m = &self.0;
        Point::new(m[0][0] * p.x + m[1][0] * p.y, m[0][1] * p.x + m[1][1] * p.y)
    }

    /// self * other
    pub fn then_after(&self, other: &Orthogonal) -> Orthogonal {
        let (a, b) = (&self.0, &other.0);
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Orthogonal(m)
    }
}

/// The symmetry of P_N (first vertex on the positive x-axis, centered at the
/// origin) that carries `x` into the canonical triangle T(pi/N, .), composed
/// with the fixed reflection between the two frames. Angle folding only.
pub fn fold_map(n: usize, x: Point) -> Orthogonal {
    let sector = 2.0 * PI / n as f64;
    let half = PI / n as f64;
    let phi = x.angle().rem_euclid(2.0 * PI);
    let k = ((phi / sector).floor() as usize).min(n - 1);
    let mut q = Orthogonal::rotation(-(k as f64) * sector);
    if phi - k as f64 * sector > half {
        q = Orthogonal::reflection(half).then_after(&q);
    }
    // polygon-frame angle t in [0, pi/N] (0 = vertex) -> triangle-frame pi/N - t
    Orthogonal::reflection(half / 2.0).then_after(&q)
}

/// A triangle eigenfunction extended to P_N^r by the dihedral group.
#[derive(Clone, Debug)]
pub struct UnfoldedField<'a> {
    pub n: usize,
    pub r: f64,
    field: &'a EigenField,
}

/// Wraps a solution of the mixed problem on T(pi/N, r).
pub fn unfold(field: &EigenField, n: usize, r: f64) -> Result<UnfoldedField<'_>> {
    RegularPolygonSpec::new(n, r).validate()?;
    let expected = TriangleSpec::for_polygon(n, r).vertices();
    let matches = expected
        .iter()
        .all(|v| field.mesh.nodes.iter().any(|p| p.dist(*v) <= 1e-12 * r));
    if !matches {
        return Err(Error::InvalidArgument(format!(
            "field is not defined on T(pi/{n}, {r})"
        )));
    }
    Ok(UnfoldedField { n, r, field })
}

impl UnfoldedField<'_> {
    /// Value and gradient of the unfolded function at `x` in P_N^r.
    pub fn eval(&self, x: Point) -> Result<(f64, Point)> {
        let q = fold_map(self.n, x);
        let y = q.apply(x);
        let apothem = self.r * (PI / self.n as f64).cos();
        if y.x > apothem * (1.0 + 1e-12) {
            return Err(Error::OutsideDomain { x: x.x, y: x.y });
        }
        let s = self.field.eval(y)?;
        Ok((s.value, q.apply_transpose(s.gradient)))
    }

    pub fn value(&self, x: Point) -> Result<f64> {
        self.eval(x).map(|v| v.0)
    }

    pub fn eigenvalue(&self) -> f64 {
        self.field.eigenvalue
    }
}

/// Integrals of the unfolded function squared and of its squared gradient over
/// `mesh`, by a six-point degree-4 rule per element. Gradients are sampled at
/// element-interior points only.
pub fn unfolded_energies(u: &UnfoldedField<'_>, mesh: &Mesh) -> Result<(f64, f64)> {
    const W: [f64; 2] = [0.223_381_589_678_011, 0.109_951_743_655_322];
    const A: [f64; 2] = [0.445_948_490_915_965, 0.091_576_213_509_771];
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for e in 0..mesh.elements.len() {
        let [p0, p1, p2] = mesh.element_points(e);
        let area = mesh.element_area(e);
        for (w, a) in W.iter().zip(A) {
            let b = 1.0 - 2.0 * a;
            for lam in [[b, a, a], [a, b, a], [a, a, b]] {
                let x = p0 * lam[0] + p1 * lam[1] + p2 * lam[2];
                let (v, g) = u.eval(x)?;
                l2 += w * area * v * v;
                h1 += w * area * g.dot(g);
            }
        }
    }
    Ok((l2, h1))
}

/// Relative L2 distance between the unfolded triangle eigenfunction and the
/// polygon eigenfunction, both solved at `level` and scaled to unit L2 norm.
pub fn unfold_discrepancy(n: usize, r: f64, level: u32, opts: SolverOptions) -> Result<f64> {
    let poly = solve_polygon(&RegularPolygonSpec::new(n, r), level..=level, opts)?.field;
    let tri = solve_triangle(&TriangleSpec::for_polygon(n, r), level..=level, opts)?.field;
    let unfolded = unfold(&tri, n, r)?;
    let mesh = &poly.mesh;
    let mut w = Vec::with_capacity(mesh.nodes.len());
    for &x in &mesh.nodes {
        w.push(unfolded.value(x)?);
    }
    let u = &poly.nodal;
    let (mut uu, mut ww, mut uw) = (0.0, 0.0, 0.0);
    for e in 0..mesh.elements.len() {
        let (_, me) = crate::femeig::element_matrices(mesh.element_points(e));
        let el = mesh.elements[e];
        for a in 0..3 {
            for b in 0..3 {
                let (i, j) = (el[a], el[b]);
                uu += me[a][b] * u[i] * u[j];
                ww += me[a][b] * w[i] * w[j];
                uw += me[a][b] * u[i] * w[j];
            }
        }
    }
    // |u/|u| - w/|w||^2 = 2 - 2 <u,w>/(|u||w|)
    let cos = uw / (uu.sqrt() * ww.sqrt());
    Ok((2.0 - 2.0 * cos).max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSample {
    pub alpha: f64,
    pub mu: ConvergenceSeries,
}

/// mu(T(alpha, r)) along a grid, together with whether consecutive values
/// increase under the error-budget rule.
pub fn mu_along_alpha(
    alphas: &[f64],
    r: f64,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<(Vec<AlphaSample>, bool)> {
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mu = solve_triangle(&TriangleSpec::new(alpha, r), levels.clone(), opts)?.series;
        out.push(AlphaSample { alpha, mu });
    }
    let increasing = out.windows(2).all(|w| {
        crate::certified_less(
            (w[0].mu.extrapolated, w[0].mu.error_estimate),
            (w[1].mu.extrapolated, w[1].mu.error_estimate),
        )
    });
    Ok((out, increasing))
}
