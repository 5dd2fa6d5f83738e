//! Piecewise-linear finite elements for the Dirichlet and mixed
//! Dirichlet/Neumann Laplacian eigenproblems.
//!
//! The smallest eigenpair of `K u = lambda M u` is found by inverse iteration
//! with a zero shift on an envelope Cholesky factor of `K`. Dirichlet nodes are
//! eliminated, so `K` is positive definite whenever at least one boundary edge
//! is Dirichlet; Neumann edges need no treatment. Eigenvalues computed on
//! nested meshes form a [`ConvergenceSeries`] that is Richardson-extrapolated
//! with the O(h^2) rate of conforming P1 elements.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon, RegularPolygonSpec, TriangleSpec};
use crate::mesh::{mesh_star_polygon, mesh_triangle, refine, BoundaryTag, ElementLocator, Mesh};
use crate::sparse::{EnvelopeCholesky, SparseSymmetricMatrix};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// Maps mesh nodes to unknowns; Dirichlet nodes have no unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeNodeIndex {
    pub dof_of_node: Vec<Option<usize>>,
    pub node_of_dof: Vec<usize>,
}

impl FreeNodeIndex {
    pub fn from_mesh(m: &Mesh) -> Self {
        let fixed = m.tagged_nodes(BoundaryTag::Dirichlet);
        Self::from_fixed(&fixed)
    }

    /// Every node is free (natural boundary conditions everywhere).
    pub fn all(n: usize) -> Self {
        Self::from_fixed(&vec![false; n])
    }

    fn from_fixed(fixed: &[bool]) -> Self {
        let mut dof_of_node = vec![None; fixed.len()];
        let mut node_of_dof = Vec::new();
        for (i, &f) in fixed.iter().enumerate() {
            if !f {
                dof_of_node[i] = Some(node_of_dof.len());
                node_of_dof.push(i);
            }
        }
        FreeNodeIndex {
            dof_of_node,
            node_of_dof,
        }
    }

    pub fn len(&self) -> usize {
        self.node_of_dof.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_of_dof.is_empty()
    }

    /// Expands a free-node vector to all nodes with zeros on Dirichlet nodes.
    pub fn expand(&self, v: &[f64]) -> Vec<f64> {
        self.dof_of_node
            .iter()
            .map(|d| d.map_or(0.0, |k| v[k]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Assembly {
    pub stiffness: SparseSymmetricMatrix,
    pub mass: SparseSymmetricMatrix,
    pub free: FreeNodeIndex,
}

/// P1 element stiffness and consistent mass matrices.
pub fn element_matrices([p0, p1, p2]: [Point; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let area = 0.5 * (p1 - p0).cross(p2 - p0);
    let b = [p1.y - p2.y, p2.y - p0.y, p0.y - p1.y];
    let c = [p2.x - p1.x, p0.x - p2.x, p1.x - p0.x];
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (k, m)
}

/// Stiffness and mass matrices restricted to the nodes not on any
/// Dirichlet-tagged edge.
pub fn assemble(m: &Mesh) -> Result<Assembly> {
    assemble_on(m, FreeNodeIndex::from_mesh(m))
}

pub fn assemble_on(m: &Mesh, free: FreeNodeIndex) -> Result<Assembly> {
    if free.is_empty() {
        return Err(Error::NoFreeNodes);
    }
    let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(8); free.len()];
    for el in &m.elements {
        for &a in el {
            if let Some(i) = free.dof_of_node[a] {
                for &b in el {
                    if let Some(j) = free.dof_of_node[b] {
                        rows[i].push(j);
                    }
                }
            }
        }
    }
    let mut stiffness = SparseSymmetricMatrix::from_pattern(rows);
    let mut mass = stiffness.clone();
    for e in 0..m.elements.len() {
        let (ke, me) = element_matrices(m.element_points(e));
        let el = m.elements[e];
        for a in 0..3 {
            let Some(i) = free.dof_of_node[el[a]] else {
                continue;
            };
            for b in 0..3 {
                let Some(j) = free.dof_of_node[el[b]] else {
                    continue;
                };
                stiffness.add(i, j, ke[a][b]);
                mass.add(i, j, me[a][b]);
            }
        }
    }
    Ok(Assembly {
        stiffness,
        mass,
        free,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub value: f64,
    /// Coefficients on free nodes, unit M-norm, positive sum.
    pub vector: Vec<f64>,
    /// Backward error ||K u - lambda M u||_2 / ((||K|| + lambda ||M||) ||u||_2)
    pub residual: f64,
    pub iterations: usize,
    /// All coefficients share one sign.
    pub sign_consistent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Relative Rayleigh-quotient change below which the iteration has settled.
const RQ_STAGNATION: f64 = 1e-13;
/// Backward errors this far below the tolerance count as settled even when
/// rounding keeps the Rayleigh quotient moving.
const RESIDUAL_FLOOR: f64 = 1e-3;

/// Smallest generalized eigenpair by zero-shift inverse iteration.
///
/// Converged when the backward error of the eigenpair is at most `opts.tol`
/// and the Rayleigh quotient has stopped changing (or the backward error is
/// a thousand times smaller still).
pub fn smallest_eigenpair(
    k: &SparseSymmetricMatrix,
    m: &SparseSymmetricMatrix,
    opts: SolverOptions,
) -> Result<EigenResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let n = k.dim();
    let chol = EnvelopeCholesky::factor(k)?;
    let k_norm = k.norm_inf();
    let m_norm = m.norm_inf();
    // the constant start vector has no component in non-symmetric modes
    let mut x = vec![1.0; n];
    let mut mx = m.mul_vec(&x);
    let s = dot(&x, &mx).sqrt();
    x.iter_mut().for_each(|v| *v /= s);
    mx.iter_mut().for_each(|v| *v /= s);
    let mut kx = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut lambda = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let mut y = chol.solve(&mx);
        let my = m.mul_vec(&y);
        let s = dot(&y, &my).sqrt();
        y.iter_mut().for_each(|v| *v /= s);
        x = y;
        mx = my.into_iter().map(|v| v / s).collect();
        k.mul_vec_into(&x, &mut kx);
        let previous = lambda;
        lambda = dot(&x, &kx);
        let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
        residual = norm(&r) / ((k_norm + lambda.abs() * m_norm) * norm(&x));
        let settled = (lambda - previous).abs() <= RQ_STAGNATION * lambda.abs()
            || residual <= RESIDUAL_FLOOR * opts.tol;
        if residual <= opts.tol && settled {
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let sign_consistent = x.iter().all(|&v| v >= -1e-12 * scale);
            return Ok(EigenResult {
                value: lambda,
                vector: x,
                residual,
                iterations: it,
                sign_consistent,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub level: u32,
    pub h_max: f64,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub levels: Vec<LevelEstimate>,
    pub extrapolated: f64,
    /// |finest - extrapolated|; infinite when only one level was solved.
    pub error_estimate: f64,
}

/// Richardson extrapolation of the two finest values assuming an O(h^2) error
/// and h halving per level.
pub fn richardson(coarse: (u32, f64), fine: (u32, f64)) -> (f64, f64) {
    let ratio = 4f64.powi((fine.0 - coarse.0) as i32);
    let extrapolated = fine.1 + (fine.1 - coarse.1) / (ratio - 1.0);
    (extrapolated, (fine.1 - extrapolated).abs())
}

impl ConvergenceSeries {
    pub fn from_levels(levels: Vec<LevelEstimate>) -> Self {
        let (extrapolated, error_estimate) = Self::extrapolate(&levels);
        ConvergenceSeries {
            levels,
            extrapolated,
            error_estimate,
        }
    }

    fn extrapolate(levels: &[LevelEstimate]) -> (f64, f64) {
        match levels {
            [] => (f64::NAN, f64::INFINITY),
            [only] => (only.eigenvalue, f64::INFINITY),
            [.., a, b] => richardson((a.level, a.eigenvalue), (b.level, b.eigenvalue)),
        }
    }

    /// The series truncated to its first `len` levels.
    pub fn truncated(&self, len: usize) -> ConvergenceSeries {
        ConvergenceSeries::from_levels(self.levels[..len.min(self.levels.len())].to_vec())
    }

    pub fn finest(&self) -> f64 {
        self.levels.last().map_or(f64::NAN, |l| l.eigenvalue)
    }

    /// log2 of the ratio of successive differences over the three finest levels.
    pub fn observed_order(&self) -> Option<f64> {
        match self.levels.as_slice() {
            [.., a, b, c] => {
                let r = (a.eigenvalue - b.eigenvalue) / (b.eigenvalue - c.eigenvalue);
                Some(r.log2() / (c.level - b.level) as f64)
            }
            _ => None,
        }
    }

    /// Eigenvalues non-increasing under refinement, up to `rel_tol`.
    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        self.levels
            .windows(2)
            .all(|w| w[1].eigenvalue <= w[0].eigenvalue * (1.0 + rel_tol))
    }

    /// Relative error estimate.
    pub fn relative_error(&self) -> f64 {
        self.error_estimate / self.extrapolated.abs()
    }
}

/// A discrete eigenfunction with point evaluation.
#[derive(Clone, Debug)]
pub struct EigenField {
    pub mesh: Mesh,
    /// Values at every mesh node (zero on Dirichlet nodes).
    pub nodal: Vec<f64>,
    pub eigenvalue: f64,
    locator: ElementLocator,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub value: f64,
    pub gradient: Point,
    pub element: usize,
}

impl EigenField {
    pub fn new(mesh: Mesh, nodal: Vec<f64>, eigenvalue: f64) -> Self {
        let locator = ElementLocator::new(&mesh);
        EigenField {
            mesh,
            nodal,
            eigenvalue,
            locator,
        }
    }

    pub fn eval(&self, p: Point) -> Result<FieldSample> {
        let (e, lam) = self
            .locator
            .locate(&self.mesh, p)
            .ok_or(Error::OutsideDomain { x: p.x, y: p.y })?;
        Ok(self.sample_in(e, lam))
    }

    fn sample_in(&self, e: usize, lam: [f64; 3]) -> FieldSample {
        let el = self.mesh.elements[e];
        let u = [self.nodal[el[0]], self.nodal[el[1]], self.nodal[el[2]]];
        let value = lam[0] * u[0] + lam[1] * u[1] + lam[2] * u[2];
        FieldSample {
            value,
            gradient: self.element_gradient(e),
            element: e,
        }
    }

    pub fn element_gradient(&self, e: usize) -> Point {
        let [p0, p1, p2] = self.mesh.element_points(e);
        let el = self.mesh.elements[e];
        let u = [self.nodal[el[0]], self.nodal[el[1]], self.nodal[el[2]]];
        let two_a = (p1 - p0).cross(p2 - p0);
        let b = [p1.y - p2.y, p2.y - p0.y, p0.y - p1.y];
        let c = [p2.x - p1.x, p0.x - p2.x, p1.x - p0.x];
        Point::new(
            (b[0] * u[0] + b[1] * u[1] + b[2] * u[2]) / two_a,
            (c[0] * u[0] + c[1] * u[1] + c[2] * u[2]) / two_a,
        )
    }

    /// Exact integrals of u^2 and |Du|^2 over the mesh.
    pub fn energies(&self) -> (f64, f64) {
        let mut l2 = 0.0;
        let mut h1 = 0.0;
        for e in 0..self.mesh.elements.len() {
            let (ke, me) = element_matrices(self.mesh.element_points(e));
            let el = self.mesh.elements[e];
            for a in 0..3 {
                for b in 0..3 {
                    let uu = self.nodal[el[a]] * self.nodal[el[b]];
                    l2 += me[a][b] * uu;
                    h1 += ke[a][b] * uu;
                }
            }
        }
        (l2, h1)
    }
}

/// Point evaluation of a discrete eigenfunction and its element gradient.
pub fn eigenfunction_eval(field: &EigenField, points: &[Point]) -> Result<Vec<FieldSample>> {
    points.iter().map(|&p| field.eval(p)).collect()
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub series: ConvergenceSeries,
    pub eigen: EigenResult,
    pub field: EigenField,
}

fn check_levels(levels: &RangeInclusive<u32>) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidLevels(format!(
            "{}..={} is empty",
            levels.start(),
            levels.end()
        )));
    }
    if *levels.end() > 12 {
        return Err(Error::InvalidLevels(format!(
            "level {} is too fine",
            levels.end()
        )));
    }
    Ok(())
}

/// Solves on `coarse` refined to every level in `levels`.
pub fn solve_series(
    coarse: Mesh,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<Solution> {
    check_levels(&levels)?;
    let mut mesh = coarse;
    while mesh.level < *levels.start() {
        mesh = refine(&mesh);
    }
    let mut estimates = Vec::new();
    loop {
        let asm = assemble(&mesh)?;
        let eig = smallest_eigenpair(&asm.stiffness, &asm.mass, opts)?;
        estimates.push(LevelEstimate {
            level: mesh.level,
            h_max: mesh.h_max(),
            eigenvalue: eig.value,
            iterations: eig.iterations,
            residual: eig.residual,
        });
        if mesh.level >= *levels.end() {
            let nodal = asm.free.expand(&eig.vector);
            let field = EigenField::new(mesh, nodal, eig.value);
            return Ok(Solution {
                series: ConvergenceSeries::from_levels(estimates),
                eigen: eig,
                field,
            });
        }
        mesh = refine(&mesh);
    }
}

/// First Dirichlet eigenvalue of P_N^r on fan meshes about its center.
pub fn solve_polygon(
    spec: &RegularPolygonSpec,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<Solution> {
    let p = crate::geometry::make_regular_polygon(spec)?;
    solve_polygon_shape(&p, Some(spec.center), levels, opts)
}

/// First Dirichlet eigenvalue of a polygon star-shaped about `center`
/// (default: its centroid).
pub fn solve_polygon_shape(
    p: &Polygon,
    center: Option<Point>,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<Solution> {
    let coarse = mesh_star_polygon(p, center.unwrap_or_else(|| p.centroid()), 0)?;
    solve_series(coarse, levels, opts)
}

/// First mixed eigenvalue of T(alpha, r): Dirichlet on gamma1, Neumann on
/// gamma2 and gamma3.
pub fn solve_triangle(
    spec: &TriangleSpec,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<Solution> {
    solve_series(mesh_triangle(spec, 0)?, levels, opts)
}
