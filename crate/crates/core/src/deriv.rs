//! Derivative of mu(T(alpha, r)) with respect to alpha: the boundary-integral
//! formula along the hypotenuse against central finite differences, the
//! trace comparison lemma, and the integrated polygon inequalities.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::J0_SQUARED;
use crate::error::{Error, Result};
use crate::femeig::{solve_triangle, ConvergenceSeries, EigenField, SolverOptions};
use crate::geometry::{regular_metrics, Point, RegularPolygonSpec, TriangleSpec};

/// Finite-difference step in alpha.
pub const FD_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub s: f64,
    pub g: f64,
    pub g_prime: f64,
}

/// Local fit g(s_c + t) = a + b t + c t^2.
#[derive(Clone, Copy, Debug)]
struct LocalFit {
    center: f64,
    coef: [f64; 3],
}

impl LocalFit {
    fn value(&self, s: f64) -> f64 {
        let t = s - self.center;
        self.coef[0] + t * (self.coef[1] + t * self.coef[2])
    }

    fn slope(&self, s: f64) -> f64 {
        self.coef[1] + 2.0 * self.coef[2] * (s - self.center)
    }
}

/// The hypotenuse trace with its local fits.
#[derive(Clone, Debug)]
pub struct Trace {
    pub samples: Vec<TraceSample>,
    fits: Vec<LocalFit>,
    /// Largest least-squares residual of a local fit, relative to max |g|.
    pub fit_residual: f64,
}

const WINDOW: usize = 5;

/// Chebyshev-Lobatto points on [0, r], ascending.
pub fn chebyshev_points(r: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 0.5 * r * (1.0 - (PI * j as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Samples g(s) = v(s cos alpha, s sin alpha) at Chebyshev points and
/// differentiates quadratic least-squares fits over five neighbours.
pub fn hypotenuse_trace(field: &EigenField, spec: &TriangleSpec, samples: usize) -> Result<Trace> {
    spec.validate()?;
    if samples < 64 {
        return Err(Error::InvalidArgument(format!(
            "need at least 64 trace samples, got {samples}"
        )));
    }
    let (sin, cos) = spec.alpha.sin_cos();
    let s = chebyshev_points(spec.r, samples);
    let mut g = Vec::with_capacity(samples);
    for &si in &s {
        let p = if si == spec.r {
            spec.vertices()[2]
        } else {
            Point::new(si * cos, si * sin)
        };
        g.push(field.eval(p)?.value);
    }
    let scale = g
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut fits = Vec::with_capacity(samples);
    let mut fit_residual: f64 = 0.0;
    for j in 0..samples {
        let lo = j.saturating_sub(WINDOW / 2).min(samples - WINDOW);
        let (fit, res) = quadratic_fit(&s[lo..lo + WINDOW], &g[lo..lo + WINDOW], s[j]);
        fit_residual = fit_residual.max(res / scale);
        fits.push(fit);
    }
    let samples = s
        .iter()
        .zip(&g)
        .zip(&fits)
        .map(|((&s, &g), f)| TraceSample {
            s,
            g,
            g_prime: f.slope(s),
        })
        .collect();
    Ok(Trace {
        samples,
        fits,
        fit_residual,
    })
}

fn quadratic_fit(s: &[f64], g: &[f64], center: f64) -> (LocalFit, f64) {
    let width = (s[s.len() - 1] - s[0]).max(f64::MIN_POSITIVE);
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (&si, &gi) in s.iter().zip(g) {
        let t = (si - center) / width;
        let row = [1.0, t, t * t];
        for a in 0..3 {
            atb[a] += row[a] * gi;
            for b in 0..3 {
                ata[a][b] += row[a] * row[b];
            }
        }
    }
    let c = solve3(ata, atb);
    let coef = [c[0], c[1] / width, c[2] / (width * width)];
    let fit = LocalFit { center, coef };
    let res = s
        .iter()
        .zip(g)
        .map(|(&si, &gi)| (fit.value(si) - gi).powi(2))
        .sum::<f64>()
        .sqrt();
    (fit, res)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for k in 0..3 {
        let p = (k..3)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..3 {
            let f = a[i][k] / a[k][k];
            let pivot = a[k];
            for (x, p) in a[i].iter_mut().zip(pivot).skip(k) {
                *x -= f * p;
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

impl Trace {
    /// Composite Gauss-Legendre integral of f(s, g, g') over [0, r], using on
    /// each sample interval the fit of the nearer endpoint.
    pub fn integrate(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for j in 0..self.samples.len() - 1 {
            let (a, b) = (self.samples[j].s, self.samples[j + 1].s);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
                let s = mid + half * x;
                let fit = if *x < 0.0 {
                    &self.fits[j]
                } else {
                    &self.fits[j + 1]
                };
                total += w * half * f(s, fit.value(s), fit.slope(s));
            }
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub alpha: f64,
    pub r: f64,
    pub finest_level: u32,
    pub mu: f64,
    pub mu_err: f64,
    pub dmu_formula: f64,
    pub dmu_fd: f64,
    /// Level and step-size uncertainty of `dmu_fd`.
    pub fd_err: f64,
    pub relative_discrepancy: f64,
    /// mu tan(alpha) - (mu - j0^2/(r^2 cos^2 alpha)) / tan(alpha).
    pub lower_bound_stmt: f64,
    /// 2 mu tan(alpha) - (mu - j0^2/r^2) / (sin(alpha) cos(alpha)), the last
    /// line of the argument, kept for comparison only.
    pub lower_bound_proof: f64,
    pub lower_bound_ok: bool,
    /// dmu_fd > mu tan(alpha) under the error-budget rule.
    pub exceeds_mu_tan: bool,
    /// d/dalpha of r^2 sin(alpha) cos(alpha) mu, by central differences.
    pub product_derivative: f64,
    pub product_err: f64,
    /// product_derivative >= j0^2 under the error-budget rule.
    pub product_ok: bool,
    /// j0^2/r^2 < mu < j0^2/(r^2 cos^2 alpha).
    pub sector_bounds_ok: bool,
    pub trace_fit_residual: f64,
    /// Set when the trace fits are poor (relative residual above 1e-3).
    pub fit_warning: bool,
}

/// Formula and finite-difference derivative of mu at (alpha, r).
pub fn shape_derivative(
    alpha: f64,
    r: f64,
    levels: RangeInclusive<u32>,
    samples: usize,
    opts: SolverOptions,
) -> Result<DerivativeReport> {
    let spec = TriangleSpec::new(alpha, r);
    spec.validate()?;
    let h = FD_STEP;
    TriangleSpec::new(alpha - 2.0 * h, r).validate()?;
    TriangleSpec::new(alpha + 2.0 * h, r).validate()?;
    if levels.start() == levels.end() {
        return Err(Error::InvalidLevels(
            "finite differences need at least two levels".into(),
        ));
    }

    let offsets = [0.0, -h, h, -2.0 * h, 2.0 * h];
    let solved: Vec<Result<(ConvergenceSeries, Option<EigenField>)>> = offsets
        .par_iter()
        .map(|&d| {
            let sol = solve_triangle(&TriangleSpec::new(alpha + d, r), levels.clone(), opts)?;
            Ok((sol.series, (d == 0.0).then_some(sol.field)))
        })
        .collect();
    let mut series = Vec::with_capacity(5);
    let mut field = None;
    for s in solved {
        let (ser, f) = s?;
        if f.is_some() {
            field = f;
        }
        series.push(ser);
    }
    let field = field.expect("center solve keeps its field");
    let center = &series[0];
    let mu = center.extrapolated;
    let mu_err = center.error_estimate;

    let trace = hypotenuse_trace(&field, &spec, samples)?;
    let (l2, _) = field.energies();
    let line = trace.integrate(|s, g, gp| (gp * gp - mu * g * g) * s);
    let tan = alpha.tan();
    let dmu_formula = line / l2 + 2.0 * mu * tan;

    let fd = |lo: f64, hi: f64, step: f64| (hi - lo) / (2.0 * step);
    let ext = |s: &ConvergenceSeries| s.extrapolated;
    let coarse = |s: &ConvergenceSeries| s.truncated(s.levels.len() - 1).extrapolated;
    let dmu_fd = fd(ext(&series[1]), ext(&series[2]), h);
    let dmu_fd_coarse = fd(coarse(&series[1]), coarse(&series[2]), h);
    let dmu_fd_wide = fd(ext(&series[3]), ext(&series[4]), 2.0 * h);
    let fd_err = (dmu_fd - dmu_fd_coarse).abs() + (dmu_fd - dmu_fd_wide).abs() / 3.0;

    let (sin, cos) = alpha.sin_cos();
    let r2 = r * r;
    let lower_bound_stmt = mu * tan - (mu - J0_SQUARED / (r2 * cos * cos)) / tan;
    let lower_bound_proof = 2.0 * mu * tan - (mu - J0_SQUARED / r2) / (sin * cos);
    let bound_err = fd_err + (tan - 1.0 / tan).abs() * mu_err;
    let lower_bound_ok = dmu_fd >= lower_bound_stmt - 3.0 * bound_err;
    let exceeds_mu_tan = dmu_fd - mu * tan > 3.0 * (fd_err + tan * mu_err);

    let product = |s: &ConvergenceSeries, a: f64| r2 * a.sin() * a.cos() * s.extrapolated;
    let product_derivative = fd(
        product(&series[1], alpha - h),
        product(&series[2], alpha + h),
        h,
    );
    let product_err = r2 * (sin * cos * fd_err + (2.0 * alpha).cos().abs() * mu_err);
    let product_ok = product_derivative >= J0_SQUARED - 3.0 * product_err;
    let sector_bounds_ok = crate::certified_less((J0_SQUARED / r2, 0.0), (mu, mu_err))
        && crate::certified_less((mu, mu_err), (J0_SQUARED / (r2 * cos * cos), 0.0));

    Ok(DerivativeReport {
        alpha,
        r,
        finest_level: *levels.end(),
        mu,
        mu_err,
        dmu_formula,
        dmu_fd,
        fd_err,
        relative_discrepancy: (dmu_formula - dmu_fd).abs() / dmu_fd.abs(),
        lower_bound_stmt,
        lower_bound_proof,
        lower_bound_ok,
        exceeds_mu_tan,
        product_derivative,
        product_err,
        product_ok,
        sector_bounds_ok,
        trace_fit_residual: trace.fit_residual,
        fit_warning: trace.fit_residual > 1e-3,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityPoint {
    pub x: f64,
    /// v^2 on the hypotenuse above x.
    pub hypotenuse: f64,
    /// Mean of v^2 over the vertical segment below it.
    pub average: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub alpha: f64,
    pub r: f64,
    pub level: u32,
    pub points: Vec<ConcavityPoint>,
    /// Barycenters farther than 2 h_max from the boundary.
    pub gradient_checked: usize,
    /// Barycenters where dv/dy >= 0, with the offending value.
    pub gradient_failures: Vec<(Point, f64)>,
    pub pass: bool,
}

/// Compares v^2(x, x tan(alpha)) with the average of v^2(x, .) over
/// [0, x tan(alpha)] on `grid` equispaced x values, and checks the sign of
/// dv/dy at interior barycenters.
pub fn check_concavity_lemma(
    alpha: f64,
    r: f64,
    level: u32,
    grid: usize,
    opts: SolverOptions,
) -> Result<ConcavityReport> {
    let spec = TriangleSpec::new(alpha, r);
    spec.validate()?;
    let field = solve_triangle(&spec, level..=level, opts)?.field;
    let mesh = &field.mesh;
    let margin = 2.0 * mesh.h_max();
    let (sin, cos) = alpha.sin_cos();
    let x_max = r * cos;
    if grid == 0 || 2.0 * margin >= x_max {
        return Err(Error::InvalidArgument(format!(
            "mesh level {level} is too coarse for a {grid}-point grid"
        )));
    }

    let mut points = Vec::with_capacity(grid);
    for i in 0..grid {
        let x = margin + (x_max - 2.0 * margin) * (i as f64 + 0.5) / grid as f64;
        let top = x * alpha.tan();
        let v_top = field.eval(Point::new(x, top))?.value;
        let pieces = 64;
        let mut integral = 0.0;
        for k in 0..pieces {
            let (a, b) = (
                top * k as f64 / pieces as f64,
                top * (k + 1) as f64 / pieces as f64,
            );
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (t, w) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
                let v = field.eval(Point::new(x, mid + half * t))?.value;
                integral += w * half * v * v;
            }
        }
        let average = integral / top;
        let hypotenuse = v_top * v_top;
        points.push(ConcavityPoint {
            x,
            hypotenuse,
            average,
            pass: hypotenuse < average,
        });
    }

    let mut gradient_checked = 0;
    let mut gradient_failures = Vec::new();
    for e in 0..mesh.elements.len() {
        let [a, b, c] = mesh.element_points(e);
        let p = (a + b + c) * (1.0 / 3.0);
        let dist = p.y.min(x_max - p.x).min(p.x * sin - p.y * cos);
        if dist <= margin {
            continue;
        }
        gradient_checked += 1;
        let dy = field.element_gradient(e).y;
        if !(dy < 0.0) {
            gradient_failures.push((p, dy));
        }
    }
    let pass =
        points.iter().all(|p| p.pass) && gradient_failures.is_empty() && gradient_checked > 0;
    Ok(ConcavityReport {
        alpha,
        r,
        level,
        points,
        gradient_checked,
        gradient_failures,
        pass,
    })
}

/// lambda(P_N^r) with its error estimate, from the reduced triangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonEigenvalue {
    pub n: usize,
    pub r: f64,
    pub series: ConvergenceSeries,
}

impl PolygonEigenvalue {
    pub fn value(&self) -> f64 {
        self.series.extrapolated
    }

    pub fn err(&self) -> f64 {
        self.series.error_estimate
    }
}

/// Solves mu(T(pi/N, r)) for every N in `ns`, concurrently and in order.
pub fn polygon_eigenvalues(
    ns: RangeInclusive<usize>,
    r: f64,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Vec<Result<PolygonEigenvalue>> {
    let ns: Vec<usize> = ns.collect();
    ns.par_iter()
        .map(|&n| {
            RegularPolygonSpec::new(n, r).validate()?;
            let series =
                solve_triangle(&TriangleSpec::for_polygon(n, r), levels.clone(), opts)?.series;
            Ok(PolygonEigenvalue { n, r, series })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    /// lambda(P_{N+1}).
    pub cos_ratio_lhs: f64,
    /// lambda(P_N) cos(pi/N) / cos(pi/(N+1)).
    pub cos_ratio_rhs: f64,
    pub cos_ratio_err: f64,
    pub cos_ratio_certified: bool,
    /// l_{N+1} rho_{N+1} lambda(P_{N+1}).
    pub lr_lambda_lhs: f64,
    /// l_N rho_N lambda(P_N) - 2 pi j0^2 / (N (N+1)).
    pub lr_lambda_rhs: f64,
    pub lr_lambda_err: f64,
    pub lr_lambda_certified: bool,
}

/// The cos-ratio and l rho lambda bounds between P_N and P_{N+1}.
pub fn step_record(a: &PolygonEigenvalue, b: &PolygonEigenvalue) -> Result<StepRecord> {
    if b.n != a.n + 1 || a.r != b.r {
        return Err(Error::InvalidArgument(format!(
            "need consecutive polygons, got N={} and N={}",
            a.n, b.n
        )));
    }
    let n = a.n as f64;
    let m = |e: &PolygonEigenvalue| regular_metrics(&RegularPolygonSpec::new(e.n, e.r));
    let (ma, mb) = (m(a)?, m(b)?);
    let factor = (PI / n).cos() / (PI / (n + 1.0)).cos();
    let cos_ratio_rhs = a.value() * factor;
    let lr_a = ma.side_length * ma.inradius;
    let lr_b = mb.side_length * mb.inradius;
    let lr_lambda_lhs = lr_b * b.value();
    let lr_lambda_rhs = lr_a * a.value() - 2.0 * PI * J0_SQUARED / (n * (n + 1.0));
    let cos_ratio_err = b.err() + factor * a.err();
    let lr_lambda_err = lr_b * b.err() + lr_a * a.err();
    Ok(StepRecord {
        n: a.n,
        cos_ratio_lhs: b.value(),
        cos_ratio_rhs,
        cos_ratio_err,
        cos_ratio_certified: cos_ratio_rhs - b.value() > 3.0 * cos_ratio_err,
        lr_lambda_lhs,
        lr_lambda_rhs,
        lr_lambda_err,
        lr_lambda_certified: lr_lambda_rhs - lr_lambda_lhs > 3.0 * lr_lambda_err,
    })
}

/// Step records for every N in `ns`, solving N up to max+1.
pub fn step_records(
    ns: RangeInclusive<usize>,
    r: f64,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<Vec<StepRecord>> {
    let (lo, hi) = (*ns.start(), *ns.end());
    let table = polygon_eigenvalues(lo..=hi + 1, r, levels, opts)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    table
        .windows(2)
        .map(|w| step_record(&w[0], &w[1]))
        .collect()
}
