//! The inequality suite over a range of regular polygons at r = 1, with CSV
//! and Markdown output.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::J0_SQUARED;
use crate::deriv::{polygon_eigenvalues, PolygonEigenvalue};
use crate::error::{Error, Result};
use crate::femeig::{solve_polygon, SolverOptions};
use crate::geometry::{regular_metrics, RegularPolygonSpec};

/// pi j0^2, the Faber-Krahn constant.
pub const FABER_KRAHN: f64 = PI * J0_SQUARED;

/// One strict inequality lhs < rhs with the combined error of both sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub lhs: f64,
    pub rhs: f64,
    pub err: f64,
    pub slack: f64,
    pub certified: bool,
}

impl Check {
    pub fn new(lhs: f64, rhs: f64, err: f64) -> Self {
        let slack = rhs - lhs;
        Check {
            lhs,
            rhs,
            err,
            slack,
            certified: slack > 3.0 * err,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub polygon_lambda: f64,
    pub polygon_err: f64,
    pub relative_gap: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub n: usize,
    pub lambda: f64,
    pub err: f64,
    pub area: f64,
    pub area_lambda: f64,
    /// area_lambda(N) / area_lambda(N+1).
    pub ratio: Option<f64>,
    pub t1: Option<Check>,
    pub t2: Option<Check>,
    pub t3: Option<Check>,
    pub c1: Check,
    pub c2: Option<Check>,
    pub af1: Option<Check>,
    pub af2: Option<Check>,
    pub cross: Option<CrossCheck>,
}

impl RowRecord {
    /// Every non-conjecture check present and certified.
    pub fn certified(&self) -> bool {
        [self.t1, self.t2, self.t3, Some(self.c1), self.c2]
            .iter()
            .all(|c| c.is_some_and(|c| c.certified))
            && self.cross.is_none_or(|c| c.agrees)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub levels: RangeInclusive<u32>,
    pub opts: SolverOptions,
    /// Polygon solves for cross-validation run for N up to this value.
    pub cross_validate_up_to: usize,
    pub cross_levels: RangeInclusive<u32>,
}

impl SuiteConfig {
    pub fn new(n_min: usize, n_max: usize, levels: RangeInclusive<u32>) -> Self {
        SuiteConfig {
            n_min,
            n_max,
            levels,
            opts: SolverOptions::default(),
            cross_validate_up_to: 8,
            cross_levels: 3..=6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub rows: Vec<RowRecord>,
    /// Side counts whose solve failed, with the error.
    pub missing: Vec<(usize, String)>,
    pub failures: Vec<String>,
    pub all_certified: bool,
}

/// Eigenvalue of P_N^1 with the quantities derived from it.
#[derive(Clone, Debug)]
struct Entry {
    eig: PolygonEigenvalue,
    area: f64,
    lr: f64,
}

impl Entry {
    fn al(&self) -> (f64, f64) {
        (self.area * self.eig.value(), self.area * self.eig.err())
    }
}

fn check_range(config: &SuiteConfig) -> Result<()> {
    let (lo, hi) = (config.n_min, config.n_max);
    if lo < 3 || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= n-min < n-max, got {lo} and {hi}"
        )));
    }
    Ok(())
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    check_range(config)?;
    let solved = polygon_eigenvalues(
        config.n_min..=config.n_max + 2,
        1.0,
        config.levels.clone(),
        config.opts,
    );
    suite_from_eigenvalues(config, solved)
}

/// Builds the report from eigenvalues of P_N^1 for N = n_min..=n_max+2, in
/// order.
pub fn suite_from_eigenvalues(
    config: &SuiteConfig,
    solved: Vec<Result<PolygonEigenvalue>>,
) -> Result<SuiteReport> {
    check_range(config)?;
    let (lo, hi) = (config.n_min, config.n_max);
    if solved.len() != hi + 3 - lo {
        return Err(Error::InvalidArgument(format!(
            "expected {} eigenvalues, got {}",
            hi + 3 - lo,
            solved.len()
        )));
    }
    let mut entries: Vec<Option<Entry>> = Vec::with_capacity(solved.len());
    let mut missing = Vec::new();
    for (n, res) in (lo..=hi + 2).zip(solved) {
        match res.and_then(|eig| {
            if eig.n != n || eig.r != 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalue for N={} r={} in the slot of N={n}",
                    eig.n, eig.r
                )));
            }
            let m = regular_metrics(&RegularPolygonSpec::new(n, 1.0))?;
            Ok(Entry {
                eig,
                area: m.area,
                lr: m.side_length * m.inradius,
            })
        }) {
            Ok(e) => entries.push(Some(e)),
            Err(err) => {
                if n <= hi {
                    missing.push((n, err.to_string()));
                }
                entries.push(None);
            }
        }
    }

    let cross_top = config.cross_validate_up_to.min(hi);
    let cross: Vec<Option<CrossCheck>> = (lo..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            if n > cross_top {
                return None;
            }
            let tri = entries[n - lo].as_ref()?;
            let poly = solve_polygon(
                &RegularPolygonSpec::new(n, 1.0),
                config.cross_levels.clone(),
                config.opts,
            )
            .ok()?
            .series;
            let gap = (poly.extrapolated - tri.eig.value()).abs() / poly.extrapolated;
            let budget = 3.0 * (poly.error_estimate + tri.eig.err()) / poly.extrapolated;
            Some(CrossCheck {
                polygon_lambda: poly.extrapolated,
                polygon_err: poly.error_estimate,
                relative_gap: gap,
                agrees: gap < budget.max(1e-3),
            })
        })
        .collect();

    let ratio_of = |i: usize| -> Option<(f64, f64)> {
        let a = entries.get(i)?.as_ref()?;
        let b = entries.get(i + 1)?.as_ref()?;
        let (x, ex) = a.al();
        let (y, ey) = b.al();
        Some((x / y, x / y * (ex / x + ey / y)))
    };

    let mut rows = Vec::new();
    for n in lo..=hi {
        let i = n - lo;
        let Some(a) = entries[i].as_ref() else {
            continue;
        };
        let next = entries[i + 1].as_ref();
        let nf = n as f64;
        let (al, al_err) = a.al();
        let (l, e) = (a.eig.value(), a.eig.err());
        let t1 = next.map(|b| Check::new(b.eig.value(), l, b.eig.err() + e));
        let t2 = next.map(|b| {
            let f = (PI / nf).cos() / (PI / (nf + 1.0)).cos();
            Check::new(b.eig.value(), l * f, b.eig.err() + f * e)
        });
        let t3 = next.map(|b| {
            Check::new(
                b.lr * b.eig.value(),
                a.lr * l - 2.0 * PI * J0_SQUARED / (nf * (nf + 1.0)),
                b.lr * b.eig.err() + a.lr * e,
            )
        });
        let c1 = Check::new(FABER_KRAHN, al, al_err);
        let c2 = next.map(|b| {
            let (bl, be) = b.al();
            Check::new(
                bl,
                al + (al - FABER_KRAHN) / nf,
                be + (1.0 + 1.0 / nf) * al_err,
            )
        });
        let af1 = next.map(|b| {
            let (bl, be) = b.al();
            Check::new(bl, al, be + al_err)
        });
        let ratio = ratio_of(i);
        let af2 = match (ratio, ratio_of(i + 1)) {
            (Some((x, ex)), Some((y, ey))) => Some(Check::new(y, x, ex + ey)),
            _ => None,
        };
        rows.push(RowRecord {
            n,
            lambda: l,
            err: e,
            area: a.area,
            area_lambda: al,
            ratio: ratio.map(|r| r.0),
            t1,
            t2,
            t3,
            c1,
            c2,
            af1,
            af2,
            cross: cross[i],
        });
    }

    let mut failures: Vec<String> = missing
        .iter()
        .map(|(n, e)| format!("N={n}: no eigenvalue ({e})"))
        .collect();
    for row in &rows {
        let named = [
            ("T1", row.t1),
            ("T2", row.t2),
            ("T3", row.t3),
            ("C1", Some(row.c1)),
            ("C2", row.c2),
        ];
        for (name, c) in named {
            match c {
                Some(c) if c.certified => {}
                Some(c) => failures.push(format!(
                    "N={}: {name} not certified (slack {:.3e}, 3*err {:.3e})",
                    row.n,
                    c.slack,
                    3.0 * c.err
                )),
                None => failures.push(format!("N={}: {name} missing a neighbour", row.n)),
            }
        }
        if let Some(c) = row.cross.filter(|c| !c.agrees) {
            failures.push(format!(
                "N={}: polygon and triangle disagree by {:.3e}",
                row.n, c.relative_gap
            ));
        }
    }
    Ok(SuiteReport {
        config: config.clone(),
        all_certified: failures.is_empty(),
        rows,
        missing,
        failures,
    })
}

fn flag(c: Option<Check>) -> u8 {
    c.is_some_and(|c| c.certified) as u8
}

pub const CSV_HEADER: &str = "N,lambda,err,area,area_lambda,ratio,t1,t2,t3,c1,c2,af1,af2";

pub fn write_csv(report: &SuiteReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut rows = report.rows.iter().peekable();
    for n in report.config.n_min..=report.config.n_max {
        match rows.peek() {
            Some(row) if row.n == n => {
                let ratio = row.ratio.map_or(String::new(), |r| format!("{r:.11e}"));
                let _ = writeln!(
                    out,
                    "{},{:.11e},{:.11e},{:.11e},{:.11e},{},{},{},{},{},{},{},{}",
                    row.n,
                    row.lambda,
                    row.err,
                    row.area,
                    row.area_lambda,
                    ratio,
                    flag(row.t1),
                    flag(row.t2),
                    flag(row.t3),
                    flag(Some(row.c1)),
                    flag(row.c2),
                    flag(row.af1),
                    flag(row.af2),
                );
                rows.next();
            }
            _ => {
                let _ = writeln!(out, "{n},,,,,,0,0,0,0,0,0,0");
            }
        }
    }
    out
}

fn table(
    out: &mut String,
    title: &str,
    rows: &[RowRecord],
    pick: impl Fn(&RowRecord) -> Option<Check>,
) {
    let _ = writeln!(out, "## {title}\n");
    let _ = writeln!(out, "| N | lhs | rhs | slack | 3 x err | certified |");
    let _ = writeln!(out, "|---|---|---|---|---|---|");
    for row in rows {
        if let Some(c) = pick(row) {
            let _ = writeln!(
                out,
                "| {} | {:.10} | {:.10} | {:.3e} | {:.3e} | {} |",
                row.n,
                c.lhs,
                c.rhs,
                c.slack,
                3.0 * c.err,
                if c.certified { "yes" } else { "no" }
            );
        }
    }
    out.push('\n');
}

pub fn write_markdown(report: &SuiteReport) -> String {
    let cfg = &report.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# Inequality suite, N = {}..{}, r = 1\n",
        cfg.n_min, cfg.n_max
    );
    let _ = writeln!(
        out,
        "Mesh levels {}..{}, solver tolerance {:.1e}. An inequality lhs < rhs is certified when rhs - lhs > 3 x err.\n",
        cfg.levels.start(),
        cfg.levels.end(),
        cfg.opts.tol
    );
    let _ = writeln!(
        out,
        "Overall: {}\n",
        if report.all_certified {
            "all certified"
        } else {
            "FAILED"
        }
    );
    for f in &report.failures {
        let _ = writeln!(out, "- {f}");
    }
    if !report.failures.is_empty() {
        out.push('\n');
    }
    let rows = &report.rows;
    table(&mut out, "T1: lambda(P_{N+1}) < lambda(P_N)", rows, |r| {
        r.t1
    });
    table(
        &mut out,
        "T2: lambda(P_{N+1}) < lambda(P_N) cos(pi/N) / cos(pi/(N+1))",
        rows,
        |r| r.t2,
    );
    table(
        &mut out,
        "T3: l_{N+1} rho_{N+1} lambda(P_{N+1}) < l_N rho_N lambda(P_N) - 2 pi j0^2 / (N (N+1))",
        rows,
        |r| r.t3,
    );
    table(&mut out, "C1: pi j0^2 < Area(P_N) lambda(P_N)", rows, |r| {
        Some(r.c1)
    });
    table(
        &mut out,
        "C2: AL(N+1) < AL(N) + (AL(N) - pi j0^2) / N, with AL = Area x lambda",
        rows,
        |r| r.c2,
    );
    table(
        &mut out,
        "AF-1, conjecture check (numerical only): AL(N+1) < AL(N)",
        rows,
        |r| r.af1,
    );
    table(
        &mut out,
        "AF-2, conjecture check (numerical only): ratio(N+1) < ratio(N), ratio(N) = AL(N) / AL(N+1)",
        rows,
        |r| r.af2,
    );
    let crossed: Vec<&RowRecord> = rows.iter().filter(|r| r.cross.is_some()).collect();
    if !crossed.is_empty() {
        let _ = writeln!(out, "## Cross-validation against direct polygon solves\n");
        let _ = writeln!(out, "| N | triangle | polygon | relative gap | agrees |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for r in crossed {
            let c = r.cross.expect("filtered");
            let _ = writeln!(
                out,
                "| {} | {:.10} | {:.10} | {:.3e} | {} |",
                r.n,
                r.lambda,
                c.polygon_lambda,
                c.relative_gap,
                if c.agrees { "yes" } else { "no" }
            );
        }
        out.push('\n');
    }
    if !report.missing.is_empty() {
        let _ = writeln!(out, "## Missing rows\n");
        for (n, e) in &report.missing {
            let _ = writeln!(out, "- N={n}: {e}");
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeReport {
    pub n: usize,
    pub k: usize,
    /// 2 pi j0^2 (1/N - 1/K).
    pub partial_sum_bound: f64,
    /// The same sum accumulated term by term.
    pub term_sum: f64,
    /// l_N rho_N lambda_N - l_K rho_K lambda_K.
    pub lhs: f64,
    pub lhs_err: f64,
    pub telescope_certified: bool,
    /// Area(P_N) lambda(P_N) - pi j0^2.
    pub fk_gap: f64,
    pub fk_gap_err: f64,
    pub fk_certified: bool,
}

/// Sum of 2 pi j0^2 / (n (n+1)) for n = N..K-1.
pub fn telescoped_sum(n: usize, k: usize) -> (f64, f64) {
    let c = 2.0 * PI * J0_SQUARED;
    let terms: f64 = (n..k).map(|m| c / (m as f64 * (m as f64 + 1.0))).sum();
    (c * (1.0 / n as f64 - 1.0 / k as f64), terms)
}

pub fn telescope_faber_krahn(
    n: usize,
    k: usize,
    levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<TelescopeReport> {
    if n < 3 || k <= n {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= N < K, got {n}, {k}"
        )));
    }
    let solved = [n, k]
        .par_iter()
        .map(|&m| polygon_eigenvalues(m..=m, 1.0, levels.clone(), opts).remove(0))
        .collect::<Result<Vec<_>>>()?;
    let lr = |m: usize| -> Result<(f64, f64)> {
        let met = regular_metrics(&RegularPolygonSpec::new(m, 1.0))?;
        Ok((met.side_length * met.inradius, met.area))
    };
    let (lr_n, area_n) = lr(n)?;
    let (lr_k, _) = lr(k)?;
    let (a, b) = (&solved[0], &solved[1]);
    let (partial_sum_bound, term_sum) = telescoped_sum(n, k);
    let lhs = lr_n * a.value() - lr_k * b.value();
    let lhs_err = lr_n * a.err() + lr_k * b.err();
    let fk_gap = area_n * a.value() - FABER_KRAHN;
    let fk_gap_err = area_n * a.err();
    Ok(TelescopeReport {
        n,
        k,
        partial_sum_bound,
        term_sum,
        lhs,
        lhs_err,
        telescope_certified: lhs - partial_sum_bound > 3.0 * lhs_err,
        fk_gap,
        fk_gap_err,
        fk_certified: fk_gap > 3.0 * fk_gap_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoped_identity() {
        let (closed, terms) = telescoped_sum(4, 20);
        assert!((closed - 2.0 * PI * J0_SQUARED / 5.0).abs() < 1e-12);
        assert!((closed - terms).abs() < 1e-12);
        assert!((closed - 7.2674).abs() < 1e-4);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn closed_form_area_lambda() {
        let p3 = 3f64.sqrt() * 3.0 / 4.0 * 16.0 * PI * PI / 9.0;
        assert!((p3 - 4.0 * PI * PI / 3f64.sqrt()).abs() < 1e-12);
        assert!((p3 - 22.7929).abs() < 1e-4);
        assert!((2.0 * PI * PI - FABER_KRAHN - 1.5708).abs() < 1e-4);
    }

    #[test]
    fn check_uses_three_sigma() {
        assert!(Check::new(1.0, 1.31, 0.1).certified);
        assert!(!Check::new(1.0, 1.29, 0.1).certified);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(run_suite(&SuiteConfig::new(2, 5, 2..=3)).is_err());
        assert!(run_suite(&SuiteConfig::new(5, 5, 2..=3)).is_err());
    }

    #[test]
    fn small_suite_and_outputs() {
        let report = run_suite(&SuiteConfig::new(3, 5, 3..=6)).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.all_certified, "{:?}", report.failures);
        let csv = write_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("3,1.754"));
        assert!(lines[1].ends_with(",1,1,1,1,1,1,1"));
        let md = write_markdown(&report);
        assert!(md.contains("conjecture check (numerical only)"));
        assert!(md.contains("| 3 |"));
    }
}
