//! Acceptance criteria, one test each. Every test writes a single
//! `criterion NN: PASS|FAIL` line to stderr (uncaptured) before asserting.
//!
//! cargo test --release --test acceptance

use std::f64::consts::PI;
use std::fs;
use std::io::Write as _;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use polygon_spectra::bessel::J0_SQUARED;
use polygon_spectra::deriv::{
    check_concavity_lemma, polygon_eigenvalues, shape_derivative, step_record, DerivativeReport,
    PolygonEigenvalue,
};
use polygon_spectra::dissect::{
    build_dissection, build_dissection_with_delta, cut_angle, default_d_levels, eigen_sandwich,
    Certificates,
};
use polygon_spectra::femeig::{solve_polygon, solve_triangle, SolverOptions};
use polygon_spectra::geometry::{RegularPolygonSpec, TriangleSpec};
use polygon_spectra::triangle::verify_reduction_with;
use polygon_spectra::verify::{
    suite_from_eigenvalues, telescoped_sum, write_markdown, SuiteConfig, SuiteReport, FABER_KRAHN,
};

const TABLE_LEVELS: std::ops::RangeInclusive<u32> = 6..=8;
const TABLE_MAX_N: usize = 65;
const ALPHA_GRID: [f64; 7] = [16.0, 12.0, 8.0, 6.0, 5.0, 4.0, 3.0];

fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// Prints the criterion line and returns whether every check passed.
fn report(id: &str, title: &str, checks: &[(String, bool)]) -> bool {
    let pass = checks.iter().all(|c| c.1);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.1)
        .map(|c| c.0.as_str())
        .collect();
    let detail = if pass {
        format!("{} checks", checks.len())
    } else {
        format!("failed: {}", failed.join("; "))
    };
    let line = format!(
        "\ncriterion {id:>3}: {} {title} ({detail})\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    pass
}

/// lambda(P_N^1) for N = 3..=65 through the reduced triangles.
fn table() -> &'static [PolygonEigenvalue] {
    static TABLE: OnceLock<Vec<PolygonEigenvalue>> = OnceLock::new();
    TABLE.get_or_init(|| {
        polygon_eigenvalues(3..=TABLE_MAX_N, 1.0, TABLE_LEVELS, opts())
            .into_iter()
            .collect::<polygon_spectra::Result<Vec<_>>>()
            .expect("polygon table")
    })
}

fn eig(n: usize) -> &'static PolygonEigenvalue {
    &table()[n - 3]
}

fn suite() -> &'static SuiteReport {
    static SUITE: OnceLock<SuiteReport> = OnceLock::new();
    SUITE.get_or_init(|| {
        let mut config = SuiteConfig::new(3, 32, TABLE_LEVELS);
        config.cross_levels = 3..=6;
        let solved = table()[..32].iter().cloned().map(Ok).collect();
        suite_from_eigenvalues(&config, solved).expect("suite")
    })
}

/// Derivative reports on the alpha grid at finest levels 5, 6 and 7.
fn derivatives() -> &'static [Vec<DerivativeReport>; 3] {
    static D: OnceLock<[Vec<DerivativeReport>; 3]> = OnceLock::new();
    D.get_or_init(|| {
        [5, 6, 7].map(|l| {
            ALPHA_GRID
                .iter()
                .map(|k| shape_derivative(PI / k, 1.0, 3..=l, 256, opts()).expect("derivative"))
                .collect()
        })
    })
}

#[test]
fn criterion_01_closed_form_eigenvalues() {
    let mut checks = Vec::new();
    for (n, exact) in [(3, 16.0 * PI * PI / 9.0), (4, PI * PI)] {
        let t = Instant::now();
        let s = solve_polygon(&RegularPolygonSpec::new(n, 1.0), 3..=7, opts())
            .unwrap()
            .series;
        let secs = t.elapsed().as_secs_f64();
        let rel = (s.extrapolated - exact).abs() / exact;
        checks.push((format!("P{n} relative error {rel:.2e} < 1e-4"), rel < 1e-4));
        checks.push((format!("P{n} runtime {secs:.1}s < 60s"), secs < 60.0));
    }
    assert!(report("1", "closed-form eigenvalues of P3 and P4", &checks));
}

#[test]
fn criterion_02_symmetry_reduction() {
    let mut checks = Vec::new();
    for n in 3..=12 {
        let rep = verify_reduction_with(n, 1.0, 3..=6, 4..=7, opts()).unwrap();
        checks.push((
            format!("N={n} gap {:.2e} < 1e-3", rep.relative_gap),
            rep.relative_gap < 1e-3,
        ));
    }
    assert!(report(
        "2",
        "lambda(P_N) = mu(T(pi/N)) for N = 3..12",
        &checks
    ));
}

#[test]
fn criterion_03_disk_sandwich() {
    let mut checks = Vec::new();
    for n in 3..=64 {
        let e = eig(n);
        let upper = J0_SQUARED / (PI / n as f64).cos().powi(2);
        let lo = e.value() - J0_SQUARED > 3.0 * e.err();
        let hi = upper - e.value() > 3.0 * e.err();
        checks.push((format!("N={n} j0^2 < lambda"), lo));
        checks.push((format!("N={n} lambda < j0^2/cos^2(pi/N)"), hi));
    }
    for w in table()[..63].windows(2) {
        let ok =
            polygon_spectra::certified_less((w[1].value(), w[1].err()), (w[0].value(), w[0].err()));
        checks.push((format!("lambda(P_{}) < lambda(P_{})", w[1].n, w[0].n), ok));
    }
    let s = solve_triangle(&TriangleSpec::for_polygon(256, 1.0), 4..=7, opts())
        .unwrap()
        .series;
    let rel = (s.extrapolated - J0_SQUARED) / J0_SQUARED;
    checks.push((
        format!("P256 within {rel:.2e} of j0^2"),
        rel > 0.0 && rel < 1e-3,
    ));
    checks.push((
        "j0^2 = 5.7831860".to_string(),
        (J0_SQUARED - 5.783_186_0).abs() < 5e-8,
    ));
    assert!(report(
        "3",
        "j0^2 < lambda(P_N) < j0^2/cos^2(pi/N), N = 3..64; P256 near j0^2",
        &checks
    ));
}

fn certificate_checks(n: usize, c: &Certificates) -> Vec<(String, bool)> {
    vec![
        (
            format!("N={n} area match {:.1e}", c.area_match),
            c.area_match < Certificates::AREA_TOL,
        ),
        (
            format!("N={n} cut matching {:.1e}", c.cut_matching),
            c.cut_matching < Certificates::CUT_TOL,
        ),
        (format!("N={n} overlap {:.1e}", c.max_overlap), c.disjoint),
        (
            format!(
                "N={n} inside P_{} (margin {:.1e})",
                n + 1,
                c.containment_margin
            ),
            c.contained,
        ),
        (
            format!("N={n} D strictly smaller than P_{}", n + 1),
            c.area_deficit > 0.0,
        ),
        (format!("N={n} violations {:?}", c.violations), c.all_pass()),
    ]
}

#[test]
fn criterion_04_dissection() {
    let mut checks = Vec::new();
    for n in 3..=8 {
        let d = build_dissection(n, 1.0).unwrap();
        checks.extend(certificate_checks(n, &d.certificates));
        let s = eigen_sandwich(&d, default_d_levels(n), 6..=8, opts()).unwrap();
        checks.push((
            format!(
                "N={n} lambda(P_{}) {:.6} < lambda(D) {:.6}",
                n + 1,
                s.lambda_next.extrapolated,
                s.lambda_d.extrapolated
            ),
            s.lower_certified,
        ));
        checks.push((
            format!(
                "N={n} lambda(D) < lambda(P_{n}) {:.6}",
                s.lambda_n.extrapolated
            ),
            s.upper_certified,
        ));
        let bad = build_dissection_with_delta(n, 1.0, 1.01 * cut_angle(n)).unwrap();
        let broken =
            !bad.certificates.contained || bad.certificates.cut_matching >= Certificates::CUT_TOL;
        checks.push((format!("N={n} delta x 1.01 breaks a certificate"), broken));
    }
    assert!(report(
        "4",
        "dissection certificates and lambda(P_N+1) < lambda(D) < lambda(P_N), N = 3..8",
        &checks
    ));
}

/// The literal strict-margin reading: every vertex of D at positive distance
/// from the boundary of P_{N+1}. D keeps N vertices of P_N on the common
/// circumcircle, and the only points of P_{N+1} on that circle are its
/// vertices, so the margin cannot exceed zero.
#[test]
fn criterion_04_strict_containment_margin() {
    let mut checks = Vec::new();
    for n in 3..=8 {
        let d = build_dissection(n, 1.0).unwrap();
        let c = &d.certificates;
        checks.push((
            format!(
                "N={n} margin {:.1e} with {} contacts, next closest {:.3e}",
                c.containment_margin, c.contacts, c.non_contact_margin
            ),
            c.strictly_inside(1.0),
        ));
    }
    assert!(report(
        "4m",
        "containment margin > 0 against P_N+1",
        &checks
    ));
}

#[test]
fn criterion_05_cos_ratio_bound() {
    let mut checks = Vec::new();
    for row in suite().rows.iter().filter(|r| r.n <= 32) {
        let t2 = row.t2.unwrap();
        checks.push((format!("N={} slack {:.3e}", row.n, t2.slack), t2.certified));
    }
    let rec = step_record(eig(3), eig(4)).unwrap();
    let exact = 16.0 * PI * PI / 9.0 * (PI / 3.0).cos() / (PI / 4.0).cos() - PI * PI;
    let slack = rec.cos_ratio_rhs - rec.cos_ratio_lhs;
    checks.push((
        format!("N=3 slack {slack:.6} vs {exact:.6}"),
        (slack - exact).abs() < 1e-3,
    ));
    checks.push((
        format!("closed-form slack {exact:.4} = 2.5373"),
        (exact - 2.5373).abs() < 1e-4,
    ));
    assert!(report(
        "5",
        "lambda(P_N+1) < lambda(P_N) cos(pi/N)/cos(pi/(N+1)), N = 3..32",
        &checks
    ));
}

#[test]
fn criterion_06_lr_lambda_bound() {
    let mut checks = Vec::new();
    for row in suite().rows.iter().filter(|r| r.n <= 32) {
        let t3 = row.t3.unwrap();
        checks.push((format!("N={} slack {:.3e}", row.n, t3.slack), t3.certified));
    }
    // l_4 rho_4 = 1 and lambda(P_4) = pi^2
    let rhs = PI * PI - 2.0 * PI * J0_SQUARED / 20.0;
    let rec = step_record(eig(4), eig(5)).unwrap();
    checks.push((
        format!("N=4 right side {rhs:.7} = 8.0527646"),
        (rhs - 8.052_764_6).abs() < 5e-6,
    ));
    checks.push((
        format!(
            "N=4 left side {:.7} +- {:.1e} below it",
            rec.lr_lambda_lhs, rec.lr_lambda_err
        ),
        rhs - rec.lr_lambda_lhs > 3.0 * rec.lr_lambda_err,
    ));
    assert!(report(
        "6",
        "l rho lambda decreases by 2 pi j0^2/(N(N+1)), N = 3..32",
        &checks
    ));
}

#[test]
fn criterion_07_shape_derivative() {
    let [l5, l6, l7] = derivatives();
    let mut checks = Vec::new();
    for i in 0..ALPHA_GRID.len() {
        let k = ALPHA_GRID[i];
        let (a, b, c) = (
            l5[i].relative_discrepancy,
            l6[i].relative_discrepancy,
            l7[i].relative_discrepancy,
        );
        checks.push((format!("pi/{k} level 6 discrepancy {b:.2e} < 5%"), b < 0.05));
        checks.push((format!("pi/{k} level 7 discrepancy {c:.2e} < 5%"), c < 0.05));
        checks.push((
            format!("pi/{k} decreasing {a:.2e} > {b:.2e} > {c:.2e}"),
            a > b && b > c,
        ));
    }
    assert!(report(
        "7",
        "boundary-integral d mu/d alpha vs finite differences",
        &checks
    ));
}

#[test]
fn criterion_08_derivative_lower_bound() {
    let l7 = &derivatives()[2];
    let mut checks = Vec::new();
    for (k, rep) in ALPHA_GRID.iter().zip(l7) {
        checks.push((
            format!(
                "pi/{k} fd {:.5} >= bound {:.5}",
                rep.dmu_fd, rep.lower_bound_stmt
            ),
            rep.lower_bound_ok,
        ));
    }
    let q = &l7[5];
    checks.push((
        format!("bound at pi/4 {:.7} = 2 j0^2", q.lower_bound_stmt),
        (q.lower_bound_stmt - 2.0 * J0_SQUARED).abs() < 1e-9
            && (q.lower_bound_stmt - 11.566_371_9).abs() < 1e-7,
    ));
    assert!(report(
        "8",
        "d mu/d alpha >= mu tan a - (mu - j0^2/cos^2 a)/tan a",
        &checks
    ));
}

#[test]
fn criterion_09_concavity() {
    let mut checks = Vec::new();
    for k in [6.0, 4.0, 3.0] {
        let rep = check_concavity_lemma(PI / k, 1.0, 6, 50, opts()).unwrap();
        let failing = rep.points.iter().filter(|p| !p.pass).count();
        checks.push((
            format!("pi/{k} {failing} of {} grid points fail", rep.points.len()),
            rep.points.len() == 50 && failing == 0,
        ));
        checks.push((
            format!(
                "pi/{k} dv/dy >= 0 at {} of {} barycenters",
                rep.gradient_failures.len(),
                rep.gradient_checked
            ),
            rep.gradient_checked > 0 && rep.gradient_failures.is_empty(),
        ));
    }
    assert!(report(
        "9",
        "trace average inequality and dv/dy < 0",
        &checks
    ));
}

#[test]
fn criterion_10_corollaries() {
    let mut checks = Vec::new();
    for row in &suite().rows {
        checks.push((
            format!("N={} area*lambda > pi j0^2", row.n),
            row.c1.certified,
        ));
        if row.n <= 31 {
            let c2 = row.c2.unwrap();
            checks.push((
                format!("N={} next-step bound slack {:.3e}", row.n, c2.slack),
                c2.certified,
            ));
        }
    }
    let (closed, terms) = telescoped_sum(4, 20);
    let exact = 2.0 * PI * J0_SQUARED / 5.0;
    checks.push((
        format!("telescoped sum {closed:.10} = {exact:.10}"),
        (closed - exact).abs() < 1e-9 && (terms - exact).abs() < 1e-9,
    ));
    checks.push((
        format!("{exact:.4} = 7.2674"),
        (exact - 7.2674).abs() < 1e-4,
    ));
    checks.push((
        format!("pi j0^2 = {FABER_KRAHN:.7}"),
        (FABER_KRAHN - PI * J0_SQUARED).abs() < 1e-12,
    ));
    assert!(report(
        "10",
        "Faber-Krahn for polygons and the next-step bound",
        &checks
    ));
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let csv = format!("t{threads}.csv");
        let status = Command::new(env!("CARGO_BIN_EXE_polyspec"))
            .args([
                "--threads",
                threads,
                "verify",
                "--n-min",
                "3",
                "--n-max",
                "12",
                "--csv",
                &csv,
            ])
            .current_dir(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(fs::read(dir.path().join(csv)).unwrap());
    }
    let checks = vec![(
        format!("{} bytes, identical", outputs[0].len()),
        !outputs[0].is_empty() && outputs[0] == outputs[1],
    )];
    assert!(report(
        "11",
        "verify CSV independent of thread count",
        &checks
    ));
}

#[test]
fn criterion_12_conjecture_observations() {
    let rep = suite();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_suite_report.md");
    fs::write(&path, write_markdown(rep)).unwrap();
    let rows: Vec<_> = rep.rows.iter().filter(|r| r.n <= 32).collect();
    let af1 = rows
        .iter()
        .filter(|r| r.af1.is_some_and(|c| c.certified))
        .count();
    let af2 = rows
        .iter()
        .filter(|r| r.af2.is_some_and(|c| c.certified))
        .count();
    let af2_raw = rows
        .iter()
        .filter(|r| r.af2.is_some_and(|c| c.slack > 0.0))
        .count();
    let line = format!(
        "\ncriterion  12: REPORT area*lambda decreasing certified for {af1}/{}; ratio decreasing \
         certified for {af2}/{}, by point values for {af2_raw}/{}; table in {}\n",
        rows.len(),
        rows.len(),
        rows.len(),
        path.display()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}
