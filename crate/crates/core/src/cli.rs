//! The `polyspec` command line: argument parsing, output routing and run
//! manifests. The binary is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deriv::{shape_derivative, DerivativeReport};
use crate::dissect::{build_dissection, eigen_sandwich, DissectionResult, Sandwich};
use crate::dump::{write_mesh, write_polygons, PolygonBlock};
use crate::error::{Error, Result};
use crate::femeig::{solve_polygon, solve_triangle, Solution, SolverOptions};
use crate::geometry::{make_regular_polygon, RegularPolygonSpec, TriangleSpec};
use crate::mesh::mesh_star_polygon;
use crate::triangle::verify_reduction;
use crate::verify::{run_suite, write_csv, write_markdown, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "polyspec",
    version,
    about = "Dirichlet eigenvalues of regular polygons and the inequalities between them"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Where to write the run manifest (default: next to the first output).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Circumradius (polygons) or hypotenuse (triangles).
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Mesh levels as `a:b`, or `L` for 3:L.
    #[arg(long, default_value = "3:6", value_parser = parse_levels)]
    pub levels: RangeInclusive<u32>,
    /// Solver tolerance on the relative residual.
    #[arg(long, default_value_t = crate::femeig::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Polygon,
    Triangle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalue of P_N^r (Dirichlet) or T(alpha, r) (mixed) with its convergence series.
    Eig {
        #[arg(long, value_enum)]
        shape: Shape,
        /// Side count (polygon; for a triangle, alpha defaults to pi/N).
        #[arg(long)]
        n: Option<usize>,
        /// Triangle angle, e.g. `0.3` or `pi/7`.
        #[arg(long, value_parser = parse_angle)]
        alpha: Option<f64>,
        #[command(flatten)]
        solve: SolveArgs,
        /// Write the finest mesh here.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
    },
    /// Compare lambda(P_N^r) with mu(T(pi/N, r)).
    Reduce {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Build and certify the dissection of P_N^r into a polygon inside P_{N+1}^r.
    Dissect {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Mesh levels for D (default: 4:5 up to N = 6, 5:6 above).
        #[arg(long, value_parser = parse_levels)]
        levels: Option<RangeInclusive<u32>>,
        /// Mesh levels for the reduced triangles of P_N and P_{N+1}.
        #[arg(long, default_value = "6:8", value_parser = parse_levels)]
        triangle_levels: RangeInclusive<u32>,
        #[arg(long, default_value_t = crate::femeig::DEFAULT_TOL)]
        tol: f64,
        /// Skip the eigenvalue comparison.
        #[arg(long)]
        no_eigen: bool,
        /// Write every piece (before and after its rotation), D and P_{N+1}.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the mesh of D.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
    },
    /// Shape derivative of mu(T(alpha, r)) against finite differences.
    Derivative {
        /// `a:b:step` or a comma-separated list; entries like `pi/16` allowed.
        #[arg(long, value_parser = parse_alpha_grid)]
        alpha_grid: AlphaGrid,
        #[command(flatten)]
        solve: SolveArgs,
        /// Trace samples along the hypotenuse.
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// The inequality suite for N in [n-min, n-max] at r = 1.
    Verify {
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value = "3:6", value_parser = parse_levels)]
        levels: RangeInclusive<u32>,
        #[arg(long, default_value_t = crate::femeig::DEFAULT_TOL)]
        tol: f64,
        /// Cross-validate against polygon solves up to this N.
        #[arg(long, default_value_t = 8)]
        cross_up_to: usize,
        /// Mesh levels for the cross-validation polygon solves.
        #[arg(long, default_value = "3:6", value_parser = parse_levels)]
        cross_levels: RangeInclusive<u32>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Markdown report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest_file: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaGrid(pub Vec<f64>);

/// `a:b` or a single `L` meaning `3:L` (or `L:L` below 3).
pub fn parse_levels(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let bad = || format!("invalid levels {s:?}: expected `a:b` or `L`");
    let range = match s.split_once(':') {
        Some((a, b)) => {
            a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?
        }
        None => {
            let l: u32 = s.trim().parse().map_err(|_| bad())?;
            l.min(3)..=l
        }
    };
    if range.is_empty() {
        return Err(format!("invalid levels {s:?}: empty range"));
    }
    Ok(range)
}

/// A number, or a multiple of pi such as `pi`, `3pi/8`, `2*pi/3`, `-pi/4`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("invalid angle {s:?}");
    let num = |x: &str| -> std::result::Result<f64, String> {
        match x.split_once('/') {
            Some((a, b)) => Ok(a.trim().parse::<f64>().map_err(|_| bad())?
                / b.trim().parse::<f64>().map_err(|_| bad())?),
            None => x.trim().parse::<f64>().map_err(|_| bad()),
        }
    };
    let value = match t.split_once("pi") {
        Some((coef, rest)) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => num(c)?,
            };
            let rest = rest.trim();
            let d = match rest.strip_prefix('/') {
                Some(den) => num(den)?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            c * std::f64::consts::PI / d
        }
        None => num(&t)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

pub fn parse_alpha_grid(s: &str) -> std::result::Result<AlphaGrid, String> {
    if s.contains(',') {
        return s
            .split(',')
            .map(parse_angle)
            .collect::<std::result::Result<_, _>>()
            .map(AlphaGrid);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(AlphaGrid(vec![parse_angle(single)?])),
        [a, b, step] => {
            let (a, b, step) = (parse_angle(a)?, parse_angle(b)?, parse_angle(step)?);
            if !(step > 0.0) || b < a {
                return Err(format!("invalid grid {s:?}: need a <= b and step > 0"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                return Err(format!("grid {s:?} has too many points"));
            }
            Ok(AlphaGrid((0..count).map(|k| a + k as f64 * step).collect()))
        }
        _ => Err(format!("invalid grid {s:?}: expected a:b:step or a list")),
    }
}

/// Resolved configuration of one run, echoed in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub shape: Option<Shape>,
    pub n: Option<usize>,
    pub n_range: Option<(usize, usize)>,
    pub r: f64,
    pub alpha: Option<f64>,
    pub alpha_grid: Option<Vec<f64>>,
    pub levels: Option<(u32, u32)>,
    pub triangle_levels: Option<(u32, u32)>,
    pub tol: f64,
    pub samples: Option<usize>,
    pub outputs: Vec<PathBuf>,
    pub threads: usize,
}

impl RunConfig {
    fn new(subcommand: &str, threads: usize) -> Self {
        RunConfig {
            subcommand: subcommand.to_string(),
            shape: None,
            n: None,
            n_range: None,
            r: 1.0,
            alpha: None,
            alpha_grid: None,
            levels: None,
            triangle_levels: None,
            tol: crate::femeig::DEFAULT_TOL,
            samples: None,
            outputs: Vec::new(),
            threads,
        }
    }
}

fn pair(r: &RangeInclusive<u32>) -> Option<(u32, u32)> {
    Some((*r.start(), *r.end()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub argv: Vec<String>,
    pub config: RunConfig,
    pub exit_code: i32,
    pub wall_time_seconds: f64,
}

/// Arguments to re-run the command recorded in `path`.
pub fn replay_argv(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let m: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    Ok(m.argv)
}

fn manifest_path(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    if let Some(p) = &cli.manifest {
        return p.clone();
    }
    match cfg.outputs.first() {
        Some(first) => {
            let mut name = first.file_name().map(OsString::from).unwrap_or_default();
            name.push(".manifest.json");
            first.with_file_name(name)
        }
        None => PathBuf::from(format!("polyspec-{}.manifest.json", cfg.subcommand)),
    }
}

enum Outcome {
    Pass,
    Fail,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    if let Command::Replay { manifest_file } = &cli.command {
        return match replay_argv(manifest_file) {
            Ok(argv) => run(argv, out, err),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        };
    }
    let argv: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        let _ = writeln!(err, "error: --threads must be positive");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    let mut cfg = RunConfig::new(subcommand_name(&cli.command), threads);
    let mut text = String::new();
    let result = pool.install(|| execute(&cli.command, &mut cfg, &mut text));
    let _ = out.write_all(text.as_bytes());
    let code = match result {
        Ok(Outcome::Pass) => EXIT_OK,
        Ok(Outcome::Fail) => EXIT_CERTIFICATION,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    };
    let manifest = Manifest {
        tool: "polyspec".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        argv,
        exit_code: code,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        config: cfg,
    };
    let path = manifest_path(&cli, &manifest.config);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Err(e) = write_file(&path, &(json + "\n")) {
        let _ = writeln!(err, "error: cannot write manifest: {e}");
        return if code == EXIT_OK { EXIT_USAGE } else { code };
    }
    code
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Eig { .. } => "eig",
        Command::Reduce { .. } => "reduce",
        Command::Dissect { .. } => "dissect",
        Command::Derivative { .. } => "derivative",
        Command::Verify { .. } => "verify",
        Command::Replay { .. } => "replay",
    }
}

fn print_solution(out: &mut String, sol: &Solution) {
    let _ = writeln!(
        out,
        "level  h_max         eigenvalue          iterations  residual"
    );
    for l in &sol.series.levels {
        let _ = writeln!(
            out,
            "{:>5}  {:.6e}  {:.15}  {:>10}  {:.2e}",
            l.level, l.h_max, l.eigenvalue, l.iterations, l.residual
        );
    }
    let s = &sol.series;
    let _ = writeln!(out, "extrapolated    {:.12}", s.extrapolated);
    let _ = writeln!(out, "error_estimate  {:.3e}", s.error_estimate);
    if let Some(p) = s.observed_order() {
        let _ = writeln!(out, "observed_order  {p:.3}");
    }
    if !sol.eigen.sign_consistent {
        let _ = writeln!(
            out,
            "note: finest eigenvector changes sign on interior nodes"
        );
    }
}

fn execute(cmd: &Command, cfg: &mut RunConfig, out: &mut String) -> Result<Outcome> {
    match cmd {
        Command::Eig {
            shape,
            n,
            alpha,
            solve,
            mesh_out,
        } => {
            let opts = SolverOptions::with_tol(solve.tol);
            cfg.shape = Some(*shape);
            cfg.n = *n;
            cfg.r = solve.r;
            cfg.levels = pair(&solve.levels);
            cfg.tol = solve.tol;
            cfg.outputs.extend(mesh_out.clone());
            let sol = match shape {
                Shape::Polygon => {
                    let n = n.ok_or_else(|| {
                        Error::InvalidArgument("--n is required for a polygon".into())
                    })?;
                    let _ = writeln!(out, "shape polygon N={n} r={}", solve.r);
                    solve_polygon(
                        &RegularPolygonSpec::new(n, solve.r),
                        solve.levels.clone(),
                        opts,
                    )?
                }
                Shape::Triangle => {
                    let a = match (alpha, n) {
                        (Some(a), _) => *a,
                        (None, Some(n)) => std::f64::consts::PI / *n as f64,
                        (None, None) => {
                            return Err(Error::InvalidArgument(
                                "--alpha or --n is required for a triangle".into(),
                            ))
                        }
                    };
                    cfg.alpha = Some(a);
                    let _ = writeln!(out, "shape triangle alpha={a} r={}", solve.r);
                    solve_triangle(&TriangleSpec::new(a, solve.r), solve.levels.clone(), opts)?
                }
            };
            print_solution(out, &sol);
            if let Some(p) = mesh_out {
                write_file(p, &write_mesh(&sol.field.mesh))?;
            }
            Ok(Outcome::Pass)
        }
        Command::Reduce { n, solve } => {
            cfg.n = Some(*n);
            cfg.r = solve.r;
            cfg.levels = pair(&solve.levels);
            cfg.tol = solve.tol;
            let rep = verify_reduction(
                *n,
                solve.r,
                solve.levels.clone(),
                SolverOptions::with_tol(solve.tol),
            )?;
            let _ = writeln!(out, "N               {}", rep.n);
            let _ = writeln!(out, "r               {}", rep.r);
            let _ = writeln!(
                out,
                "lambda_polygon  {:.12} +- {:.3e}",
                rep.lambda_polygon.extrapolated, rep.lambda_polygon.error_estimate
            );
            let _ = writeln!(
                out,
                "mu_triangle     {:.12} +- {:.3e}",
                rep.mu_triangle.extrapolated, rep.mu_triangle.error_estimate
            );
            let _ = writeln!(out, "relative_gap    {:.3e}", rep.relative_gap);
            let _ = writeln!(out, "certified       {}", rep.certified);
            Ok(if rep.certified {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Dissect {
            n,
            r,
            levels,
            triangle_levels,
            tol,
            no_eigen,
            out: pieces_out,
            mesh_out,
        } => {
            let d_levels = levels
                .clone()
                .unwrap_or_else(|| crate::dissect::default_d_levels(*n));
            cfg.n = Some(*n);
            cfg.r = *r;
            cfg.tol = *tol;
            if !no_eigen {
                cfg.levels = pair(&d_levels);
                cfg.triangle_levels = pair(triangle_levels);
            }
            cfg.outputs.extend(pieces_out.clone());
            cfg.outputs.extend(mesh_out.clone());
            let d = build_dissection(*n, *r)?;
            print_certificates(out, &d);
            let mut pass = d.certificates.all_pass();
            let mut d_mesh = None;
            if !no_eigen {
                let opts = SolverOptions::with_tol(*tol);
                let s = eigen_sandwich(&d, d_levels.clone(), triangle_levels.clone(), opts)?;
                print_sandwich(out, &s);
                pass &= s.certified;
                if mesh_out.is_some() {
                    d_mesh = Some(mesh_star_polygon(
                        &d.assembled,
                        crate::geometry::Point::ORIGIN,
                        *d_levels.end(),
                    )?);
                }
            }
            if let Some(p) = pieces_out {
                write_file(p, &write_polygons(&dissection_blocks(&d)?))?;
            }
            if let Some(p) = mesh_out {
                let m = match d_mesh {
                    Some(m) => m,
                    None => mesh_star_polygon(&d.assembled, crate::geometry::Point::ORIGIN, 0)?,
                };
                write_file(p, &write_mesh(&m))?;
            }
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Derivative {
            alpha_grid,
            solve,
            samples,
            csv,
        } => {
            cfg.alpha_grid = Some(alpha_grid.0.clone());
            cfg.r = solve.r;
            cfg.levels = pair(&solve.levels);
            cfg.tol = solve.tol;
            cfg.samples = Some(*samples);
            cfg.outputs.extend(csv.clone());
            let opts = SolverOptions::with_tol(solve.tol);
            let reports = alpha_grid
                .0
                .par_iter()
                .map(|&a| shape_derivative(a, solve.r, solve.levels.clone(), *samples, opts))
                .collect::<Result<Vec<_>>>()?;
            let table = derivative_csv(&reports);
            match csv {
                Some(p) => write_file(p, &table)?,
                None => out.push_str(&table),
            }
            let mut pass = true;
            for rep in &reports {
                let mut notes = Vec::new();
                if !(rep.dmu_formula > 0.0 && rep.dmu_fd > 0.0) {
                    notes.push("derivative not positive");
                }
                if !rep.lower_bound_ok {
                    notes.push("lower bound violated");
                }
                if rep.finest_level >= 6 && !(rep.relative_discrepancy < 0.05) {
                    notes.push("formula and finite differences disagree by more than 5%");
                }
                if rep.fit_warning {
                    let _ = writeln!(
                        out,
                        "warning: alpha={}: trace fit residual {:.2e}",
                        rep.alpha, rep.trace_fit_residual
                    );
                }
                if !notes.is_empty() {
                    pass = false;
                    let _ = writeln!(out, "FAIL alpha={}: {}", rep.alpha, notes.join("; "));
                }
            }
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Verify {
            n_min,
            n_max,
            levels,
            tol,
            cross_up_to,
            cross_levels,
            csv,
            report,
        } => {
            cfg.n_range = Some((*n_min, *n_max));
            cfg.levels = pair(levels);
            cfg.tol = *tol;
            cfg.outputs.extend(csv.clone());
            cfg.outputs.extend(report.clone());
            let mut sc = SuiteConfig::new(*n_min, *n_max, levels.clone());
            sc.opts = SolverOptions::with_tol(*tol);
            sc.cross_validate_up_to = *cross_up_to;
            sc.cross_levels = cross_levels.clone();
            let rep = run_suite(&sc)?;
            let table = write_csv(&rep);
            match csv {
                Some(p) => write_file(p, &table)?,
                None => out.push_str(&table),
            }
            if let Some(p) = report {
                write_file(p, &write_markdown(&rep))?;
            }
            for f in &rep.failures {
                let _ = writeln!(out, "FAIL {f}");
            }
            Ok(if rep.all_certified {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Replay { .. } => unreachable!("handled before dispatch"),
    }
}

pub const DERIVATIVE_CSV_HEADER: &str = "alpha,mu,dmu_formula,dmu_fd,lower_bound_stmt,discrepancy";

pub fn derivative_csv(reports: &[DerivativeReport]) -> String {
    let mut s = String::from(DERIVATIVE_CSV_HEADER);
    s.push('\n');
    for r in reports {
        let _ = writeln!(
            s,
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            r.alpha, r.mu, r.dmu_formula, r.dmu_fd, r.lower_bound_stmt, r.relative_discrepancy
        );
    }
    s
}

fn print_certificates(out: &mut String, d: &DissectionResult) {
    let c = &d.certificates;
    let _ = writeln!(out, "N                   {}", d.n);
    let _ = writeln!(out, "r                   {}", d.r);
    let _ = writeln!(out, "delta               {:.15}", d.delta);
    let _ = writeln!(out, "D vertices          {}", d.assembled.len());
    let _ = writeln!(out, "area_match          {:.3e}", c.area_match);
    let _ = writeln!(out, "containment_margin  {:.3e}", c.containment_margin);
    let _ = writeln!(out, "contained           {}", c.contained);
    let _ = writeln!(out, "contacts            {}", c.contacts);
    let _ = writeln!(out, "non_contact_margin  {:.6e}", c.non_contact_margin);
    let _ = writeln!(out, "area_deficit        {:.6e}", c.area_deficit);
    let _ = writeln!(out, "disjoint            {}", c.disjoint);
    let _ = writeln!(out, "cut_matching        {:.3e}", c.cut_matching);
    let _ = writeln!(out, "triangle_order      {:?}", d.triangle_order);
    if d.ordering_fallback {
        let _ = writeln!(out, "note: the first triangle ordering failed cut matching");
    }
    for v in &c.violations {
        let _ = writeln!(out, "FAIL {v}");
    }
}

fn print_sandwich(out: &mut String, s: &Sandwich) {
    let line = |name: &str, x: &crate::femeig::ConvergenceSeries| {
        format!(
            "{name:<19} {:.10} +- {:.3e}\n",
            x.extrapolated, x.error_estimate
        )
    };
    out.push_str(&line("lambda(P_{N+1})", &s.lambda_next));
    out.push_str(&line("lambda(D)", &s.lambda_d));
    out.push_str(&line("lambda(P_N)", &s.lambda_n));
    let _ = writeln!(out, "lower certified     {}", s.lower_certified);
    let _ = writeln!(out, "upper certified     {}", s.upper_certified);
}

fn dissection_blocks(d: &DissectionResult) -> Result<Vec<PolygonBlock>> {
    let mut blocks = Vec::new();
    for p in d.pieces() {
        let (kind, tag) = match p.kind {
            crate::dissect::PieceKind::Triangle => ("triangle", "T"),
            crate::dissect::PieceKind::Quadrilateral => ("quadrilateral", "Q"),
        };
        for (stage, poly) in [("before", &p.original), ("after", &p.moved)] {
            blocks.push(
                PolygonBlock::new(format!("{tag}{}_{stage}", p.index), poly.clone())
                    .with("kind", kind)
                    .with("N", d.n)
                    .with("r", d.r)
                    .with("rotation", p.rotation),
            );
        }
    }
    blocks.push(
        PolygonBlock::new("D", d.assembled.clone())
            .with("N", d.n)
            .with("r", d.r)
            .with("delta", d.delta),
    );
    blocks.push(
        PolygonBlock::new(format!("P{}", d.n + 1), make_regular_polygon(&d.outer)?)
            .with("N", d.n + 1)
            .with("r", d.r)
            .with("phase", d.outer.phase),
    );
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn levels_syntax() {
        assert_eq!(parse_levels("3:7").unwrap(), 3..=7);
        assert_eq!(parse_levels("6").unwrap(), 3..=6);
        assert_eq!(parse_levels("2").unwrap(), 2..=2);
        assert!(parse_levels("7:3").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert!((parse_angle("pi/16").unwrap() - PI / 16.0).abs() < 1e-16);
        assert!((parse_angle("3pi/8").unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((parse_angle("2*pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("1/4").unwrap(), 0.25);
        assert!(parse_angle("pix").is_err());
        assert!(parse_angle("1/0").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_alpha_grid("pi/16:pi/4:pi/16").unwrap().0;
        assert_eq!(g.len(), 4);
        assert!((g[3] - PI / 4.0).abs() < 1e-15);
        assert_eq!(parse_alpha_grid("pi/6,pi/4").unwrap().0.len(), 2);
        assert!(parse_alpha_grid("1:0:0.1").is_err());
        assert!(parse_alpha_grid("0:1").is_err());
    }
}
