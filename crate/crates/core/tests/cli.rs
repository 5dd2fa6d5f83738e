//! The `polyspec` binary: exit codes, outputs and manifests.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use polygon_spectra::cli::{replay_argv, Manifest, EXIT_CERTIFICATION, EXIT_OK, EXIT_USAGE};
use polygon_spectra::dump::read_polygons;
use polygon_spectra::verify::CSV_HEADER;

fn polyspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyspec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(path: &Path) -> Manifest {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eig_square() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &["eig", "--shape", "polygon", "--n", "4", "--levels", "3:7"],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("extrapolated"))
        .unwrap();
    let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((v - 9.869_604_4).abs() < 1e-6, "{v}");
    let m = manifest(&dir.path().join("polyspec-eig.manifest.json"));
    assert_eq!(m.exit_code, 0);
    assert_eq!(m.config.n, Some(4));
    assert_eq!(m.config.levels, Some((3, 7)));
    assert_eq!(m.config.r, 1.0);
}

#[test]
fn eig_triangle_with_pi_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &[
            "eig", "--shape", "triangle", "--alpha", "pi/3", "--levels", "4:7",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).contains("extrapolated    17.5459"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(dir.path(), &["transmogrify"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = polyspec(dir.path(), &["eig", "--shape", "polygon", "--n", "2"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    let o = polyspec(dir.path(), &["verify", "--n-min", "5", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    let o = polyspec(
        dir.path(),
        &["eig", "--shape", "polygon", "--n", "4", "--levels", "5:3"],
    );
    assert_eq!(o.status.code(), Some(EXIT_USAGE));
    let o = polyspec(dir.path(), &["--version"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
}

#[test]
fn failed_certification_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &[
            "verify", "--n-min", "20", "--n-max", "22", "--levels", "1:2",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_CERTIFICATION));
    assert!(stdout(&o).contains("FAIL"));
    let m = manifest(&dir.path().join("polyspec-verify.manifest.json"));
    assert_eq!(m.exit_code, EXIT_CERTIFICATION);
}

#[test]
fn reduce_pentagon() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(dir.path(), &["reduce", "--n", "5"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).contains("certified       true"));
}

#[test]
fn dissect_square_writes_pieces() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &[
            "dissect",
            "--n",
            "4",
            "--out",
            "pieces.txt",
            "--mesh-out",
            "d.mesh",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stdout(&o));
    let blocks =
        read_polygons(&fs::read_to_string(dir.path().join("pieces.txt")).unwrap()).unwrap();
    // 8 pieces before and after, D and the pentagon
    assert_eq!(blocks.len(), 18);
    let d = blocks.iter().find(|b| b.name == "D").unwrap();
    assert_eq!(d.polygon.len(), 12);
    assert!((d.polygon.area() - 2.0).abs() < 1e-12);
    assert!(dir.path().join("d.mesh").exists());
    let m = manifest(&dir.path().join("pieces.txt.manifest.json"));
    assert_eq!(m.config.subcommand, "dissect");
}

#[test]
fn derivative_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &[
            "derivative",
            "--alpha-grid",
            "pi/6,pi/4",
            "--levels",
            "4:6",
            "--csv",
            "d.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(
        rows[0],
        "alpha,mu,dmu_formula,dmu_fd,lower_bound_stmt,discrepancy"
    );
    assert_eq!(rows.len(), 3);
    let last: Vec<f64> = rows[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[4] - 11.566_371_9).abs() < 1e-6);
}

#[test]
fn verify_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &[
            "verify", "--n-min", "3", "--n-max", "12", "--csv", "s.csv", "--report", "s.md",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 11);
    for row in &lines[1..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[6..11], ["1", "1", "1", "1", "1"], "{row}");
    }
    let md = fs::read_to_string(dir.path().join("s.md")).unwrap();
    assert!(md.contains("conjecture check (numerical only)"));
}

#[test]
fn manifest_replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspec(
        dir.path(),
        &[
            "verify", "--n-min", "3", "--n-max", "6", "--levels", "3:5", "--csv", "a.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let first = fs::read(dir.path().join("a.csv")).unwrap();
    let mpath = dir.path().join("a.csv.manifest.json");
    let argv = replay_argv(&mpath).unwrap();
    assert_eq!(
        argv[1..],
        ["verify", "--n-min", "3", "--n-max", "6", "--levels", "3:5", "--csv", "a.csv"]
    );
    fs::remove_file(dir.path().join("a.csv")).unwrap();
    let o = polyspec(dir.path(), &["replay", "a.csv.manifest.json"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), first);
}
