//! Eigenvalues of the equilateral triangle and the square against their
//! closed forms, solved directly on polygon meshes.
//!
//! cargo run --release --example closed_forms

use std::f64::consts::PI;

use polygon_spectra::femeig::{solve_polygon, SolverOptions};
use polygon_spectra::geometry::RegularPolygonSpec;

fn main() -> polygon_spectra::Result<()> {
    let cases = [(3, 16.0 * PI * PI / 9.0), (4, PI * PI)];
    for (n, exact) in cases {
        let sol = solve_polygon(
            &RegularPolygonSpec::new(n, 1.0),
            3..=7,
            SolverOptions::default(),
        )?;
        println!("P{n}, r = 1");
        println!("  level  h_max      lambda_h");
        for l in &sol.series.levels {
            println!("  {:>5}  {:.6}  {:.10}", l.level, l.h_max, l.eigenvalue);
        }
        let s = &sol.series;
        println!(
            "  extrapolated {:.10} (estimate {:.1e}), exact {:.10}, relative error {:.1e}",
            s.extrapolated,
            s.error_estimate,
            exact,
            (s.extrapolated - exact).abs() / exact
        );
        if let Some(p) = s.observed_order() {
            println!("  observed order {p:.3}");
        }
    }
    Ok(())
}
