//! Along vertical segments of T(alpha, 1), the square of the mixed
//! eigenfunction at the hypotenuse is below its average over the segment.
//!
//! cargo run --release --example concavity

use std::f64::consts::PI;

use polygon_spectra::deriv::check_concavity_lemma;
use polygon_spectra::femeig::SolverOptions;

fn main() -> polygon_spectra::Result<()> {
    for k in [6.0, 4.0, 3.0] {
        let rep = check_concavity_lemma(PI / k, 1.0, 6, 50, SolverOptions::default())?;
        let worst = rep
            .points
            .iter()
            .map(|p| p.average - p.hypotenuse)
            .fold(f64::INFINITY, f64::min);
        println!(
            "alpha = pi/{k}: {} points, min(average - hypotenuse) = {worst:.3e}, \
             dv/dy < 0 at {}/{} barycenters, pass = {}",
            rep.points.len(),
            rep.gradient_checked - rep.gradient_failures.len(),
            rep.gradient_checked,
            rep.pass
        );
    }
    Ok(())
}
