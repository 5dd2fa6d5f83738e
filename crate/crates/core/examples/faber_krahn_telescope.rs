//! Summing the l rho lambda gaps from N to K telescopes to 2 pi j0^2 (1/N - 1/K),
//! and letting K grow gives Area(P_N) lambda(P_N) > pi j0^2.
//!
//! cargo run --release --example faber_krahn_telescope

use polygon_spectra::femeig::SolverOptions;
use polygon_spectra::verify::{telescope_faber_krahn, FABER_KRAHN};

fn main() -> polygon_spectra::Result<()> {
    println!("pi j0^2 = {FABER_KRAHN:.10}");
    for (n, k) in [(3, 12), (4, 20), (6, 40), (10, 80)] {
        let t = telescope_faber_krahn(n, k, 5..=7, SolverOptions::default())?;
        println!(
            "N={n:<3} K={k:<3} lhs {:.6} >= {:.6} (terms {:.6}): {}   Area*lambda - pi j0^2 = {:.6}",
            t.lhs,
            t.partial_sum_bound,
            t.term_sum,
            t.telescope_certified,
            t.fk_gap
        );
    }
    Ok(())
}
