//! d mu / d alpha for the mixed triangle problem, from the boundary integral
//! over the hypotenuse and from central differences, with the lower bound
//! mu tan(alpha) - (mu - j0^2/cos^2(alpha)) / tan(alpha).
//!
//! cargo run --release --example shape_derivative

use std::f64::consts::PI;

use polygon_spectra::deriv::shape_derivative;
use polygon_spectra::femeig::SolverOptions;

fn main() -> polygon_spectra::Result<()> {
    println!("alpha     mu          formula     fd          discrepancy  bound       product");
    for k in [16.0, 12.0, 8.0, 6.0, 5.0, 4.0, 3.0] {
        let alpha = PI / k;
        let r = shape_derivative(alpha, 1.0, 3..=6, 256, SolverOptions::default())?;
        println!(
            "pi/{k:<4}  {:.6}  {:.6}  {:.6}  {:.2e}     {:.6}  {:.4} {}",
            r.mu,
            r.dmu_formula,
            r.dmu_fd,
            r.relative_discrepancy,
            r.lower_bound_stmt,
            r.product_derivative,
            if r.lower_bound_ok && r.product_ok {
                "ok"
            } else {
                "FAIL"
            }
        );
    }
    Ok(())
}
