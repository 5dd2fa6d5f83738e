//! Cuts P_N into 2N pieces and reassembles them inside P_{N+1} with the
//! same circumradius, then checks the eigenvalue sandwich
//! lambda(P_{N+1}) < lambda(D) < lambda(P_N).
//!
//! cargo run --release --example dissection -- 5

use polygon_spectra::dissect::{build_dissection, default_d_levels, eigen_sandwich};
use polygon_spectra::femeig::SolverOptions;

fn main() -> polygon_spectra::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("N must be an integer"))
        .unwrap_or(4);
    let d = build_dissection(n, 1.0)?;
    let c = &d.certificates;
    println!("P{n} -> P{}: delta = {:.6}", n + 1, d.delta);
    println!("  pieces            {}", d.pieces().count());
    println!("  area match        {:.2e}", c.area_match);
    println!(
        "  containment       {:.2e} ({} contacts)",
        c.containment_margin, c.contacts
    );
    println!("  non-contact gap   {:.3e}", c.non_contact_margin);
    println!("  max overlap       {:.2e}", c.max_overlap);
    println!("  cut matching      {:.2e}", c.cut_matching);
    println!("  all pass          {}", c.all_pass());
    for v in &c.violations {
        println!("  violation: {v}");
    }

    let s = eigen_sandwich(&d, default_d_levels(n), 6..=8, SolverOptions::default())?;
    let show = |name: &str, v: &polygon_spectra::femeig::ConvergenceSeries| {
        println!(
            "  {name:<10} {:.7} +- {:.1e}",
            v.extrapolated, v.error_estimate
        )
    };
    println!("eigenvalues:");
    show(&format!("P{}", n + 1), &s.lambda_next);
    show("D", &s.lambda_d);
    show(&format!("P{n}"), &s.lambda_n);
    println!("  sandwich certified: {}", s.certified);
    Ok(())
}
