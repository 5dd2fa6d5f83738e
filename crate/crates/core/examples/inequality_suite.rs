//! Runs the inequality suite for N = 3..16 and prints the CSV and Markdown
//! report.
//!
//! cargo run --release --example inequality_suite

use polygon_spectra::verify::{run_suite, write_csv, write_markdown, SuiteConfig};

fn main() -> polygon_spectra::Result<()> {
    let report = run_suite(&SuiteConfig::new(3, 16, 4..=7))?;
    print!("{}", write_csv(&report));
    println!();
    print!("{}", write_markdown(&report));
    for f in &report.failures {
        eprintln!("FAIL {f}");
    }
    Ok(())
}
