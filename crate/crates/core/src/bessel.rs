//! The first zero of the Bessel function J0, the disk's eigenvalue constant.

/// First positive zero of J0.
pub const J0_FIRST_ZERO: f64 = 2.404825557695773;

/// j0^2, the first Dirichlet eigenvalue of the unit disk.
pub const J0_SQUARED: f64 = J0_FIRST_ZERO * J0_FIRST_ZERO;

/// J0 by its power series, sum (-1)^k (x/2)^{2k} / (k!)^2. Accurate to
/// round-off for |x| below about 10.
pub fn bessel_j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Bisection for the sign change of J0 in [2, 3].
pub fn j0_first_zero_by_bisection() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    debug_assert!(bessel_j0_series(lo) > 0.0 && bessel_j0_series(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if bessel_j0_series(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matches_bisection() {
        assert!((j0_first_zero_by_bisection() - J0_FIRST_ZERO).abs() < 1e-15 * 4.0);
        assert!((J0_SQUARED - 5.783185962946784).abs() < 1e-14);
    }

    #[test]
    fn series_values() {
        assert_eq!(bessel_j0_series(0.0), 1.0);
        // J0(1) = 0.7651976865579666
        assert!((bessel_j0_series(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
    }
}
