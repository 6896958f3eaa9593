//! Small numeric helpers shared across the crate: angle wrapping and stable
//! log-domain accumulation.

use std::f64::consts::{PI, TAU};

/// Reduce an angle to `[0, 2pi)`.
#[inline]
pub fn wrap_2pi(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can return TAU when theta is a tiny negative number.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Reduce an angle to `(-pi, pi]`.
#[inline]
pub fn wrap_pi(theta: f64) -> f64 {
    let w = wrap_2pi(theta);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(sum(exp(xs)))` over a slice. Returns `-inf` for an empty slice or one
/// containing only `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - hi).exp()).sum();
    hi + sum.ln()
}

/// Maximum over a slice, the max-log stand-in for [`log_sum_exp`].
pub fn log_max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_ranges() {
        assert!((wrap_2pi(-0.1) - (TAU - 0.1)).abs() < 1e-12);
        assert_eq!(wrap_2pi(0.0), 0.0);
        assert!(wrap_2pi(TAU) < 1e-12);
        assert!((wrap_pi(3.5) - (3.5 - TAU)).abs() < 1e-12);
        assert!((wrap_pi(-3.5) - (TAU - 3.5)).abs() < 1e-12);
    }

    #[test]
    fn lse_matches_direct() {
        let xs = [0.3, -1.2, 2.0];
        let direct: f64 = xs.iter().map(|&x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(
            log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn lse_large_magnitudes() {
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((log_add_exp(-1000.0, -1000.0) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
