//! Exponential-integral kernel.
//!
//! Every ergodic-rate closed form is a signed sum of products `e^{c} Ei(-c)`
//! with `c > 0`. For large `c` the two factors overflow and underflow
//! respectively, so the product is evaluated directly as [`eiexp`].
//!
//! Two algorithms are used:
//! - `0 < x <= 1`: the convergent power series
//!   `Ei(-x) = γ + ln x + Σ_{k≥1} (-x)^k / (k·k!)`;
//! - `x > 1`: the continued fraction
//!   `e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- …)))`, evaluated with the modified
//!   Lentz algorithm.

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Euler–Mascheroni constant, 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

// Above 1 the alternating series loses digits to cancellation (about 1e-12
// relative by x = 5); the continued fraction still converges quickly.
const SERIES_LIMIT: f64 = 1.0;
const MAX_SERIES_TERMS: usize = 200;
const MAX_CF_ITERATIONS: usize = 10_000;

/// `Ei(-u)` by power series, `0 < u <= 1`.
fn ei_neg_series<T: Scalar>(u: T) -> T {
    let x = -u;
    let mut term = T::one();
    let mut sum = T::zero();
    for k in 1..=MAX_SERIES_TERMS {
        let kt = T::lit(k as f64);
        term = term * x / kt;
        let contribution = term / kt;
        sum = sum + contribution;
        if contribution.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    T::lit(EULER_GAMMA) + u.ln() + sum
}

/// `e^u E1(u) = -e^u Ei(-u)` by continued fraction, `u > 0` (fast for `u > 1`).
fn scaled_e1_cf<T: Scalar>(u: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let two = T::lit(2.0);
    let mut b = u + T::one();
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..=MAX_CF_ITERATIONS {
        let it = T::lit(i as f64);
        let an = -(it * it);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        h = h * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    h
}

/// `Ei(x) = ∫_{-∞}^{x} e^t/t dt` for finite `x < 0`.
///
/// The result is strictly negative but underflows to `-0.0` below roughly
/// `x = -745` in `f64`.
pub fn exp_integral_ei<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() || x >= T::zero() {
        return Err(domain(format!("Ei(x) requires finite x < 0, got {x}")));
    }
    let u = -x;
    if u <= T::lit(SERIES_LIMIT) {
        Ok(ei_neg_series(u))
    } else {
        Ok(-(-u).exp() * scaled_e1_cf(u))
    }
}

/// `e^x · Ei(-x)` for `x > 0`, without forming either factor separately.
///
/// Satisfies `-1/x < eiexp(x) < -1/(x+1)`.
pub fn eiexp<T: Scalar>(x: T) -> Result<T> {
    if x.is_nan() || x <= T::zero() || x.is_infinite() {
        return Err(domain(format!("eiexp(x) requires finite x > 0, got {x}")));
    }
    if x <= T::lit(SERIES_LIMIT) {
        Ok(x.exp() * ei_neg_series(x))
    } else {
        Ok(-scaled_e1_cf(x))
    }
}

/// `∫_0^∞ e^{-p x} ln(a + b x) dx = (1/p)[ln a − e^{ap/b} Ei(−ap/b)]`.
pub fn log_expectation_shifted_exp<T: Scalar>(p: T, a: T, b: T) -> Result<T> {
    for (name, v) in [("p", p), ("a", a), ("b", b)] {
        if !v.is_finite() || v <= T::zero() {
            return Err(domain(format!("{name} must be finite and positive, got {v}")));
        }
    }
    let ratio = a * p / b;
    // ratio overflows only when b is vanishingly small; the scaled term is then 0.
    let scaled = if ratio.is_infinite() { T::zero() } else { eiexp(ratio)? };
    Ok((a.ln() - scaled) / p)
}

/// `eiexp` for internal closed forms whose arguments are positive sums of rates.
#[inline]
pub(crate) fn ee<T: Scalar>(x: T) -> T {
    eiexp(x).unwrap_or_else(|_| T::nan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ei_at_minus_one() {
        assert_relative_eq!(
            exp_integral_ei(-1.0f64).unwrap(),
            -0.219_383_934_395_520_27,
            max_relative = 1e-14
        );
    }

    #[test]
    fn ei_deep_tail_is_bounded() {
        let v = exp_integral_ei(-50.0f64).unwrap();
        assert!(v < 0.0 && v > -(-50.0f64).exp() / 50.0);
        assert!(v.abs() < 3.86e-24);
        assert_relative_eq!(v, -3.783_264_029_550_459e-24, max_relative = 1e-13);
    }

    #[test]
    fn ei_near_zero_diverges() {
        let v = exp_integral_ei(-1e-15f64).unwrap();
        assert!(v < -30.0);
        assert_relative_eq!(v, -33.961_560_730_009_15, max_relative = 1e-14);
    }

    #[test]
    fn ei_domain_errors() {
        assert!(exp_integral_ei(0.0f64).is_err());
        assert!(exp_integral_ei(1.0f64).is_err());
        assert!(exp_integral_ei(f64::NAN).is_err());
        assert!(exp_integral_ei(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn eiexp_reference_values() {
        assert_relative_eq!(eiexp(1.0f64).unwrap(), -0.596_347_362_323_194_07, max_relative = 1e-14);
        assert_relative_eq!(eiexp(2.0f64).unwrap(), -0.361_328_616_888_222_58, max_relative = 1e-14);
        assert!((eiexp(1e6f64).unwrap() + 9.99999e-7).abs() < 1e-12);
        let v = eiexp(700.0f64).unwrap();
        assert!(v.is_finite());
        assert_relative_eq!(v, -1.426_536_418_300_886_7e-3, max_relative = 1e-13);
    }

    #[test]
    fn eiexp_survives_extreme_arguments() {
        for x in [1e-300, 1e-8, 1e100, 1e300, f64::MAX] {
            let v = eiexp(x).unwrap();
            assert!(v.is_finite() && v < 0.0, "x={x} -> {v}");
        }
        assert!(eiexp(0.0f64).is_err());
        assert!(eiexp(-1.0f64).is_err());
    }

    #[test]
    fn regimes_agree_at_switch_point() {
        for x in [SERIES_LIMIT, 1.5, 2.0] {
            let series = x.exp() * ei_neg_series(x);
            let cf = -scaled_e1_cf(x);
            assert_relative_eq!(series, cf, max_relative = 1e-14);
        }
    }

    #[test]
    fn log_expectation_examples() {
        assert_relative_eq!(
            log_expectation_shifted_exp(1.0, 1.0, 1.0).unwrap(),
            0.596_347_362_323_194_07,
            max_relative = 1e-14
        );
        // value frozen from adaptive quadrature of the defining integral
        assert_relative_eq!(
            log_expectation_shifted_exp(2.0, 3.0, 5.0).unwrap(),
            0.812_273_410_281_447_1,
            max_relative = 1e-12
        );
        for p in [0.1f64, 1.0, 7.0] {
            assert!(log_expectation_shifted_exp(p, 1.0, 1e-300).unwrap().abs() < 1e-12);
        }
        assert!(log_expectation_shifted_exp(0.0, 1.0, 1.0).is_err());
        assert!(log_expectation_shifted_exp(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn single_precision_path() {
        assert_relative_eq!(eiexp(1.0f32).unwrap(), -0.596_347_36, max_relative = 1e-5);
        assert_relative_eq!(eiexp(30.0f32).unwrap(), -0.032_289_738_758_980_13, max_relative = 1e-5);
    }
}
