//! The Bernoulli function `B(r) = r / (e^r - 1)` and its derivative.
//!
//! `B` is positive, decreasing and 1-Lipschitz, with `B(0) = 1`. The
//! Scharfetter-Gummel flux is built from `B(r)` and `B(-r)`, so both tails
//! have to be evaluated without overflow or cancellation.

use crate::error::{Error, Result};

/// Below this magnitude `B` is evaluated from its Taylor polynomial.
const SERIES_THRESHOLD: f64 = 1e-5;

/// Below this magnitude `B'` is evaluated from its Taylor polynomial. The
/// closed form loses about `2 eps / |r|` relative accuracy near the origin,
/// so the cut-off sits higher than for `B` itself.
const DERIVATIVE_SERIES_THRESHOLD: f64 = 1e-3;

/// For `r` above this, `e^r - 1` and `e^r` agree to machine precision.
const LARGE_ARG: f64 = 40.0;

/// Value of `B` and optionally `B'` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliEval {
    pub value: f64,
    pub derivative: Option<f64>,
}

impl BernoulliEval {
    pub fn at(r: f64) -> Result<Self> {
        Ok(Self {
            value: try_bernoulli(r)?,
            derivative: Some(try_bernoulli_prime(r)?),
        })
    }
}

/// `B(r) = r / (e^r - 1)`, with `B(0) = 1`.
///
/// Intended for hot loops: the input is assumed finite. Use
/// [`try_bernoulli`] at API boundaries.
#[inline]
pub fn bernoulli(r: f64) -> f64 {
    let a = r.abs();
    if a < SERIES_THRESHOLD {
        let r2 = r * r;
        1.0 - 0.5 * r + r2 / 12.0 - r2 * r2 / 720.0
    } else if r > LARGE_ARG {
        r * (-r).exp()
    } else {
        // For very negative r, exp_m1 saturates at -1 and this returns -r.
        r / r.exp_m1()
    }
}

/// `B'(r) = (e^r - 1 - r e^r) / (e^r - 1)^2`, with `B'(0) = -1/2`.
#[inline]
pub fn bernoulli_prime(r: f64) -> f64 {
    let a = r.abs();
    if a < DERIVATIVE_SERIES_THRESHOLD {
        // Derivative of 1 - r/2 + r^2/12 - r^4/720 + r^6/30240.
        let r2 = r * r;
        -0.5 + r / 6.0 - r * r2 / 180.0 + r * r2 * r2 / 5040.0
    } else if r > LARGE_ARG {
        // e^r dominates: B'(r) ~ (1 - r) e^{-r}.
        (1.0 - r) * (-r).exp()
    } else if r < -LARGE_ARG {
        // B(r) ~ -r (1 + e^r), so B'(r) ~ -1 - (1 + r) e^r.
        -1.0 - (1.0 + r) * r.exp()
    } else {
        // B' = B(r) (1 - B(-r)) / r and B(-r) = B(r) + r.
        let b = bernoulli(r);
        b * (1.0 - b - r) / r
    }
}

pub fn try_bernoulli(r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::NonFinite { name: "r", value: r });
    }
    Ok(bernoulli(r))
}

pub fn try_bernoulli_prime(r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::NonFinite { name: "r", value: r });
    }
    Ok(bernoulli_prime(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn value_at_zero() {
        assert_eq!(bernoulli(0.0), 1.0);
        assert_eq!(bernoulli_prime(0.0), -0.5);
    }

    #[test]
    fn value_at_one() {
        let expected = 1.0 / (std::f64::consts::E - 1.0);
        assert!((bernoulli(1.0) - expected).abs() < 1e-15);
        assert!((bernoulli(1.0) - 0.581976706869).abs() < 1e-12);
    }

    #[test]
    fn reflection_at_two() {
        assert!((bernoulli(-2.0) - bernoulli(2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tails_do_not_overflow() {
        for &r in &[700.0, 745.0, 1e4, 1e300] {
            let b = bernoulli(r);
            assert!(b.is_finite() && b >= 0.0, "B({r}) = {b}");
            assert!(bernoulli_prime(r) <= 0.0);
        }
        for &r in &[-700.0, -1e4, -1e300] {
            assert_eq!(bernoulli(r), -r);
            assert_eq!(bernoulli_prime(r), -1.0);
        }
        // r e^{-r} against the closed form where both are representable.
        let r = 50.0_f64;
        let direct = r / (r.exp() - 1.0);
        assert!((bernoulli(r) - direct).abs() <= 1e-15 * direct);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(try_bernoulli(f64::NAN).is_err());
        assert!(try_bernoulli_prime(f64::INFINITY).is_err());
        let e = BernoulliEval::at(0.0).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.derivative, Some(-0.5));
    }

    #[test]
    fn series_branch_matches_closed_form_at_switch() {
        // Closed form with extended care: B = r/expm1(r) is accurate at the switch.
        for &r in &[0.99e-5f64, -0.99e-5, 1.01e-5, -1.01e-5] {
            let direct = r / r.exp_m1();
            assert!((bernoulli(r) - direct).abs() < 2e-16);
        }
    }

    #[test]
    fn derivative_near_zero_is_accurate() {
        // Reference from the series truncated two orders later than the implementation.
        for k in 0..200 {
            let r = -1e-4 + 2e-4 * (k as f64) / 199.0;
            let r2 = r * r;
            let reference = -0.5 + r / 6.0 - r * r2 / 180.0 + r * r2 * r2 / 5040.0
                - r * r2 * r2 * r2 / 151200.0;
            let got = bernoulli_prime(r);
            assert!(((got - reference) / reference).abs() <= 1e-12, "r = {r}");
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let eps = 1e-6;
        let mut r = -60.0;
        while r <= 60.0 {
            let fd = (bernoulli(r + eps) - bernoulli(r - eps)) / (2.0 * eps);
            assert!((fd - bernoulli_prime(r)).abs() <= 1e-6, "r = {r}");
            r += 0.173;
        }
        // Across both derivative branch switches.
        for &r in &[1e-3, -1e-3, 40.0, -40.0] {
            let fd = (bernoulli(r + eps) - bernoulli(r - eps)) / (2.0 * eps);
            assert!((fd - bernoulli_prime(r)).abs() <= 1e-6, "r = {r}");
        }
    }

    #[test]
    fn derivative_tail_is_monotone_to_zero() {
        let mut prev = bernoulli_prime(5.0);
        for k in 6..200 {
            let d = bernoulli_prime(k as f64);
            assert!(d < 0.0 || d == 0.0);
            assert!(d >= prev);
            prev = d;
        }
    }

    proptest! {
        #[test]
        fn reflection_identity(r in -50.0f64..50.0) {
            let lhs = bernoulli(-r) - bernoulli(r);
            prop_assert!((lhs - r).abs() <= 1e-12 * r.abs().max(1.0));
        }

        #[test]
        fn exponential_identity(r in -30.0f64..30.0) {
            let lhs = bernoulli(r) * r.exp();
            let rhs = bernoulli(-r);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }

        #[test]
        fn positive_decreasing_lipschitz(r in -100.0f64..100.0, s in -100.0f64..100.0) {
            let (br, bs) = (bernoulli(r), bernoulli(s));
            prop_assert!(br > 0.0 && bs > 0.0);
            if r < s {
                prop_assert!(br >= bs);
            }
            prop_assert!((br - bs).abs() <= (r - s).abs() * (1.0 + 1e-12) + 1e-15);
        }
    }
}
