//! Phase wrapping and rounding onto the `2π/M` grid.
//!
//! Rounding of exact half-integers always goes up (toward +∞), so `π` wraps
//! to `-π` and `π/M` wraps to `-π/M`. Every reduction returns a value in a
//! half-open interval.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Radians(f64);

impl Radians {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Radians(value))
        } else {
            Err(Error::domain(format!("angle must be finite, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Radians> for f64 {
    fn from(r: Radians) -> f64 {
        r.0
    }
}

/// `round()` with half-integers rounded toward +∞.
#[inline]
pub fn round_half_up(v: f64) -> f64 {
    let f = v.floor();
    // v - floor(v) is exact for finite v
    if v - f >= 0.5 {
        f + 1.0
    } else {
        f
    }
}

/// Splits `x` into `step * n + frac` with `frac` in `[-step/2, step/2)`.
#[inline]
fn split(x: f64, step: f64) -> (f64, f64) {
    let half = 0.5 * step;
    if (-half..half).contains(&x) {
        return (0.0, x);
    }
    let mut n = round_half_up(x / step);
    let mut frac = x - step * n;
    if frac >= half {
        n += 1.0;
        frac = x - step * n;
    } else if frac < -half {
        n -= 1.0;
        frac = x - step * n;
    }
    (n, frac)
}

#[inline]
pub(crate) fn wrap_pi_raw(x: f64) -> f64 {
    split(x, TAU).1
}

#[inline]
pub(crate) fn grid_step(m: u32) -> f64 {
    TAU / m as f64
}

/// Integer grid index `round(M x / 2π)` and the residual `x - 2π n / M`.
#[inline]
pub(crate) fn grid_split_raw(x: f64, m: u32) -> (i64, f64) {
    let (n, frac) = split(x, grid_step(m));
    (n as i64, frac)
}

fn check_order(m: u32) -> Result<()> {
    if m < 2 {
        Err(Error::domain(format!(
            "constellation size must be at least 2, got {m}"
        )))
    } else {
        Ok(())
    }
}

/// `x` reduced modulo `2π` into `[-π, π)`.
pub fn wrap_pi(x: Radians) -> Radians {
    Radians(wrap_pi_raw(x.0))
}

/// `x` reduced modulo `2π/M` into `[-π/M, π/M)`.
pub fn wrap_frac(x: Radians, m: u32) -> Result<Radians> {
    check_order(m)?;
    Ok(Radians(grid_split_raw(x.0, m).1))
}

/// Nearest multiple of `2π/M` to `x`.
pub fn round_to_grid(x: Radians, m: u32) -> Result<Radians> {
    check_order(m)?;
    let (n, _) = grid_split_raw(x.0, m);
    Ok(Radians(grid_step(m) * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rad(x: f64) -> Radians {
        Radians::new(x).unwrap()
    }

    /// Grid point minimising |x - 2πk/M|, ties broken toward the larger k.
    fn brute_nearest_k(x: f64, m: u32) -> i64 {
        let step = TAU / m as f64;
        let centre = (x / step) as i64;
        let mut best = centre - 3;
        for k in centre - 3..=centre + 3 {
            let d = (x - step * k as f64).abs();
            let db = (x - step * best as f64).abs();
            if d < db - 1e-15 || (d - db).abs() <= 1e-15 {
                best = k;
            }
        }
        best
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert!(Radians::new(f64::NAN).is_err());
        assert!(Radians::new(f64::INFINITY).is_err());
    }

    #[test]
    fn wrap_pi_examples() {
        assert_eq!(wrap_pi(rad(0.0)).value(), 0.0);
        assert_eq!(wrap_pi(rad(PI)).value(), -PI);
        let d = wrap_pi(rad(-0.99 * PI - 0.99 * PI)).value();
        assert!((d - 0.02 * PI).abs() < 1e-12, "{d}");
    }

    #[test]
    fn wrap_frac_examples_match_brute_force() {
        assert_eq!(wrap_frac(rad(0.0), 4).unwrap().value(), 0.0);

        let x = PI / 4.0;
        let k = brute_nearest_k(x, 4);
        assert_eq!(k, 1);
        let expected = x - k as f64 * PI / 2.0;
        assert_eq!(expected, -PI / 4.0);
        assert_eq!(wrap_frac(rad(x), 4).unwrap().value(), expected);

        let x = 2.0 * PI / 3.0;
        let k = brute_nearest_k(x, 2);
        let expected = x - k as f64 * PI;
        assert!((expected + PI / 3.0).abs() < 1e-15);
        assert!((wrap_frac(rad(x), 2).unwrap().value() - expected).abs() < 1e-15);
    }

    #[test]
    fn round_to_grid_examples() {
        assert_eq!(round_to_grid(rad(0.0), 8).unwrap().value(), 0.0);
        assert_eq!(round_to_grid(rad(PI / 4.0), 4).unwrap().value(), PI / 2.0);
        assert_eq!(round_to_grid(rad(-0.1), 2).unwrap().value(), 0.0);
    }

    #[test]
    fn order_below_two_rejected() {
        assert!(wrap_frac(rad(0.3), 1).is_err());
        assert!(round_to_grid(rad(0.3), 0).is_err());
    }

    #[test]
    fn half_integer_rounding_goes_up() {
        assert_eq!(round_half_up(0.5), 1.0);
        assert_eq!(round_half_up(-0.5), 0.0);
        assert_eq!(round_half_up(-1.5), -1.0);
        assert_eq!(round_half_up(0.49999999999999994), 0.0);
    }

    #[test]
    fn wrap_pi_million_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let x: f64 = rng.random_range(-100.0..100.0);
            let w = wrap_pi_raw(x);
            assert!((-PI..PI).contains(&w), "{x} -> {w}");
            let k = (x - w) / TAU;
            assert!((k - k.round()).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn wrap_pi_idempotent(x in -1000.0f64..1000.0) {
            let once = wrap_pi(rad(x));
            prop_assert_eq!(wrap_pi(once), once);
        }

        #[test]
        fn frac_plus_grid_reconstructs(x in -10.0f64..10.0, m in 2u32..=16) {
            let f = wrap_frac(rad(x), m).unwrap().value();
            let g = round_to_grid(rad(x), m).unwrap().value();
            let half = PI / m as f64;
            prop_assert!(f >= -half && f < half);
            prop_assert!((f + g - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn wrap_frac_periodic(x in -10.0f64..10.0, m in 2u32..=16, k in -100i64..=100) {
            let shifted = x + TAU * k as f64 / m as f64;
            let a = wrap_frac(rad(x), m).unwrap().value();
            let b = wrap_frac(rad(shifted), m).unwrap().value();
            // both sides of the cut at ±π/M are the same point on the circle
            let d = (a - b).abs();
            let step = TAU / m as f64;
            prop_assert!(d < 1e-9 || (d - step).abs() < 1e-9);
        }
    }
}
