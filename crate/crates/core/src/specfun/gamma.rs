use serde::{Deserialize, Serialize};

use super::erf::erfc;
use crate::error::{domain, Error, Result};
use crate::Real;

/// Positive integer or half-integer order `p`, stored as `2p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt {
    twice_value: u32,
}

impl HalfInt {
    pub fn from_twice(twice_value: u32) -> Result<Self> {
        if twice_value == 0 {
            return Err(domain("half-integer order 2p", ">= 1", 0.0));
        }
        Ok(Self { twice_value })
    }

    /// Order `n` for a positive integer `n`.
    pub fn integer(n: u32) -> Result<Self> {
        Self::from_twice(2 * n)
    }

    pub fn twice_value(self) -> u32 {
        self.twice_value
    }

    pub fn value<T: Real>(self) -> T {
        T::of(self.twice_value as usize) / T::lit(2.0)
    }

    pub fn is_integer(self) -> bool {
        self.twice_value.is_multiple_of(2)
    }
}

/// Upper incomplete gamma `Γ(p; c) = ∫_c^∞ x^{p-1} e^{-x} dx` for integer and
/// half-integer `p`, by upward recursion from `Γ(1; c) = e^{-c}` or
/// `Γ(1/2; c) = √π erfc(√c)` with `Γ(q+1; c) = q Γ(q; c) + c^q e^{-c}`.
pub fn upper_incomplete_gamma<T: Real>(p: HalfInt, c: T) -> Result<T> {
    if !(c >= T::zero()) {
        return Err(domain("incomplete gamma argument c", ">= 0", c.as_f64()));
    }
    let e = (-c).exp();
    let (mut order, mut value) = if p.is_integer() {
        (T::one(), e)
    } else {
        (T::lit(0.5), T::PI().sqrt() * erfc(c.sqrt()))
    };
    let target: T = p.value();
    while order < target {
        value = order * value + c.powf(order) * e;
        order += T::one();
    }
    Ok(value)
}

impl TryFrom<f64> for HalfInt {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        let twice = 2.0 * p;
        if twice < 1.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(domain("incomplete gamma order p", "a positive multiple of 1/2", p));
        }
        Self::from_twice(twice as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: f64, c: f64) -> f64 {
        upper_incomplete_gamma(HalfInt::try_from(p).unwrap(), c).unwrap()
    }

    #[test]
    fn complete_gamma_at_zero() {
        assert_eq!(g(1.0, 0.0), 1.0);
        assert!((g(1.5, 0.0) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((g(2.5, 0.0) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((g(4.0, 0.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_two_closed_form() {
        let c = 1.0_f64;
        assert!((g(2.0, c) - 2.0 / c.exp()).abs() < 1e-15);
        for c in [0.3, 2.0, 7.5] {
            assert!((g(2.0, c) - ((-c).exp() + c * (-c).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_three_halves_identity() {
        // Γ(3/2; c) = √c e^{-c} + (√π/2) erfc(√c)
        for c in [0.0_f64, 0.25, 1.0, 4.0, 16.0] {
            let want = c.sqrt() * (-c).exp() + 0.5 * std::f64::consts::PI.sqrt() * erfc(c.sqrt());
            assert!((g(1.5, c) - want).abs() <= 1e-15 * want.max(1e-300));
        }
    }

    #[test]
    fn rejects_negative_argument_and_bad_orders() {
        assert!(upper_incomplete_gamma(HalfInt::integer(1).unwrap(), -0.1).is_err());
        assert!(HalfInt::from_twice(0).is_err());
        assert!(HalfInt::try_from(0.3).is_err());
        assert!(HalfInt::try_from(0.0).is_err());
    }
}
