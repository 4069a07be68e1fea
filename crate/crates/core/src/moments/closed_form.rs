//! Direct closed forms of the coefficient moments in terms of the normal
//! distribution function and upper incomplete gamma functions.
//!
//! These are exact but alternate in sign; beyond `ν ≈ 2` they lose relative
//! accuracy quickly. The dispatching functions in the parent module switch
//! to the tail-integral route well before that.

use crate::error::Result;
use crate::specfun::{erfc, upper_incomplete_gamma, HalfInt};
use crate::Real;

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn gamma_half<T: Real>(twice_p: u32, c: T) -> T {
    upper_incomplete_gamma(HalfInt::from_twice(twice_p).expect("positive order"), c).expect("c >= 0")
}

/// `(1 + ν²) 2(1 - Φ(ν)) - ν √(2/π) e^{-ν²/2}`.
pub fn gamma0<T: Real>(nu: T) -> T {
    let two_tail = erfc(nu / T::SQRT_2());
    (T::one() + nu * nu) * two_tail - nu * (T::lit(2.0) / T::PI()).sqrt() * (-nu * nu / T::lit(2.0)).exp()
}

/// `e^{-ν²} - ν √π Erfc(ν)`.
pub fn gamma1<T: Real>(nu: T) -> T {
    (-nu * nu).exp() - nu * T::PI().sqrt() * erfc(nu)
}

/// `(4/√π) { Σ_{k=2}^{5} (-1)^{k+1} (ν/√2)^{5-k} C(4, 5-k) Γ(k/2; ν²/2)
///  + 2√π (ν/√2)⁴ (1 - Φ(ν)) }`.
pub fn gamma2<T: Real>(nu: T) -> T {
    let u = nu / T::SQRT_2();
    let c = u * u;
    let mut s = T::zero();
    for k in 2..=5u32 {
        let sign = if (k + 1) % 2 == 0 { T::one() } else { -T::one() };
        s += sign * u.powi((5 - k) as i32) * T::lit(binom(4, 5 - k)) * gamma_half(k, c);
    }
    // 1 - Φ(ν) = erfc(ν/√2)/2
    let tail = erfc(u) / T::lit(2.0);
    s += T::lit(2.0) * T::PI().sqrt() * c * c * tail;
    T::lit(4.0) / T::PI().sqrt() * s
}

/// `Σ_{k=0}^{4} (-1)^k C(4, k) ν^{4-k} Γ((k+2)/2; ν²)`.
pub fn gamma3<T: Real>(nu: T) -> T {
    even_moment(2, nu).expect("p = 2 is valid")
}

/// `Σ_{k=0}^{2p} (-1)^k C(2p, k) ν^{2p-k} Γ((k+2)/2; ν²)`, `p ≥ 1`.
pub fn even_moment<T: Real>(p: u32, nu: T) -> Result<T> {
    if p == 0 {
        return Err(crate::error::domain("moment order p", ">= 1", 0.0));
    }
    let n = 2 * p;
    let c = nu * nu;
    let mut s = T::zero();
    for k in 0..=n {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        s += sign * T::lit(binom(n, k)) * nu.powi((n - k) as i32) * gamma_half(k + 2, c);
    }
    Ok(s)
}
