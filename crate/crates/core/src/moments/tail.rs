//! Scaled tail integrals `J_n(x) = ∫_0^∞ t^n e^{-xt - t²/2} dt`.
//!
//! Every moment of a soft-thresholded Gaussian or Rayleigh variable is a
//! single `J_n` times an explicit exponential, so evaluating `J_n` directly
//! avoids the cancellation in the alternating closed forms once `x` is
//! moderate. They satisfy
//!
//! `x J_0 + J_1 = 1`,  `x J_n + J_{n+1} = n J_{n-1}`.

use crate::specfun::erfc;
use crate::Real;

/// Below this argument the forward recurrence from the Mills ratio is used.
const FORWARD_LIMIT: f64 = 1.5;
/// Extra backward steps of Miller's algorithm beyond the highest order needed.
const MILLER_EXTRA: usize = 400;

/// `J_0..=J_nmax` at `x ≥ 0`.
pub(crate) fn j_table<T: Real>(x: T, nmax: usize) -> Vec<T> {
    debug_assert!(x >= T::zero());
    if x < T::lit(FORWARD_LIMIT) {
        forward(x, nmax)
    } else {
        miller(x, nmax)
    }
}

fn forward<T: Real>(x: T, nmax: usize) -> Vec<T> {
    let mut j = Vec::with_capacity(nmax + 2);
    // Mills ratio of the standard normal
    let j0 = (T::PI() / T::lit(2.0)).sqrt() * (x * x / T::lit(2.0)).exp() * erfc(x / T::SQRT_2());
    j.push(j0);
    j.push(T::one() - x * j0);
    for n in 1..nmax {
        let next = T::of(n) * j[n - 1] - x * j[n];
        j.push(next);
    }
    j.truncate(nmax + 1);
    j
}

fn miller<T: Real>(x: T, nmax: usize) -> Vec<T> {
    let big = T::max_value().sqrt();
    let top = nmax + MILLER_EXTRA;
    let mut y = vec![T::zero(); top + 2];
    y[top] = T::one();
    for n in (1..=top).rev() {
        y[n - 1] = (x * y[n] + y[n + 1]) / T::of(n);
        // The iterates first shrink (n > x) and then grow; rescale the
        // entries still in use whenever they leave a safe range.
        let v = y[n - 1];
        if v > big || v < T::one() / big {
            let s = T::one() / v;
            let last = n.max(nmax + 1);
            y[n - 1..=last].iter_mut().for_each(|w| *w *= s);
        }
    }
    let scale = T::one() / (x * y[0] + y[1]);
    y.truncate(nmax + 1);
    y.into_iter().map(|v| v * scale).collect()
}
