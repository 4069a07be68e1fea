//! Brute-force and quadrature references used only by the test suites.
//!
//! Nothing here shares code with the main library: every function integrates
//! or enumerates a defining formula directly.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

const BREAKS: [f64; 9] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];

/// Double-exponential quadrature on `[a, b]` to roughly 1e-15 relative.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let rough = quadrature::integrate(&f, a, b, 1e-12).integral;
    let target = (rough.abs() * 1e-16).max(f64::MIN_POSITIVE);
    quadrature::integrate(&f, a, b, target).integral
}

/// `∫_0^{40} f`, split at fixed breakpoints so every panel is smooth and
/// well scaled. Integrands used here are below 1e-300 past 40.
pub fn half_line<F: Fn(f64) -> f64>(f: F) -> f64 {
    BREAKS.windows(2).map(|w| adaptive(&f, w[0], w[1])).sum()
}

fn scaled_gaussian_tail(k: u32, nu: f64) -> f64 {
    half_line(|t| t.powi(k as i32) * (-nu * t - t * t / 2.0).exp())
}

/// `(2/√(2π)) ∫_ν^∞ (x - ν)^k e^{-x²/2} dx`.
pub fn gaussian_tail_moment(k: u32, nu: f64) -> f64 {
    ln_gaussian_tail_moment(k, nu).exp()
}

pub fn ln_gaussian_tail_moment(k: u32, nu: f64) -> f64 {
    (2.0 / (2.0 * PI).sqrt()).ln() - nu * nu / 2.0 + scaled_gaussian_tail(k, nu).ln()
}

fn scaled_rayleigh_tail(k: u32, nu: f64) -> f64 {
    half_line(|t| t.powi(k as i32) * 2.0 * (t + nu) * (-2.0 * nu * t - t * t).exp())
}

/// `∫_ν^∞ (r - ν)^k 2r e^{-r²} dr`.
pub fn rayleigh_tail_moment(k: u32, nu: f64) -> f64 {
    ln_rayleigh_tail_moment(k, nu).exp()
}

pub fn ln_rayleigh_tail_moment(k: u32, nu: f64) -> f64 {
    -nu * nu + scaled_rayleigh_tail(k, nu).ln()
}

/// `∫_c^∞ x^{p-1} e^{-x} dx`, via `x = c + s²`.
pub fn upper_gamma_quad(p: f64, c: f64) -> f64 {
    let inner = adaptive(|s| 2.0 * s * (c + s * s).powf(p - 1.0) * (-s * s).exp(), 0.0, 4.0)
        + adaptive(|s| 2.0 * s * (c + s * s).powf(p - 1.0) * (-s * s).exp(), 4.0, 12.0);
    (-c).exp() * inner
}

/// `Φ(x) = 1/2 + ∫_0^x φ`.
pub fn normal_cdf_quad(x: f64) -> f64 {
    0.5 + adaptive(|t| (-t * t / 2.0).exp() / (2.0 * PI).sqrt(), 0.0, x)
}

/// `(2/√π) ∫_x^∞ e^{-t²} dt` for `x ≥ 0`.
pub fn erfc_quad(x: f64) -> f64 {
    2.0 / PI.sqrt() * (-x * x).exp() * half_line(|t| (-2.0 * x * t - t * t).exp())
}

fn binom(n: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `P_ℓ(x) = (1/(2^ℓ ℓ!)) d^ℓ/dx^ℓ (x² - 1)^ℓ`, differentiated exactly on
/// integer coefficients. Valid for `ℓ ≤ 12`.
pub fn legendre_rodrigues(ell: u32, x: f64) -> f64 {
    assert!(ell <= 12);
    let mut coeffs = vec![0i128; 2 * ell as usize + 1];
    for j in 0..=ell {
        let sign = if (ell - j).is_multiple_of(2) { 1 } else { -1 };
        coeffs[2 * j as usize] = sign * binom(ell, j);
    }
    for _ in 0..ell {
        coeffs = coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as i128).collect();
    }
    let denom = (1..=ell as i128).product::<i128>() << ell;
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64) / denom as f64
}

/// `P_ℓ(x) = 2^{-ℓ} Σ_k (-1)^k C(ℓ,k) C(2ℓ-2k, ℓ) x^{ℓ-2k}`.
pub fn legendre_explicit(ell: u32, x: f64) -> f64 {
    assert!(ell <= 30);
    let mut s = 0.0;
    for k in 0..=ell / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom(ell, k) as f64 * binom(2 * ell - 2 * k, ell) as f64 * x.powi((ell - 2 * k) as i32);
    }
    s / 2f64.powi(ell as i32)
}

/// The five degree-2 real harmonics in order `m = -2..=2`, written out by hand
/// (Condon-Shortley phase carried into the real basis).
pub fn real_harmonics_l2(theta: f64, phi: f64) -> [f64; 5] {
    let (s, c) = theta.sin_cos();
    let a = 0.5 * (15.0 / PI).sqrt();
    let b = 0.25 * (15.0 / PI).sqrt();
    [
        b * s * s * (2.0 * phi).sin(),
        -a * s * c * phi.sin(),
        0.25 * (5.0 / PI).sqrt() * (3.0 * c * c - 1.0),
        -a * s * c * phi.cos(),
        b * s * s * (2.0 * phi).cos(),
    ]
}

/// Gauss-Legendre in `cos θ` times the uniform rule in `φ`; returns
/// `(θ, φ, weight)` with weights summing to `4π`. Exact for band-limited
/// integrands of degree below `2 n_theta` in `cos θ` and `n_phi` in `φ`.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Vec<(f64, f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n_theta).expect("n_theta > 0"));
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for &(x, w) in rule.as_node_weight_pairs() {
        let theta = x.acos();
        for j in 0..n_phi {
            out.push((theta, j as f64 * dphi, w * dphi));
        }
    }
    out
}

/// Exhaustive search of `f` on `lo, lo + step, ..., ≤ hi`; returns the best
/// `(x, f(x))`.
pub fn grid_minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).floor() as usize;
    (0..=n)
        .map(|i| {
            let x = lo + i as f64 * step;
            (x, f(x))
        })
        .fold((lo, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// One-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 99% critical value of the KS statistic.
pub fn ks_critical_99(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
