//! Closed-form moments of soft-thresholded Gaussian coefficients and the
//! second and fourth moment maps of a regularized multipole.
//!
//! All coefficient moments depend on `ν = λ/√C_ℓ` only and are returned in
//! units of `C_ℓ` (second moments) or `C_ℓ²` (fourth moments):
//!
//! * `γ₀ = E(a^reg_{ℓ0})²`, `γ₂ = E(a^reg_{ℓ0})⁴` for the real Gaussian
//!   coefficients (m = 0, and every real-basis coefficient),
//! * `γ₁ = E|a^reg_{ℓm}|²`, `γ₃ = E|a^reg_{ℓm}|⁴` for the Rayleigh moduli of
//!   complex `m ≠ 0` coefficients, and more generally
//!   [`even_moment`]`(p) = E|a^reg_{ℓm}|^{2p}`.
//!
//! For `ν < 1.5` the alternating closed forms in [`closed_form`] are used.
//! Beyond that they cancel catastrophically and each moment is evaluated as
//! an explicit exponential times a tail integral computed by backward
//! recurrence, which is accurate for all `ν` and has a log-space variant.

pub mod closed_form;
mod tail;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::montecarlo::McEstimate;
use crate::regularize::{Penalty, Scheme};
use crate::specfun::{ln_normal_pdf, PointHarmonics};
use crate::Real;

use tail::j_table;

/// Crossover from the closed forms to the tail-integral route.
pub const CLOSED_FORM_LIMIT: f64 = 1.5;

/// Dimensionless shrinkage strength `ν_ℓ = λ/√C_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NuRatio<T>(T);

impl<T: Real> NuRatio<T> {
    pub fn new(nu: T) -> Result<Self> {
        if !(nu >= T::zero()) || !nu.is_finite() {
            return Err(domain("nu", "finite and >= 0", nu.as_f64()));
        }
        Ok(Self(nu))
    }

    pub fn from_penalty(penalty: Penalty<T>, c_ell: T) -> Result<Self> {
        if !(c_ell > T::zero()) || !c_ell.is_finite() {
            return Err(domain("C_l", "> 0", c_ell.as_f64()));
        }
        Self::new(penalty.lambda() / c_ell.sqrt())
    }

    pub fn value(self) -> T {
        self.0
    }

    fn closed(self) -> bool {
        self.0 < T::lit(CLOSED_FORM_LIMIT)
    }
}

// ln(2 φ(ν) J_n(ν)) for the real Gaussian tail moments
fn ln_gaussian_tail<T: Real>(nu: T, n: usize) -> T {
    T::LN_2() + ln_normal_pdf(nu) + j_table(nu, n)[n].ln()
}

// ln(e^{-ν²} 2p 2^{-p} J_{2p-1}(√2 ν)) for the Rayleigh tail moments
fn ln_rayleigh_tail<T: Real>(nu: T, p: u32) -> T {
    let n = 2 * p as usize - 1;
    let p_t = T::of(p as usize);
    -nu * nu + (T::lit(2.0) * p_t).ln() - p_t * T::LN_2() + j_table(T::SQRT_2() * nu, n)[n].ln()
}

/// `γ₀(ν) = E(a^reg_{ℓ0})²/C_ℓ`; decreasing from 1 at `ν = 0`.
pub fn gamma0<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma0(nu.0)
    } else {
        ln_gaussian_tail(nu.0, 2).exp()
    }
}

/// `ln γ₀(ν)`, finite for every finite `ν`.
pub fn ln_gamma0<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma0(nu.0).ln()
    } else {
        ln_gaussian_tail(nu.0, 2)
    }
}

/// `γ₁(ν) = E|a^reg_{ℓm}|²/C_ℓ` for complex `m ≠ 0`.
pub fn gamma1<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma1(nu.0)
    } else {
        ln_rayleigh_tail(nu.0, 1).exp()
    }
}

pub fn ln_gamma1<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma1(nu.0).ln()
    } else {
        ln_rayleigh_tail(nu.0, 1)
    }
}

/// `γ₂(ν) = E(a^reg_{ℓ0})⁴/C_ℓ²`; equals 3 at `ν = 0`.
pub fn gamma2<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma2(nu.0)
    } else {
        ln_gaussian_tail(nu.0, 4).exp()
    }
}

pub fn ln_gamma2<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma2(nu.0).ln()
    } else {
        ln_gaussian_tail(nu.0, 4)
    }
}

/// `γ₃(ν) = E|a^reg_{ℓm}|⁴/C_ℓ²` for complex `m ≠ 0`; equals 2 at `ν = 0`.
pub fn gamma3<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma3(nu.0)
    } else {
        ln_rayleigh_tail(nu.0, 2).exp()
    }
}

pub fn ln_gamma3<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        closed_form::gamma3(nu.0).ln()
    } else {
        ln_rayleigh_tail(nu.0, 2)
    }
}

/// `E|a^reg_{ℓm}|^{2p}/C_ℓ^p` for complex `m ≠ 0`, `p ≥ 1`.
pub fn even_moment<T: Real>(p: u32, nu: NuRatio<T>) -> Result<T> {
    Ok(ln_even_moment(p, nu)?.exp())
}

pub fn ln_even_moment<T: Real>(p: u32, nu: NuRatio<T>) -> Result<T> {
    if p == 0 {
        return Err(domain("moment order p", ">= 1", 0.0));
    }
    Ok(if nu.closed() {
        closed_form::even_moment(p, nu.0)?.ln()
    } else {
        ln_rayleigh_tail(nu.0, p)
    })
}

/// Kurtosis of `T^reg_ℓ` at the North Pole, `γ₂/γ₀²`: 3 at `ν = 0` and
/// strictly increasing.
pub fn kurtosis_pole<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        let g0 = closed_form::gamma0(nu.0);
        closed_form::gamma2(nu.0) / (g0 * g0)
    } else {
        ln_kurtosis_pole(nu).exp()
    }
}

pub fn ln_kurtosis_pole<T: Real>(nu: NuRatio<T>) -> T {
    if nu.closed() {
        return kurtosis_pole(nu).ln();
    }
    let j = j_table(nu.0, 4);
    -T::LN_2() - ln_normal_pdf(nu.0) + j[4].ln() - T::lit(2.0) * j[2].ln()
}

/// Envelope `√(π/2) (15/4) ν³ e^{ν²/2}` proposed for the growth of
/// [`kurtosis_pole`].
pub fn kurtosis_pole_asymptote<T: Real>(nu: NuRatio<T>) -> T {
    ln_kurtosis_pole_asymptote(nu).exp()
}

pub fn ln_kurtosis_pole_asymptote<T: Real>(nu: NuRatio<T>) -> T {
    let x = nu.0;
    (T::FRAC_PI_2().sqrt() * T::lit(3.75)).ln() + T::lit(3.0) * x.ln() + x * x / T::lit(2.0)
}

/// `V_ℓ(θ, φ) = (4π/(2ℓ+1))² Σ_m (Y^R_{ℓm}(θ, φ))⁴`; exactly 1 at the poles.
pub fn v_ell<T: Real>(ell: usize, theta: T, phi: T) -> T {
    v_ell_at(&PointHarmonics::new(ell, theta, phi))
}

fn v_ell_at<T: Real>(h: &PointHarmonics<T>) -> T {
    h.unit_real_all()
        .into_iter()
        .map(|u| (u * u) * (u * u))
        .fold(T::zero(), |s, x| s + x)
}

/// The four coefficient moments that drive every map, in units of powers of
/// `C_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMoments<T> {
    pub gamma0: T,
    pub gamma1: T,
    pub gamma2: T,
    pub gamma3: T,
}

impl<T: Real> CoefficientMoments<T> {
    pub fn at(nu: NuRatio<T>) -> Self {
        Self {
            gamma0: gamma0(nu),
            gamma1: gamma1(nu),
            gamma2: gamma2(nu),
            gamma3: gamma3(nu),
        }
    }
}

/// [`variance_map`] for given coefficient moments and precomputed harmonics.
pub fn variance_from_moments<T: Real>(g: &CoefficientMoments<T>, scheme: Scheme, h: &PointHarmonics<T>) -> T {
    match scheme {
        Scheme::RealBasis => g.gamma0 * h.degree_sum(),
        Scheme::ComplexModulus => {
            let y0 = h.abs_sq(0);
            let s = T::lit(2.0) * (1..=h.ell()).map(|k| h.abs_sq(k)).fold(T::zero(), |a, b| a + b);
            g.gamma0 * y0 + g.gamma1 * s
        }
    }
}

/// [`trispectrum_map`] for given coefficient moments and precomputed harmonics.
pub fn fourth_moment_from_moments<T: Real>(g: &CoefficientMoments<T>, scheme: Scheme, h: &PointHarmonics<T>) -> T {
    match scheme {
        Scheme::RealBasis => {
            // Σ(Y^R)⁴ = N⁴ V_ℓ and (Σ(Y^R)²)² = N⁴
            let n4 = h.degree_sum() * h.degree_sum();
            let v = v_ell_at(h);
            let three = T::lit(3.0);
            n4 * (g.gamma2 * v + three * g.gamma0 * g.gamma0 * (T::one() - v))
        }
        Scheme::ComplexModulus => {
            // T = a₀Y₀ + Σ_{m>0} 2Re(a_m Y_m); the uniform phases make each
            // X_m = 2Re(a_m Y_m) symmetric with E X_m² = 2γ₁|Y_m|² and
            // E X_m⁴ = 6γ₃|Y_m|⁴. S and Q run over signed m ≠ 0.
            let y0 = h.abs_sq(0);
            let (mut s, mut q) = (T::zero(), T::zero());
            for k in 1..=h.ell() {
                let a = h.abs_sq(k);
                s += a;
                q += a * a;
            }
            let two = T::lit(2.0);
            let three = T::lit(3.0);
            let (s, q) = (two * s, two * q);
            g.gamma2 * y0 * y0
                + three * g.gamma3 * q
                + T::lit(6.0) * g.gamma0 * g.gamma1 * y0 * s
                + three * g.gamma1 * g.gamma1 * (s * s - two * q)
        }
    }
}

/// `E T^reg_ℓ(θ, φ)² / C_ℓ`.
///
/// Complex scheme: `γ₀|Y_{ℓ0}|² + γ₁ Σ_{m≠0} |Y_{ℓm}|²`. Real scheme:
/// `γ₀ (2ℓ+1)/4π`, constant over the sphere.
pub fn variance_map<T: Real>(ell: usize, nu: NuRatio<T>, scheme: Scheme, theta: T, phi: T) -> T {
    variance_from_moments(
        &CoefficientMoments::at(nu),
        scheme,
        &PointHarmonics::new(ell, theta, phi),
    )
}

/// `E T^reg_ℓ(θ, φ)⁴ / C_ℓ²`.
///
/// With `S = Σ_{m≠0}|Y_{ℓm}|²` and `Q = Σ_{m≠0}|Y_{ℓm}|⁴`, the complex scheme
/// gives `γ₂|Y_{ℓ0}|⁴ + 3γ₃Q + 6γ₀γ₁|Y_{ℓ0}|²S + 3γ₁²(S² - 2Q)`, and the real
/// scheme `γ₂ Σ_m (Y^R_{ℓm})⁴ + 3γ₀² [(Σ_m (Y^R_{ℓm})²)² - Σ_m (Y^R_{ℓm})⁴]`.
/// At `ν = 0` both reduce to three times the squared variance.
pub fn trispectrum_map<T: Real>(ell: usize, nu: NuRatio<T>, scheme: Scheme, theta: T, phi: T) -> T {
    fourth_moment_from_moments(
        &CoefficientMoments::at(nu),
        scheme,
        &PointHarmonics::new(ell, theta, phi),
    )
}

/// One regularized multipole: degree, variance, penalty and scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedMultipole<T> {
    pub ell: usize,
    pub c_ell: T,
    pub penalty: Penalty<T>,
    pub scheme: Scheme,
    nu: NuRatio<T>,
    moments: CoefficientMoments<T>,
}

impl<T: Real> RegularizedMultipole<T> {
    pub fn new(ell: usize, c_ell: T, penalty: Penalty<T>, scheme: Scheme) -> Result<Self> {
        let nu = NuRatio::from_penalty(penalty, c_ell)?;
        Ok(Self {
            ell,
            c_ell,
            penalty,
            scheme,
            nu,
            moments: CoefficientMoments::at(nu),
        })
    }

    pub fn nu(&self) -> NuRatio<T> {
        self.nu
    }

    /// `γ₀..γ₃` in units of powers of `C_ℓ`.
    pub fn coefficient_moments(&self) -> CoefficientMoments<T> {
        self.moments
    }

    /// `E|a^reg|²` and `E|a^reg|⁴` of a coefficient, `m = 0` or `m ≠ 0`.
    /// Real-basis coefficients share the `m = 0` law.
    pub fn coefficient_second_fourth(&self, m_zero: bool) -> (T, T) {
        let c = self.c_ell;
        let g = &self.moments;
        if m_zero || self.scheme == Scheme::RealBasis {
            (g.gamma0 * c, g.gamma2 * c * c)
        } else {
            (g.gamma1 * c, g.gamma3 * c * c)
        }
    }

    pub fn variance(&self, theta: T, phi: T) -> T {
        self.variance_at(&PointHarmonics::new(self.ell, theta, phi))
    }

    pub fn variance_at(&self, h: &PointHarmonics<T>) -> T {
        self.c_ell * variance_from_moments(&self.moments, self.scheme, h)
    }

    pub fn fourth_moment(&self, theta: T, phi: T) -> T {
        self.fourth_moment_at(&PointHarmonics::new(self.ell, theta, phi))
    }

    pub fn fourth_moment_at(&self, h: &PointHarmonics<T>) -> T {
        self.c_ell * self.c_ell * fourth_moment_from_moments(&self.moments, self.scheme, h)
    }

    /// `E T⁴(θ, φ) / (E T²(0, 0))²`.
    pub fn kurtosis(&self, theta: T, phi: T) -> T {
        let v = self.variance(T::zero(), T::zero());
        self.fourth_moment(theta, phi) / (v * v)
    }
}

/// Analytic moments of one multipole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport<T> {
    pub ell: usize,
    pub lambda: T,
    pub c_ell: T,
    pub nu: T,
    /// `E(a^reg_{ℓ0})²`, variance units.
    pub gamma0: T,
    /// `E|a^reg_{ℓm}|²` for complex `m ≠ 0`, variance units.
    pub gamma1: T,
    /// `E(a^reg_{ℓ0})⁴`, squared variance units.
    pub gamma2: T,
    /// `E|a^reg_{ℓm}|⁴` for complex `m ≠ 0`, squared variance units.
    pub gamma3: T,
    pub kappa_pole: T,
    pub scheme: Scheme,
}

impl<T: Real> MomentReport<T> {
    pub fn new(ell: usize, c_ell: T, penalty: Penalty<T>, scheme: Scheme) -> Result<Self> {
        let nu = NuRatio::from_penalty(penalty, c_ell)?;
        let g = CoefficientMoments::at(nu);
        Ok(Self {
            ell,
            lambda: penalty.lambda(),
            c_ell,
            nu: nu.value(),
            gamma0: g.gamma0 * c_ell,
            gamma1: g.gamma1 * c_ell,
            gamma2: g.gamma2 * c_ell * c_ell,
            gamma3: g.gamma3 * c_ell * c_ell,
            kappa_pole: kurtosis_pole(nu),
            scheme,
        })
    }
}

/// Monte Carlo means of the real and imaginary parts of `a^k` for odd `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddMomentCheck {
    pub order: u32,
    pub re: McEstimate,
    pub im: McEstimate,
}

impl OddMomentCheck {
    /// Both parts within `k` standard errors of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.re.mean.abs() <= k * self.re.std_error && self.im.mean.abs() <= k * self.im.std_error
    }
}

/// Sample mean of `a^order` over independent regularized coefficients; odd
/// moments vanish by phase (or sign) symmetry.
pub fn odd_moment_zero_check(samples: &[Complex<f64>], order: u32) -> Result<OddMomentCheck> {
    if order.is_multiple_of(2) {
        return Err(domain("odd moment order", "odd", order as f64));
    }
    let powers: Vec<Complex<f64>> = samples.iter().map(|a| a.powu(order)).collect();
    let re: Vec<f64> = powers.iter().map(|z| z.re).collect();
    let im: Vec<f64> = powers.iter().map(|z| z.im).collect();
    Ok(OddMomentCheck {
        order,
        re: McEstimate::from_samples(&re)?,
        im: McEstimate::from_samples(&im)?,
    })
}
