//! Soft-thresholding operators, the atom survival law, and the penalty level
//! that keeps the expected reconstruction error below a budget.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sampling::{Basis, HarmonicCoefficients};
use crate::specfun::normal_cdf;
use crate::spectrum::PowerSpectrum;
use crate::Real;

/// Which coefficients the ℓ¹ penalty acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Moduli `|a_{ℓm}|` of the complex coefficients; phases are kept.
    ComplexModulus,
    /// Real-basis coefficients `a^R_{ℓm}`, each shrunk towards zero.
    RealBasis,
}

impl Scheme {
    /// Basis the scheme operates in.
    pub fn basis(self) -> Basis {
        match self {
            Scheme::ComplexModulus => Basis::Complex,
            Scheme::RealBasis => Basis::Real,
        }
    }
}

/// Penalty level `λ ≥ 0`, in coefficient amplitude units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Penalty<T>(T);

impl<T: Real> Penalty<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(domain("penalty lambda", "finite and >= 0", lambda.as_f64()));
        }
        Ok(Self(lambda))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn lambda(self) -> T {
        self.0
    }
}

/// `|ρ - λ|₊ e^{iψ}` for `a = ρ e^{iψ}`; zero maps to zero.
pub fn shrink_complex<T: Real>(a: Complex<T>, penalty: Penalty<T>) -> Complex<T> {
    let rho = a.norm();
    if rho <= penalty.0 {
        return Complex::new(T::zero(), T::zero());
    }
    a * ((rho - penalty.0) / rho)
}

/// `sign(a) |(|a| - λ)|₊`.
pub fn shrink_real<T: Real>(a: T, penalty: Penalty<T>) -> T {
    let r = a.abs() - penalty.0;
    if r <= T::zero() {
        T::zero()
    } else {
        r.copysign(a)
    }
}

/// Exact minimizer of `λ Σ_m |a_m| + ½ Σ_m |a^obs_m - a_m|²` over the
/// multipole, which separates into one soft threshold per coefficient.
///
/// Conjugate symmetry of the complex basis is preserved because the
/// threshold commutes with conjugation and sign flips.
pub fn regularize_multipole<T: Real>(
    coeffs: &HarmonicCoefficients<T>,
    penalty: Penalty<T>,
    scheme: Scheme,
) -> Result<HarmonicCoefficients<T>> {
    if coeffs.basis() != scheme.basis() {
        return Err(Error::BasisMismatch {
            basis: coeffs.basis(),
            scheme,
        });
    }
    Ok(match scheme {
        Scheme::ComplexModulus => coeffs.map_complex(|a| shrink_complex(a, penalty)),
        Scheme::RealBasis => coeffs.map_real(|a| shrink_real(a, penalty)),
    })
}

/// `λ Σ_m |a_m| + ½ Σ_m |a^obs_m - a_m|²` summed over all `m = -ℓ..=ℓ`, with
/// the modulus taken in the scheme's basis.
pub fn objective<T: Real>(
    observed: &HarmonicCoefficients<T>,
    candidate: &HarmonicCoefficients<T>,
    penalty: Penalty<T>,
    scheme: Scheme,
) -> Result<T> {
    for c in [observed, candidate] {
        if c.basis() != scheme.basis() {
            return Err(Error::BasisMismatch {
                basis: c.basis(),
                scheme,
            });
        }
    }
    if observed.ell() != candidate.ell() {
        return Err(Error::Coefficients(format!(
            "degree mismatch {} vs {}",
            observed.ell(),
            candidate.ell()
        )));
    }
    let half = T::lit(0.5);
    Ok(match scheme {
        Scheme::ComplexModulus => {
            let (o, c) = (observed.as_complex().unwrap(), candidate.as_complex().unwrap());
            o.iter()
                .zip(c)
                .enumerate()
                .map(|(k, (o, c))| {
                    let term = penalty.0 * c.norm() + half * (o - c).norm_sqr();
                    if k == 0 {
                        term
                    } else {
                        term + term
                    }
                })
                .fold(T::zero(), |s, x| s + x)
        }
        Scheme::RealBasis => {
            let (o, c) = (observed.as_real().unwrap(), candidate.as_real().unwrap());
            o.iter()
                .zip(c)
                .map(|(&o, &c)| penalty.0 * c.abs() + half * (o - c) * (o - c))
                .fold(T::zero(), |s, x| s + x)
        }
    })
}

/// Probability that a regularized coefficient is nonzero.
///
/// For `m = 0` (either scheme, and every real-basis coefficient) this is
/// `Pr{|N(0, C)| > λ} = 2(1 - Φ(λ/√C))`; for complex `m ≠ 0` the modulus is
/// Rayleigh and the probability is `exp(-λ²/C)`.
pub fn atom_survival_probability<T: Real>(c_ell: T, penalty: Penalty<T>, m_zero: bool) -> Result<T> {
    if !(c_ell > T::zero()) || !c_ell.is_finite() {
        return Err(domain("C_l", "> 0", c_ell.as_f64()));
    }
    let nu = penalty.0 / c_ell.sqrt();
    Ok(if m_zero {
        T::lit(2.0) * normal_cdf(-nu)
    } else {
        (-nu * nu).exp()
    })
}

/// Penalty chosen so that `E‖T - T^reg‖²_{L²} ≤ ε`, with the quantities the
/// bound was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBound<T> {
    pub penalty: Penalty<T>,
    /// Expectation-level error budget the bound targets.
    pub epsilon: T,
    /// Smallest `ℓ*` with `Σ_{ℓ>ℓ*} (2ℓ+1) C_ℓ ≤ ε/4`; 0 when the whole
    /// spectrum fits the budget.
    pub ell_star: usize,
    /// Degree after which the thresholded-mass series is bounded by its
    /// integral remainder.
    pub ell_plus: usize,
    /// `min_{ℓ ≤ ℓ*} C_ℓ`, absent when `ℓ* = 0`.
    pub c_star: Option<T>,
    /// `sqrt(ε / (4(2ℓ⁺ + ℓ⁺²)))`.
    pub count_term: T,
    /// `(ε/2 - 4)/√(2π)`, absent when omitted by the fallback.
    pub tail_term: Option<T>,
    /// `(ε √(π C*) / (4√2 (2ℓ* + ℓ*²)))^{1/3}`, infinite when `ℓ* = 0`.
    pub low_term: T,
}

impl<T: Real> PenaltyBound<T> {
    pub fn lambda(&self) -> T {
        self.penalty.lambda()
    }

    /// True when the `(ε/2 - 4)/√(2π)` term was dropped.
    pub fn tail_term_omitted(&self) -> bool {
        self.tail_term.is_none()
    }
}

fn count_term<T: Real>(epsilon: T, ell: usize) -> T {
    let l = T::of(ell);
    (epsilon / (T::lit(4.0) * (T::lit(2.0) * l + l * l))).sqrt()
}

fn star_terms<T: Real>(epsilon: T, spec: &PowerSpectrum<T>) -> (usize, Option<T>, T) {
    let budget = epsilon / T::lit(4.0);
    let weighted: Vec<T> = spec.iter().map(|(l, c)| T::of(2 * l + 1) * c).collect();
    // tail[i] = Σ_{j ≥ i} weighted[j]
    let mut tail = vec![T::zero(); weighted.len() + 1];
    for i in (0..weighted.len()).rev() {
        tail[i] = tail[i + 1] + weighted[i];
    }
    let idx = (0..=weighted.len())
        .find(|&i| tail[i] <= budget)
        .unwrap_or(weighted.len());
    if idx == 0 {
        return (0, None, T::infinity());
    }
    let ell_star = spec.ells()[idx - 1];
    let c_star = spec.values()[..idx].iter().copied().fold(T::infinity(), T::min);
    let l = T::of(ell_star);
    let low = (epsilon * (T::PI() * c_star).sqrt() / (T::lit(4.0) * T::SQRT_2() * (T::lit(2.0) * l + l * l))).cbrt();
    (ell_star, Some(c_star), low)
}

/// Penalty `λ(ε)` guaranteeing `E‖T - T^reg‖² ≤ ε` for a field with the
/// given spectrum:
///
/// `λ = min{ sqrt(ε/(4(2ℓ⁺+ℓ⁺²))), (ε/2 - 4)/√(2π), (ε√(πC*)/(4√2(2ℓ*+ℓ*²)))^{1/3} }`.
///
/// `ℓ⁺` is the smallest degree `≥ 2` for which the spectrum's remainder
/// `Σ_{ℓ>ℓ⁺} (2ℓ+1) exp(-λ²/2C_ℓ)` is within `(4 + λ√(2π))/(2λ²)` at the
/// resulting λ; `ℓ⁺ = ℓ_max` always qualifies.
///
/// Fails with [`Error::VacuousPenaltyBound`] when `ε ≤ 8`, where the middle
/// term is not positive; see [`penalty_bound_without_tail_term`].
pub fn penalty_bound<T: Real>(epsilon: T, spec: &PowerSpectrum<T>) -> Result<PenaltyBound<T>> {
    check_epsilon(epsilon)?;
    let tail = (epsilon / T::lit(2.0) - T::lit(4.0)) / (T::lit(2.0) * T::PI()).sqrt();
    if tail <= T::zero() {
        return Err(Error::VacuousPenaltyBound {
            epsilon: epsilon.as_f64(),
            middle_term: tail.as_f64(),
        });
    }
    let (ell_star, c_star, low_term) = star_terms(epsilon, spec);
    let ell_max = spec.ell_max().max(2);
    let mut chosen = None;
    for ell_plus in 2..=ell_max {
        let count = count_term(epsilon, ell_plus);
        let lambda = count.min(tail).min(low_term);
        if lambda <= T::zero() {
            continue;
        }
        let l2 = lambda * lambda;
        let remainder = spec
            .iter()
            .filter(|&(l, _)| l > ell_plus)
            .map(|(l, c)| T::of(2 * l + 1) * (-l2 / (T::lit(2.0) * c)).exp())
            .fold(T::zero(), |s, x| s + x);
        let integral = (T::lit(4.0) + lambda * (T::lit(2.0) * T::PI()).sqrt()) / (T::lit(2.0) * l2);
        if remainder <= integral || ell_plus == ell_max {
            chosen = Some((ell_plus, count, lambda));
            break;
        }
    }
    let (ell_plus, count_term, lambda) = chosen.expect("l+ = l_max always qualifies");
    Ok(PenaltyBound {
        penalty: Penalty::new(lambda)?,
        epsilon,
        ell_star,
        ell_plus,
        c_star,
        count_term,
        tail_term: Some(tail),
        low_term,
    })
}

/// Fallback for budgets where the middle term is vacuous: takes `ℓ⁺ = ℓ_max`,
/// so the thresholded-mass remainder is empty and only the count and
/// low-degree terms constrain λ. The result is flagged via
/// [`PenaltyBound::tail_term_omitted`].
pub fn penalty_bound_without_tail_term<T: Real>(epsilon: T, spec: &PowerSpectrum<T>) -> Result<PenaltyBound<T>> {
    check_epsilon(epsilon)?;
    let (ell_star, c_star, low_term) = star_terms(epsilon, spec);
    let ell_plus = spec.ell_max().max(1);
    let count_term = count_term(epsilon, ell_plus);
    Ok(PenaltyBound {
        penalty: Penalty::new(count_term.min(low_term))?,
        epsilon,
        ell_star,
        ell_plus,
        c_star,
        count_term,
        tail_term: None,
        low_term,
    })
}

/// Penalty for which `Pr{‖T - T^reg‖ > ε} ≤ δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidencePenalty<T> {
    pub epsilon: T,
    pub delta: T,
    /// `ε² δ`, the expectation budget handed to [`penalty_bound`]; Markov's
    /// inequality turns it into the probability statement.
    pub expectation_budget: T,
    pub bound: PenaltyBound<T>,
}

impl<T: Real> ConfidencePenalty<T> {
    pub fn penalty(&self) -> Penalty<T> {
        self.bound.penalty
    }
}

/// [`penalty_bound`] at `ε' = ε²δ`, so that
/// `Pr{‖T - T^reg‖ > ε} ≤ E‖T - T^reg‖²/ε² ≤ δ`.
pub fn penalty_for_confidence<T: Real>(epsilon: T, delta: T, spec: &PowerSpectrum<T>) -> Result<ConfidencePenalty<T>> {
    check_epsilon(epsilon)?;
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(domain("delta", "in (0, 1]", delta.as_f64()));
    }
    let expectation_budget = epsilon * epsilon * delta;
    Ok(ConfidencePenalty {
        epsilon,
        delta,
        expectation_budget,
        bound: penalty_bound(expectation_budget, spec)?,
    })
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(domain("epsilon", "finite and > 0", epsilon.as_f64()));
    }
    Ok(())
}
