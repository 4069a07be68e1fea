//! Gaussian isotropic harmonic coefficients for one multipole, basis changes,
//! and pointwise field synthesis.

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::PointHarmonics;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Complex,
    Real,
}

/// Coefficients of a single multipole `T_ℓ`.
///
/// Complex basis stores `a_{ℓm}` for `m = 0..=ℓ`; negative orders follow from
/// `a_{ℓ,-m} = (-1)^m conj(a_{ℓm})` and `a_{ℓ0}` is real. Real basis stores
/// `a^R_{ℓm}` for `m = -ℓ..=ℓ` (index `m + ℓ`).
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients<T> {
    ell: usize,
    data: Coefficients<T>,
}

#[derive(Debug, Clone, PartialEq)]
enum Coefficients<T> {
    Complex(Vec<Complex<T>>),
    Real(Vec<T>),
}

impl<T: Real> HarmonicCoefficients<T> {
    pub fn complex(ell: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != ell + 1 {
            return Err(Error::Coefficients(format!(
                "complex basis needs {} entries for l={ell}, got {}",
                ell + 1,
                coeffs.len()
            )));
        }
        if coeffs[0].im != T::zero() {
            return Err(Error::Coefficients(format!(
                "a_(l,0) must be real, imaginary part {}",
                coeffs[0].im
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Coefficients("non-finite coefficient".into()));
        }
        Ok(Self {
            ell,
            data: Coefficients::Complex(coeffs),
        })
    }

    pub fn real(ell: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != 2 * ell + 1 {
            return Err(Error::Coefficients(format!(
                "real basis needs {} entries for l={ell}, got {}",
                2 * ell + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Coefficients("non-finite coefficient".into()));
        }
        Ok(Self {
            ell,
            data: Coefficients::Real(coeffs),
        })
    }

    pub fn zeros(ell: usize, basis: Basis) -> Self {
        match basis {
            Basis::Complex => Self {
                ell,
                data: Coefficients::Complex(vec![Complex::new(T::zero(), T::zero()); ell + 1]),
            },
            Basis::Real => Self {
                ell,
                data: Coefficients::Real(vec![T::zero(); 2 * ell + 1]),
            },
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn basis(&self) -> Basis {
        match self.data {
            Coefficients::Complex(_) => Basis::Complex,
            Coefficients::Real(_) => Basis::Real,
        }
    }

    /// Stored complex coefficients `m = 0..=ℓ`, if in the complex basis.
    pub fn as_complex(&self) -> Option<&[Complex<T>]> {
        match &self.data {
            Coefficients::Complex(v) => Some(v),
            Coefficients::Real(_) => None,
        }
    }

    /// Stored real coefficients `m = -ℓ..=ℓ`, if in the real basis.
    pub fn as_real(&self) -> Option<&[T]> {
        match &self.data {
            Coefficients::Real(v) => Some(v),
            Coefficients::Complex(_) => None,
        }
    }

    /// Complex-basis coefficient `a_{ℓm}` for any `|m| ≤ ℓ`, converting if needed.
    pub fn coeff(&self, m: i64) -> Result<Complex<T>> {
        let k = m.unsigned_abs() as usize;
        if k > self.ell {
            return Err(Error::OrderOutOfRange { ell: self.ell, m });
        }
        let a = match &self.data {
            Coefficients::Complex(v) => v[k],
            Coefficients::Real(v) => real_to_complex_at(v, self.ell, k),
        };
        Ok(if m < 0 { mirror(k, a) } else { a })
    }

    /// Real-basis coefficient `a^R_{ℓm}` for any `|m| ≤ ℓ`, converting if needed.
    pub fn real_coeff(&self, m: i64) -> Result<T> {
        let k = m.unsigned_abs() as usize;
        if k > self.ell {
            return Err(Error::OrderOutOfRange { ell: self.ell, m });
        }
        Ok(match &self.data {
            Coefficients::Real(v) => v[(m + self.ell as i64) as usize],
            Coefficients::Complex(v) => {
                let a = v[k];
                if m == 0 {
                    a.re
                } else if m > 0 {
                    T::SQRT_2() * a.re
                } else {
                    -T::SQRT_2() * a.im
                }
            }
        })
    }

    /// Squared L² norm of the multipole, `Σ_{m=-ℓ}^{ℓ} |a_{ℓm}|²`.
    pub fn norm_sqr(&self) -> T {
        match &self.data {
            Coefficients::Complex(v) => {
                v[0].norm_sqr() + T::lit(2.0) * v[1..].iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, x| s + x)
            }
            Coefficients::Real(v) => v.iter().map(|&a| a * a).fold(T::zero(), |s, x| s + x),
        }
    }

    /// Squared distance `Σ_m |a_{ℓm} - b_{ℓm}|²`, identical in both bases.
    pub fn distance_sqr(&self, other: &Self) -> Result<T> {
        if self.ell != other.ell {
            return Err(Error::Coefficients(format!(
                "degree mismatch {} vs {}",
                self.ell, other.ell
            )));
        }
        let other = basis_convert(other, self.basis());
        Ok(match (&self.data, &other.data) {
            (Coefficients::Complex(a), Coefficients::Complex(b)) => {
                (a[0] - b[0]).norm_sqr()
                    + T::lit(2.0)
                        * a[1..]
                            .iter()
                            .zip(&b[1..])
                            .map(|(x, y)| (x - y).norm_sqr())
                            .fold(T::zero(), |s, x| s + x)
            }
            (Coefficients::Real(a), Coefficients::Real(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (*x - *y) * (*x - *y))
                .fold(T::zero(), |s, x| s + x),
            _ => unreachable!(),
        })
    }

    pub(crate) fn map_complex(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        match &self.data {
            Coefficients::Complex(v) => Self {
                ell: self.ell,
                data: Coefficients::Complex(v.iter().map(|&a| f(a)).collect()),
            },
            Coefficients::Real(_) => self.clone(),
        }
    }

    pub(crate) fn map_real(&self, f: impl Fn(T) -> T) -> Self {
        match &self.data {
            Coefficients::Real(v) => Self {
                ell: self.ell,
                data: Coefficients::Real(v.iter().map(|&a| f(a)).collect()),
            },
            Coefficients::Complex(_) => self.clone(),
        }
    }
}

// a_{ℓk} = (a^R_{ℓk} - i a^R_{ℓ,-k}) / √2 for k > 0
fn real_to_complex_at<T: Real>(v: &[T], ell: usize, k: usize) -> Complex<T> {
    if k == 0 {
        return Complex::new(v[ell], T::zero());
    }
    Complex::new(v[ell + k] / T::SQRT_2(), -v[ell - k] / T::SQRT_2())
}

#[inline]
fn mirror<T: Real>(k: usize, a: Complex<T>) -> Complex<T> {
    if k.is_multiple_of(2) {
        a.conj()
    } else {
        -a.conj()
    }
}

/// Re-expresses the coefficients in the target basis; the synthesized field
/// is unchanged.
pub fn basis_convert<T: Real>(coeffs: &HarmonicCoefficients<T>, target: Basis) -> HarmonicCoefficients<T> {
    let ell = coeffs.ell;
    match (&coeffs.data, target) {
        (Coefficients::Complex(_), Basis::Complex) | (Coefficients::Real(_), Basis::Real) => coeffs.clone(),
        (Coefficients::Complex(_), Basis::Real) => HarmonicCoefficients {
            ell,
            data: Coefficients::Real(
                (-(ell as i64)..=ell as i64)
                    .map(|m| coeffs.real_coeff(m).unwrap())
                    .collect(),
            ),
        },
        (Coefficients::Real(v), Basis::Complex) => HarmonicCoefficients {
            ell,
            data: Coefficients::Complex((0..=ell).map(|k| real_to_complex_at(v, ell, k)).collect()),
        },
    }
}

/// Seed of a reproducible sample path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Counter-keyed generator for one coefficient draw. The 256-bit ChaCha
    /// key is `(seed, stream, replicate, ℓ)` and the ChaCha stream id is the
    /// order `m`, so every `(replicate, ℓ, m)` gets an independent stream and
    /// no draw depends on evaluation order.
    pub(crate) fn generator(self, replicate: u64, ell: usize, m: usize) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        key[16..24].copy_from_slice(&replicate.to_le_bytes());
        key[24..].copy_from_slice(&(ell as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(m as u64);
        rng
    }
}

/// Draws `T_ℓ`'s coefficients with variance `C_ℓ`. Same as
/// [`sample_replicate`] with replicate index 0.
pub fn sample_multipole<T: Real>(ell: usize, c_ell: T, basis: Basis, seed: RngSeed) -> Result<HarmonicCoefficients<T>> {
    sample_replicate(ell, c_ell, basis, seed, 0)
}

/// Draws replicate `replicate` of `T_ℓ`.
///
/// Complex basis: `a_{ℓ0} ~ N(0, C)`, and for `m > 0` the real and imaginary
/// parts are independent `N(0, C/2)`. Real basis: every `a^R_{ℓm} ~ N(0, C)`.
pub fn sample_replicate<T: Real>(
    ell: usize,
    c_ell: T,
    basis: Basis,
    seed: RngSeed,
    replicate: u64,
) -> Result<HarmonicCoefficients<T>> {
    if !(c_ell > T::zero()) || !c_ell.is_finite() {
        return Err(domain("C_l", "> 0", c_ell.as_f64()));
    }
    let sd = c_ell.sqrt();
    let draw = |m: usize, n: usize| -> [f64; 2] {
        let mut rng = seed.generator(replicate, ell, m);
        let mut out = [0.0; 2];
        for slot in out.iter_mut().take(n) {
            *slot = rng.sample(StandardNormal);
        }
        out
    };
    Ok(match basis {
        Basis::Complex => {
            let half = sd / T::SQRT_2();
            let v = (0..=ell)
                .map(|m| {
                    if m == 0 {
                        Complex::new(sd * T::lit(draw(0, 1)[0]), T::zero())
                    } else {
                        let [x, y] = draw(m, 2);
                        Complex::new(half * T::lit(x), half * T::lit(y))
                    }
                })
                .collect();
            HarmonicCoefficients {
                ell,
                data: Coefficients::Complex(v),
            }
        }
        Basis::Real => {
            // order m ≥ 0 uses ChaCha stream m, order -m uses stream ℓ + m
            let v = (-(ell as i64)..=ell as i64)
                .map(|m| {
                    let stream = if m >= 0 {
                        m as usize
                    } else {
                        ell + m.unsigned_abs() as usize
                    };
                    sd * T::lit(draw(stream, 1)[0])
                })
                .collect();
            HarmonicCoefficients {
                ell,
                data: Coefficients::Real(v),
            }
        }
    })
}

/// `T_ℓ(θ, φ) = Σ_m a_{ℓm} Y_{ℓm}(θ, φ)`.
pub fn eval_field<T: Real>(coeffs: &HarmonicCoefficients<T>, theta: T, phi: T) -> T {
    eval_field_at(coeffs, &PointHarmonics::new(coeffs.ell, theta, phi))
}

/// [`eval_field`] with precomputed harmonics (must have the same degree).
pub fn eval_field_at<T: Real>(coeffs: &HarmonicCoefficients<T>, h: &PointHarmonics<T>) -> T {
    debug_assert_eq!(coeffs.ell, h.ell());
    match &coeffs.data {
        Coefficients::Complex(v) => {
            // a_{-m} Y_{-m} = conj(a_m Y_m), so the sum is real term by term
            let mut s = v[0].re * h.complex_at(0).re;
            for (k, a) in v.iter().enumerate().skip(1) {
                s += T::lit(2.0) * (a * h.complex_at(k)).re;
            }
            s
        }
        Coefficients::Real(v) => {
            let ell = coeffs.ell as i64;
            v.iter()
                .enumerate()
                .map(|(i, &a)| a * h.real(i as i64 - ell).unwrap())
                .fold(T::zero(), |s, x| s + x)
        }
    }
}
