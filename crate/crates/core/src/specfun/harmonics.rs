use num_complex::Complex;

use super::legendre::{schmidt_legendre, schmidt_legendre_table};
use crate::error::{Error, Result};
use crate::Real;

/// Every order of the degree-ℓ harmonics at one point `(θ, φ)`.
///
/// Conventions: orthonormal complex harmonics with the Condon-Shortley phase,
/// `Y_{ℓ,-m} = (-1)^m conj(Y_{ℓm})`; real harmonics
/// `Y^R_{ℓm} = √2 Re Y_{ℓm}` (m > 0), `Y^R_{ℓ,-m} = √2 Im Y_{ℓm}` (m > 0),
/// `Y^R_{ℓ0} = Y_{ℓ0}`.
#[derive(Debug, Clone)]
pub struct PointHarmonics<T> {
    ell: usize,
    norm: T,
    unit: Vec<T>,
    cos_m: Vec<T>,
    sin_m: Vec<T>,
}

impl<T: Real> PointHarmonics<T> {
    pub fn new(ell: usize, theta: T, phi: T) -> Self {
        let unit = schmidt_legendre_table(ell, theta.cos(), theta.sin());
        let (cos_m, sin_m) = (0..=ell)
            .map(|m| {
                let a = T::of(m) * phi;
                (a.cos(), a.sin())
            })
            .unzip();
        Self {
            ell,
            norm: degree_norm(ell),
            unit,
            cos_m,
            sin_m,
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `sqrt((2ℓ+1)/4π)`, the axial value `Y_{ℓ0}(0, ·)`.
    pub fn norm(&self) -> T {
        self.norm
    }

    /// `(2ℓ+1)/4π = Σ_m |Y_{ℓm}|²` at every point.
    pub fn degree_sum(&self) -> T {
        self.norm * self.norm
    }

    fn check(&self, m: i64) -> Result<usize> {
        let k = m.unsigned_abs() as usize;
        if k > self.ell {
            return Err(Error::OrderOutOfRange { ell: self.ell, m });
        }
        Ok(k)
    }

    /// `Y_{ℓm}(θ, φ)`, any `|m| ≤ ℓ`.
    pub fn complex(&self, m: i64) -> Result<Complex<T>> {
        let k = self.check(m)?;
        let y = self.complex_at(k);
        Ok(if m < 0 { conj_sym(k, y) } else { y })
    }

    /// `Y_{ℓm}` for `m = k ≥ 0`; panics if `k > ℓ`.
    pub fn complex_at(&self, k: usize) -> Complex<T> {
        if k == 0 {
            return Complex::new(self.norm * self.unit[0], T::zero());
        }
        let amp = cs_sign::<T>(k) * self.norm * self.unit[k] / T::SQRT_2();
        Complex::new(amp * self.cos_m[k], amp * self.sin_m[k])
    }

    /// `Y^R_{ℓm}(θ, φ)`, any `|m| ≤ ℓ`.
    pub fn real(&self, m: i64) -> Result<T> {
        let k = self.check(m)?;
        Ok(self.norm * self.unit_real_at(m, k))
    }

    /// Real harmonic divided by `sqrt((2ℓ+1)/4π)`, so that it equals
    /// `P_ℓ(cos θ)` for `m = 0` and the squares sum to one.
    pub fn unit_real(&self, m: i64) -> Result<T> {
        let k = self.check(m)?;
        Ok(self.unit_real_at(m, k))
    }

    fn unit_real_at(&self, m: i64, k: usize) -> T {
        if k == 0 {
            return self.unit[0];
        }
        let trig = if m > 0 { self.cos_m[k] } else { self.sin_m[k] };
        cs_sign::<T>(k) * self.unit[k] * trig
    }

    /// `|Y_{ℓm}|²` for `m ≥ 0` (equal for `-m`); independent of φ.
    pub fn abs_sq(&self, k: usize) -> T {
        let u = self.unit[k];
        let w = if k == 0 { T::one() } else { T::lit(0.5) };
        self.norm * self.norm * u * u * w
    }

    /// Real harmonics in order `m = -ℓ..=ℓ`.
    pub fn real_all(&self) -> Vec<T> {
        (-(self.ell as i64)..=self.ell as i64)
            .map(|m| self.norm * self.unit_real_at(m, m.unsigned_abs() as usize))
            .collect()
    }

    /// Unit-normalized real harmonics in order `m = -ℓ..=ℓ`.
    pub fn unit_real_all(&self) -> Vec<T> {
        (-(self.ell as i64)..=self.ell as i64)
            .map(|m| self.unit_real_at(m, m.unsigned_abs() as usize))
            .collect()
    }
}

/// Orthonormal complex spherical harmonic `Y_{ℓm}(θ, φ)`.
pub fn sph_harm_complex<T: Real>(ell: usize, m: i64, theta: T, phi: T) -> Result<Complex<T>> {
    let k = m.unsigned_abs() as usize;
    if k > ell {
        return Err(Error::OrderOutOfRange { ell, m });
    }
    let u = schmidt_legendre(ell, k, theta.cos(), theta.sin());
    let norm = degree_norm::<T>(ell);
    if k == 0 {
        return Ok(Complex::new(norm * u, T::zero()));
    }
    let amp = cs_sign::<T>(k) * norm * u / T::SQRT_2();
    let a = T::of(k) * phi;
    let y = Complex::new(amp * a.cos(), amp * a.sin());
    Ok(if m < 0 { conj_sym(k, y) } else { y })
}

/// Real orthonormal spherical harmonic `Y^R_{ℓm}(θ, φ)`.
pub fn sph_harm_real<T: Real>(ell: usize, m: i64, theta: T, phi: T) -> Result<T> {
    let k = m.unsigned_abs() as usize;
    if k > ell {
        return Err(Error::OrderOutOfRange { ell, m });
    }
    let u = schmidt_legendre(ell, k, theta.cos(), theta.sin());
    let norm = degree_norm::<T>(ell);
    if k == 0 {
        return Ok(norm * u);
    }
    let a = T::of(k) * phi;
    let trig = if m > 0 { a.cos() } else { a.sin() };
    Ok(cs_sign::<T>(k) * norm * u * trig)
}

pub(crate) fn degree_norm<T: Real>(ell: usize) -> T {
    (T::of(2 * ell + 1) / (T::lit(4.0) * T::PI())).sqrt()
}

#[inline]
fn cs_sign<T: Real>(k: usize) -> T {
    if k.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

// Y_{ℓ,-k} = (-1)^k conj(Y_{ℓk})
#[inline]
fn conj_sym<T: Real>(k: usize, y: Complex<T>) -> Complex<T> {
    y.conj() * cs_sign::<T>(k)
}
