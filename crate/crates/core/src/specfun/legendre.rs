use crate::error::{domain, Result};
use crate::Real;

/// Legendre polynomial `P_ℓ(x)` by the Bonnet three-term recurrence.
pub fn legendre_p<T: Real>(ell: usize, x: T) -> Result<T> {
    if !(x.abs() <= T::one()) {
        return Err(domain("Legendre argument x", "|x| <= 1", x.as_f64()));
    }
    Ok(bonnet(ell, x))
}

pub(crate) fn bonnet<T: Real>(ell: usize, x: T) -> T {
    let (mut p0, mut p1) = (T::one(), x);
    if ell == 0 {
        return p0;
    }
    for l in 2..=ell {
        let p2 = (T::of(2 * l - 1) * x * p1 - T::of(l - 1) * p0) / T::of(l);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Schmidt semi-normalized associated Legendre function
/// `P̂_ℓ^m = sqrt((2-δ_{m0}) (ℓ-m)!/(ℓ+m)!) P_ℓ^m(cos θ)` (no Condon-Shortley phase),
/// evaluated from `cos θ` and `sin θ`.
///
/// The normalization is folded into the recurrence, so the values stay O(1)
/// for any degree; `Σ_m P̂_ℓ^m(x)² = 1`.
pub fn schmidt_legendre<T: Real>(ell: usize, m: usize, cos_theta: T, sin_theta: T) -> T {
    debug_assert!(m <= ell);
    let mut pmm = sectoral(m, sin_theta);
    if ell == m {
        return pmm;
    }
    let mut pm1 = T::of(2 * m + 1).sqrt() * cos_theta * pmm;
    for l in (m + 2)..=ell {
        let next = step(l, m, cos_theta, pm1, pmm);
        pmm = pm1;
        pm1 = next;
    }
    pm1
}

/// All orders `m = 0..=ℓ` of [`schmidt_legendre`] at one point, `O(ℓ²)`.
pub fn schmidt_legendre_table<T: Real>(ell: usize, cos_theta: T, sin_theta: T) -> Vec<T> {
    let mut out = Vec::with_capacity(ell + 1);
    let mut diag = T::one();
    for m in 0..=ell {
        if m == 1 {
            diag = sin_theta;
        } else if m > 1 {
            diag = diag * sin_theta * (T::of(2 * m - 1) / T::of(2 * m)).sqrt();
        }
        if m == ell {
            out.push(diag);
            continue;
        }
        let (mut p0, mut p1) = (diag, T::of(2 * m + 1).sqrt() * cos_theta * diag);
        for l in (m + 2)..=ell {
            let p2 = step(l, m, cos_theta, p1, p0);
            p0 = p1;
            p1 = p2;
        }
        out.push(p1);
    }
    out
}

fn sectoral<T: Real>(m: usize, sin_theta: T) -> T {
    let mut p = T::one();
    for k in 1..=m {
        p = if k == 1 {
            sin_theta
        } else {
            p * sin_theta * (T::of(2 * k - 1) / T::of(2 * k)).sqrt()
        };
    }
    p
}

#[inline]
fn step<T: Real>(l: usize, m: usize, x: T, p_prev: T, p_prev2: T) -> T {
    let a = T::of(2 * l - 1) * x * p_prev;
    let b = if m == 0 {
        T::of(l - 1)
    } else {
        T::of((l - 1) * (l - 1) - m * m).sqrt()
    };
    let denom = if m == 0 { T::of(l) } else { T::of(l * l - m * m).sqrt() };
    (a - b * p_prev2) / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_and_low_order() {
        for ell in 0..40 {
            assert_eq!(legendre_p(ell, 1.0_f64).unwrap(), 1.0);
        }
        assert!((legendre_p(2, 0.5_f64).unwrap() + 0.125).abs() < 1e-16);
        assert!(legendre_p(3, 1.5_f64).is_err());
        assert!(legendre_p(3, f64::NAN).is_err());
    }

    #[test]
    fn table_matches_single_order() {
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let table = schmidt_legendre_table(25, c, s);
        for (m, v) in table.iter().enumerate() {
            assert!((v - schmidt_legendre(25, m, c, s)).abs() < 1e-14);
        }
        assert_eq!(table[0], bonnet(25, c));
    }

    #[test]
    fn unit_sum_at_high_degree() {
        for &theta in &[0.01_f64, 0.7, 1.5, 2.9] {
            let t = schmidt_legendre_table(2000, theta.cos(), theta.sin());
            let s: f64 = t.iter().map(|v| v * v).sum();
            assert!((s - 1.0).abs() < 1e-10, "theta={theta} sum={s}");
        }
    }

    #[test]
    fn explicit_low_degree_functions() {
        let theta = 0.9_f64;
        let (x, s) = (theta.cos(), theta.sin());
        // P̂_2^1 = √3 x s, P̂_2^2 = (√3/2) s²
        assert!((schmidt_legendre(2, 1, x, s) - 3f64.sqrt() * x * s).abs() < 1e-15);
        assert!((schmidt_legendre(2, 2, x, s) - 3f64.sqrt() / 2.0 * s * s).abs() < 1e-15);
        // P̂_3^1 = sqrt(1/6) · (3/2)(5x² - 1) s
        let want = (1.0_f64 / 6.0).sqrt() * 1.5 * (5.0 * x * x - 1.0) * s;
        assert!((schmidt_legendre(3, 1, x, s) - want).abs() < 1e-15);
    }
}
