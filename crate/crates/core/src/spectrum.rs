//! Angular power spectra `C_ℓ` and their decay envelope `C_ℓ ≤ K ℓ^{-α}`, `α > 2`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::Real;

/// Decay envelope `C_ℓ ≤ K ℓ^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub constant: T,
    pub exponent: T,
}

impl<T: Real> Envelope<T> {
    pub fn new(constant: T, exponent: T) -> Result<Self> {
        if !(constant > T::zero()) || !constant.is_finite() {
            return Err(domain("envelope constant K", "> 0", constant.as_f64()));
        }
        if !(exponent > T::lit(2.0)) || !exponent.is_finite() {
            return Err(domain("decay exponent alpha", "> 2", exponent.as_f64()));
        }
        Ok(Self { constant, exponent })
    }

    /// Smallest `K` for which every point satisfies the envelope at exponent `α`.
    pub fn fit(points: &[(usize, T)], exponent: T) -> Result<Self> {
        let k = points
            .iter()
            .filter(|(ell, _)| *ell > 0)
            .map(|&(ell, c)| c * T::of(ell).powf(exponent))
            .fold(T::zero(), T::max);
        Self::new(k, exponent)
    }

    pub fn bound(&self, ell: usize) -> T {
        self.constant * T::of(ell).powf(-self.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    NotPositive,
    AboveEnvelope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub ell: usize,
    pub c_ell: f64,
    pub bound: f64,
    pub kind: ViolationKind,
}

/// Lists every multipole breaking positivity or the envelope. An empty list
/// means the spectrum is admissible.
pub fn validate<T: Real>(points: &[(usize, T)], envelope: &Envelope<T>) -> Result<Vec<Violation>> {
    if points.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    // relative slack so values written out as K ℓ^{-α} and read back still pass
    let slack = T::one() + T::lit(8.0) * T::epsilon();
    let mut out = Vec::new();
    for &(ell, c) in points {
        let bound = envelope.bound(ell);
        let kind = if !(c > T::zero()) || !c.is_finite() {
            ViolationKind::NotPositive
        } else if c > bound * slack {
            ViolationKind::AboveEnvelope
        } else {
            continue;
        };
        out.push(Violation {
            ell,
            c_ell: c.as_f64(),
            bound: bound.as_f64(),
            kind,
        });
    }
    Ok(out)
}

/// Validated angular power spectrum over a strictly increasing set of multipoles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum<T> {
    ells: Vec<usize>,
    values: Vec<T>,
    envelope: Envelope<T>,
}

impl<T: Real> PowerSpectrum<T> {
    pub fn new(points: Vec<(usize, T)>, envelope: Envelope<T>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::SpectrumParse {
                line: 0,
                message: "multipoles must be strictly increasing".into(),
            });
        }
        let violations = validate(&points, &envelope)?;
        if !violations.is_empty() {
            return Err(Error::SpectrumEnvelope(violations));
        }
        let (ells, values) = points.into_iter().unzip();
        Ok(Self { ells, values, envelope })
    }

    /// Contiguous multipoles `ell_min, ell_min + 1, ...`.
    pub fn contiguous(ell_min: usize, values: Vec<T>, envelope: Envelope<T>) -> Result<Self> {
        let points = values.into_iter().enumerate().map(|(i, c)| (ell_min + i, c)).collect();
        Self::new(points, envelope)
    }

    /// Builds a spectrum whose envelope constant is fitted to the data at the
    /// given exponent. Positivity is still enforced.
    pub fn with_fitted_envelope(points: Vec<(usize, T)>, exponent: T) -> Result<Self> {
        let envelope = Envelope::fit(&points, exponent)?;
        Self::new(points, envelope)
    }

    pub fn envelope(&self) -> Envelope<T> {
        self.envelope
    }

    pub fn ells(&self) -> &[usize] {
        &self.ells
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ells.is_empty()
    }

    pub fn ell_min(&self) -> usize {
        self.ells[0]
    }

    pub fn ell_max(&self) -> usize {
        *self.ells.last().unwrap()
    }

    pub fn c_ell(&self, ell: usize) -> Option<T> {
        self.ells.binary_search(&ell).ok().map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.ells.iter().copied().zip(self.values.iter().copied())
    }

    /// Pointwise field variance `Σ (2ℓ+1) C_ℓ / 4π`.
    pub fn total_variance(&self) -> T {
        self.iter()
            .map(|(l, c)| T::of(2 * l + 1) * c)
            .fold(T::zero(), |a, b| a + b)
            / (T::lit(4.0) * T::PI())
    }
}

/// Power-law model `C_ℓ = K ℓ^{-α}` for `ℓ = 1..=ell_max`.
pub fn power_law<T: Real>(constant: T, exponent: T, ell_max: usize) -> Result<PowerSpectrum<T>> {
    let envelope = Envelope::new(constant, exponent)?;
    if ell_max < 1 {
        return Err(domain("ell_max", ">= 1", ell_max as f64));
    }
    let values = (1..=ell_max).map(|l| envelope.bound(l)).collect();
    PowerSpectrum::contiguous(1, values, envelope)
}

/// One multipole of a tabulated spectrum with an optional reference kurtosis
/// at the North Pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub ell: usize,
    pub c_ell: f64,
    pub kappa_ref: Option<f64>,
}

/// CMB-like spectrum values with the published North-Pole kurtosis at `λ = 1`.
pub fn kurtosis_reference_table() -> Vec<SpectrumRow> {
    const ROWS: [(usize, f64, f64); 9] = [
        (10, 48.20, 3.50),
        (20, 13.7, 4.08),
        (30, 7.17, 4.65),
        (40, 4.8, 5.19),
        (50, 3.7, 5.65),
        (60, 2.9, 6.21),
        (70, 2.4, 6.76),
        (80, 2.1, 7.22),
        (200, 0.76, 15.39),
    ];
    ROWS.iter()
        .map(|&(ell, c_ell, k)| SpectrumRow {
            ell,
            c_ell,
            kappa_ref: Some(k),
        })
        .collect()
}

/// Reads `ell,c_ell` CSV (header required, strictly increasing `ell`).
/// Errors carry the 1-based line number of the offending record.
pub fn read_spectrum_csv<R: Read>(reader: R) -> Result<Vec<(usize, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::SpectrumParse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "ell" || &headers[1] != "c_ell" {
        return Err(Error::SpectrumParse {
            line: 1,
            message: format!(
                "expected header `ell,c_ell`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out: Vec<(usize, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::SpectrumParse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| Error::SpectrumParse { line, message };
        if rec.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", rec.len())));
        }
        let ell: usize = rec[0]
            .parse()
            .map_err(|_| bad(format!("invalid multipole `{}`", &rec[0])))?;
        let c: f64 = rec[1]
            .parse()
            .map_err(|_| bad(format!("invalid c_ell `{}`", &rec[1])))?;
        if !c.is_finite() {
            return Err(bad(format!("c_ell must be finite, got {c}")));
        }
        if let Some(&(prev, _)) = out.last() {
            if ell <= prev {
                return Err(bad(format!("multipole {ell} does not increase past {prev}")));
            }
        }
        out.push((ell, c));
    }
    if out.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    Ok(out)
}

/// Writes `ell,c_ell` CSV.
pub fn write_spectrum_csv<T: Real, W: std::io::Write>(spec: &PowerSpectrum<T>, mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writeln!(w, "ell,c_ell").map_err(io)?;
    for (l, c) in spec.iter() {
        writeln!(w, "{l},{c:e}").map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(table: &[SpectrumRow]) -> Vec<(usize, f64)> {
        table.iter().map(|r| (r.ell, r.c_ell)).collect()
    }

    #[test]
    fn power_law_values_and_validation() {
        let s = power_law(1.0_f64, 3.0, 3).unwrap();
        assert_eq!(s.values(), &[1.0, 0.125, 1.0 / 27.0]);
        assert!(power_law(1.0_f64, 2.0, 3).is_err());
        assert!(power_law(1.0_f64, 3.0, 0).is_err());
        for alpha in [2.01, 2.5, 3.0, 4.0] {
            let s = power_law(2.0_f64, alpha, 500).unwrap();
            let pts: Vec<_> = s.iter().collect();
            assert!(validate(&pts, &s.envelope()).unwrap().is_empty());
        }
    }

    #[test]
    fn slow_decay_violates_envelope() {
        let pts: Vec<_> = (1..=10).map(|l| (l, 1.0 / l as f64)).collect();
        let env = Envelope::new(1.0, 3.0).unwrap();
        let v = validate(&pts, &env).unwrap();
        assert_eq!(
            v.iter().map(|v| v.ell).collect::<Vec<_>>(),
            (2..=10).collect::<Vec<_>>()
        );
        assert!(v.iter().all(|v| v.kind == ViolationKind::AboveEnvelope));
        assert!(matches!(PowerSpectrum::new(pts, env), Err(Error::SpectrumEnvelope(_))));
    }

    #[test]
    fn nonpositive_and_empty() {
        let env = Envelope::new(1.0, 3.0).unwrap();
        let v = validate(&[(1, 0.5), (2, 0.0), (3, -1.0)], &env).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.kind == ViolationKind::NotPositive));
        assert_eq!(validate::<f64>(&[], &env), Err(Error::EmptySpectrum));
    }

    #[test]
    fn reference_table_is_golden() {
        let t = kurtosis_reference_table();
        assert_eq!(t.len(), 9);
        assert_eq!((t[0].ell, t[0].c_ell, t[0].kappa_ref), (10, 48.20, Some(3.50)));
        assert_eq!((t[8].ell, t[8].c_ell, t[8].kappa_ref), (200, 0.76, Some(15.39)));
        let ells: Vec<_> = t.iter().map(|r| r.ell).collect();
        assert_eq!(ells, vec![10, 20, 30, 40, 50, 60, 70, 80, 200]);
    }

    #[test]
    fn reference_table_envelope() {
        // max_ℓ C_ℓ ℓ^2.1 is attained at ℓ = 200: 0.76 · 200^2.1 ≈ 5.16e4, so a
        // constant of 5000 is too small for every row.
        let pts = points(&kurtosis_reference_table());
        let env = Envelope::new(5000.0, 2.1).unwrap();
        assert_eq!(validate(&pts, &env).unwrap().len(), 9);
        let env = Envelope::new(6.0e4, 2.1).unwrap();
        assert!(validate(&pts, &env).unwrap().is_empty());
        let fitted = Envelope::fit(&pts, 2.1).unwrap();
        assert!((fitted.constant - 0.76 * 200f64.powf(2.1)).abs() < 1e-8);
    }

    #[test]
    fn power_law_is_not_the_reference_table() {
        let s = power_law(48.2_f64, 2.1, 10).unwrap();
        let c10 = s.c_ell(10).unwrap();
        assert!((c10 - 48.2 * 10f64.powf(-2.1)).abs() < 1e-15);
        assert!((c10 - 0.3829).abs() < 1e-3);
    }

    #[test]
    fn total_variance_converges() {
        for alpha in [3.0, 2.01] {
            let a: f64 = power_law(1.0, alpha, 2000).unwrap().total_variance();
            let b: f64 = power_law(1.0, alpha, 4000).unwrap().total_variance();
            assert!(a.is_finite() && b >= a);
            // tail beyond ℓ is bounded by ∫ 2x^{1-α}/4π ≈ ℓ^{2-α}/(2π(α-2))
            let tail = 2000f64.powf(2.0 - alpha) / (2.0 * std::f64::consts::PI * (alpha - 2.0));
            assert!(b - a <= tail);
        }
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let s = power_law(3.0_f64, 2.5, 6).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&s, &mut buf).unwrap();
        let pts = read_spectrum_csv(buf.as_slice()).unwrap();
        let back = PowerSpectrum::new(pts, s.envelope()).unwrap();
        assert_eq!(back.ells(), s.ells());

        let err = read_spectrum_csv("ell,c_ell\n1,0.5\n3,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::SpectrumParse { line: 3, .. }), "{err:?}");
        let err = read_spectrum_csv("ell,c_ell\n2,0.5\n2,0.4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::SpectrumParse { line: 3, .. }));
        let err = read_spectrum_csv("l,c\n2,0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::SpectrumParse { line: 1, .. }));
        assert_eq!(
            read_spectrum_csv("ell,c_ell\n".as_bytes()).unwrap_err(),
            Error::EmptySpectrum
        );
    }
}
