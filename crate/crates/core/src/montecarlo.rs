//! Monte Carlo estimators: sample, regularize, and average.
//!
//! Replicates are split into a fixed number of contiguous blocks. Blocks run
//! in parallel, each accumulating its sums sequentially, and are combined in
//! block order, so results are bitwise identical for any thread count.
//! Standard errors come from the delete-one-block jackknife.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regularize::{regularize_multipole, Penalty, Scheme};
use crate::sampling::{eval_field_at, sample_replicate, HarmonicCoefficients, RngSeed};
use crate::specfun::PointHarmonics;

pub const DEFAULT_BLOCKS: usize = 64;
/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.96;

/// Monte Carlo estimate of an expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Number of draws behind the estimate.
    pub n: u64,
}

impl McEstimate {
    /// Sample mean and `s/√n` of independent draws.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 {
            return Err(Error::Config(format!("need at least 2 samples, got {n}")));
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Ok(Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n: n as u64,
        })
    }

    /// `(mean - value) / std_error`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value) / self.std_error
    }

    /// `|mean - value| ≤ k · std_error`.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Monte Carlo run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub replicates: u64,
    pub seed: RngSeed,
    /// `(ℓ, C_ℓ)` pairs sampled in every replicate.
    pub multipoles: Vec<(usize, f64)>,
    pub lambda: f64,
    pub scheme: Scheme,
    /// `(θ, φ)` points for field moments.
    pub eval_points: Vec<(f64, f64)>,
    /// Jackknife blocks; also the unit of parallel work.
    pub blocks: usize,
}

impl McConfig {
    /// 1000 replicates, a single evaluation point at the North Pole and
    /// [`DEFAULT_BLOCKS`] blocks.
    pub fn new(seed: RngSeed, multipoles: Vec<(usize, f64)>, lambda: f64, scheme: Scheme) -> Self {
        Self {
            replicates: 1000,
            seed,
            multipoles,
            lambda,
            scheme,
            eval_points: vec![(0.0, 0.0)],
            blocks: DEFAULT_BLOCKS,
        }
    }

    pub fn with_replicates(mut self, replicates: u64) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_eval_points(mut self, points: Vec<(f64, f64)>) -> Self {
        self.eval_points = points;
        self
    }

    pub fn with_blocks(mut self, blocks: usize) -> Self {
        self.blocks = blocks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 100 {
            return Err(Error::Config(format!(
                "replicates must be >= 100, got {}",
                self.replicates
            )));
        }
        if self.eval_points.is_empty() {
            return Err(Error::Config("eval_points is empty".into()));
        }
        if self.multipoles.is_empty() {
            return Err(Error::Config("no multipoles".into()));
        }
        if self.blocks < 2 || self.blocks as u64 > self.replicates {
            return Err(Error::Config(format!(
                "blocks must be in 2..={}, got {}",
                self.replicates, self.blocks
            )));
        }
        for &(ell, c) in &self.multipoles {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::Config(format!("C_l must be > 0, got {c} at l={ell}")));
            }
        }
        for &(t, p) in &self.eval_points {
            if !t.is_finite() || !p.is_finite() {
                return Err(Error::Config(format!("non-finite evaluation point ({t}, {p})")));
            }
        }
        self.penalty()?;
        Ok(())
    }

    fn penalty(&self) -> Result<Penalty<f64>> {
        Penalty::new(self.lambda)
    }

    /// Observed and regularized coefficients of every multipole in one replicate.
    fn replicate(&self, r: u64, penalty: Penalty<f64>) -> Vec<(HarmonicCoefficients<f64>, HarmonicCoefficients<f64>)> {
        self.multipoles
            .iter()
            .map(|&(ell, c)| {
                let obs = sample_replicate(ell, c, self.scheme.basis(), self.seed, r).expect("validated C_l");
                let reg = regularize_multipole(&obs, penalty, self.scheme).expect("basis matches scheme");
                (obs, reg)
            })
            .collect()
    }
}

/// Per-block sums of per-replicate statistics.
#[derive(Debug, Clone)]
struct Block {
    n: u64,
    sums: Vec<f64>,
}

fn run_blocks<F>(cfg: &McConfig, width: usize, body: F) -> Vec<Block>
where
    F: Fn(u64, &mut [f64]) + Sync,
{
    let (r, b) = (cfg.replicates, cfg.blocks as u64);
    (0..b)
        .into_par_iter()
        .map(|i| {
            let (lo, hi) = (i * r / b, (i + 1) * r / b);
            let mut sums = vec![0.0; width];
            for rep in lo..hi {
                body(rep, &mut sums);
            }
            Block { n: hi - lo, sums }
        })
        .collect()
}

/// Delete-one-block jackknife of `f(means)`.
fn jackknife(blocks: &[Block], draws_per_replicate: u64, f: impl Fn(&[f64]) -> f64) -> McEstimate {
    let width = blocks[0].sums.len();
    let n: u64 = blocks.iter().map(|b| b.n).sum();
    let mut total = vec![0.0; width];
    for b in blocks {
        for (t, s) in total.iter_mut().zip(&b.sums) {
            *t += s;
        }
    }
    let means: Vec<f64> = total.iter().map(|t| t / n as f64).collect();
    let est = f(&means);
    let k = blocks.len() as f64;
    let loo: Vec<f64> = blocks
        .iter()
        .map(|b| {
            let m: Vec<f64> = total
                .iter()
                .zip(&b.sums)
                .map(|(t, s)| (t - s) / (n - b.n) as f64)
                .collect();
            f(&m)
        })
        .collect();
    let bar = loo.iter().sum::<f64>() / k;
    let var = (k - 1.0) / k * loo.iter().map(|x| (x - bar) * (x - bar)).sum::<f64>();
    McEstimate {
        mean: est,
        std_error: var.sqrt(),
        n: n * draws_per_replicate,
    }
}

/// Coefficient class: `m = 0`, or all `m ≠ 0` pooled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderClass {
    Zero,
    NonZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMomentEstimate {
    pub ell: usize,
    pub class: OrderClass,
    pub estimate: McEstimate,
}

// Magnitudes |a| of the m = 0 coefficient and the pooled m ≠ 0 coefficients
// (complex moduli for m > 0, or every real-basis a^R_{ℓm}, m ≠ 0).
fn classes(c: &HarmonicCoefficients<f64>) -> (f64, Vec<f64>) {
    match (c.as_complex(), c.as_real()) {
        (Some(v), _) => (v[0].re, v[1..].iter().map(|a| a.norm()).collect()),
        (_, Some(v)) => {
            let ell = c.ell();
            let rest = v
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ell)
                .map(|(_, &a)| a)
                .collect();
            (v[ell], rest)
        }
        _ => unreachable!(),
    }
}

fn nonzero_count(cfg: &McConfig, ell: usize) -> u64 {
    match cfg.scheme {
        Scheme::ComplexModulus => ell as u64,
        Scheme::RealBasis => 2 * ell as u64,
    }
}

/// `E|a^reg|^order` for the `m = 0` and `m ≠ 0` classes of every configured
/// multipole. Multipoles with `ℓ = 0` only report the `m = 0` class.
pub fn estimate_coefficient_moments(cfg: &McConfig, order: u32) -> Result<Vec<CoefficientMomentEstimate>> {
    cfg.validate()?;
    if order == 0 {
        return Err(Error::Config("moment order must be >= 1".into()));
    }
    let penalty = cfg.penalty()?;
    let k = cfg.multipoles.len();
    let blocks = run_blocks(cfg, 2 * k, |r, sums| {
        for (i, (_, reg)) in cfg.replicate(r, penalty).iter().enumerate() {
            let (a0, rest) = classes(reg);
            sums[2 * i] += a0.abs().powi(order as i32);
            if !rest.is_empty() {
                sums[2 * i + 1] += rest.iter().map(|a| a.abs().powi(order as i32)).sum::<f64>() / rest.len() as f64;
            }
        }
    });
    let mut out = Vec::new();
    for (i, &(ell, _)) in cfg.multipoles.iter().enumerate() {
        out.push(CoefficientMomentEstimate {
            ell,
            class: OrderClass::Zero,
            estimate: jackknife(&blocks, 1, |m| m[2 * i]),
        });
        if ell > 0 {
            out.push(CoefficientMomentEstimate {
                ell,
                class: OrderClass::NonZero,
                estimate: jackknife(&blocks, nonzero_count(cfg, ell), |m| m[2 * i + 1]),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPointEstimate {
    pub ell: usize,
    pub theta: f64,
    pub phi: f64,
    pub estimate: McEstimate,
}

/// `E T^reg_ℓ(θ, φ)^order` at every `(ℓ, point)` pair, multipole-major.
#[derive(Debug, Clone)]
pub struct FieldMomentMap {
    pub order: u32,
    pub points: Vec<FieldPointEstimate>,
    blocks: Vec<Block>,
}

impl FieldMomentMap {
    /// Jackknife estimate of `points[i].mean - points[j].mean`, accounting for
    /// the correlation between points that share replicates.
    pub fn contrast(&self, i: usize, j: usize) -> Result<McEstimate> {
        if i >= self.points.len() || j >= self.points.len() {
            return Err(Error::Config(format!("point index out of range: {i}, {j}")));
        }
        Ok(jackknife(&self.blocks, 1, |m| m[i] - m[j]))
    }
}

/// Empirical field moment maps, `order ∈ {2, 4}`.
pub fn estimate_field_moment_map(cfg: &McConfig, order: u32) -> Result<FieldMomentMap> {
    cfg.validate()?;
    if order != 2 && order != 4 {
        return Err(Error::Config(format!("field moment order must be 2 or 4, got {order}")));
    }
    let penalty = cfg.penalty()?;
    let harmonics: Vec<Vec<PointHarmonics<f64>>> = cfg
        .multipoles
        .iter()
        .map(|&(ell, _)| {
            cfg.eval_points
                .iter()
                .map(|&(t, p)| PointHarmonics::new(ell, t, p))
                .collect()
        })
        .collect();
    let np = cfg.eval_points.len();
    let blocks = run_blocks(cfg, cfg.multipoles.len() * np, |r, sums| {
        for (i, (_, reg)) in cfg.replicate(r, penalty).iter().enumerate() {
            for (j, h) in harmonics[i].iter().enumerate() {
                sums[i * np + j] += eval_field_at(reg, h).powi(order as i32);
            }
        }
    });
    let mut points = Vec::with_capacity(cfg.multipoles.len() * np);
    for (i, &(ell, _)) in cfg.multipoles.iter().enumerate() {
        for (j, &(theta, phi)) in cfg.eval_points.iter().enumerate() {
            points.push(FieldPointEstimate {
                ell,
                theta,
                phi,
                estimate: jackknife(&blocks, 1, |m| m[i * np + j]),
            });
        }
    }
    Ok(FieldMomentMap { order, points, blocks })
}

/// Empirical `E‖T - T^reg‖²` over the configured multipoles (Parseval).
pub fn estimate_reconstruction_error(cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let penalty = cfg.penalty()?;
    let blocks = run_blocks(cfg, 1, |r, sums| {
        sums[0] += squared_error(cfg, r, penalty);
    });
    Ok(jackknife(&blocks, 1, |m| m[0]))
}

fn squared_error(cfg: &McConfig, r: u64, penalty: Penalty<f64>) -> f64 {
    cfg.replicate(r, penalty)
        .iter()
        .map(|(obs, reg)| obs.distance_sqr(reg).expect("same degree"))
        .sum()
}

/// `Pr{‖T - T^reg‖ ≤ ε}` with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionProbability {
    pub epsilon: f64,
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Wilson score interval for `k` successes out of `n` at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Fraction of replicates whose reconstruction error `‖T - T^reg‖_{L²}`,
/// computed from the coefficients of all configured multipoles, is at most `ε`.
pub fn estimate_reconstruction_probability(cfg: &McConfig, epsilon: f64) -> Result<ReconstructionProbability> {
    cfg.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be > 0, got {epsilon}")));
    }
    let penalty = cfg.penalty()?;
    let eps2 = epsilon * epsilon;
    let blocks = run_blocks(cfg, 1, |r, sums| {
        if squared_error(cfg, r, penalty) <= eps2 {
            sums[0] += 1.0;
        }
    });
    let successes = blocks.iter().map(|b| b.sums[0] as u64).sum();
    let trials = cfg.replicates;
    let (wilson_low, wilson_high) = wilson_interval(successes, trials, WILSON_Z);
    Ok(ReconstructionProbability {
        epsilon,
        successes,
        trials,
        estimate: successes as f64 / trials as f64,
        wilson_low,
        wilson_high,
    })
}

/// Sample excess kurtosis of one coefficient class and its z-score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityScore {
    pub ell: usize,
    pub class: OrderClass,
    /// `m4/m2² - 3` for real coefficients; `E|a|⁴/(E|a|²)² - 2` for complex
    /// moduli. Zero for Gaussian input.
    pub excess_kurtosis: McEstimate,
    pub z: f64,
}

/// Excess-kurtosis z-scores of the regularized coefficients. Needs at least
/// 10⁴ replicates.
pub fn normality_diagnostic(cfg: &McConfig) -> Result<Vec<NormalityScore>> {
    cfg.validate()?;
    if cfg.replicates < 10_000 {
        return Err(Error::Config(format!(
            "normality diagnostic needs >= 10000 replicates, got {}",
            cfg.replicates
        )));
    }
    let penalty = cfg.penalty()?;
    let k = cfg.multipoles.len();
    // per multipole: m=0 Σa², Σa⁴; m≠0 pooled Σ|a|², Σ|a|⁴
    let blocks = run_blocks(cfg, 4 * k, |r, sums| {
        for (i, (_, reg)) in cfg.replicate(r, penalty).iter().enumerate() {
            let (a0, rest) = classes(reg);
            let s = &mut sums[4 * i..4 * i + 4];
            let a2 = a0 * a0;
            s[0] += a2;
            s[1] += a2 * a2;
            if !rest.is_empty() {
                let w = rest.len() as f64;
                s[2] += rest.iter().map(|a| a * a).sum::<f64>() / w;
                s[3] += rest.iter().map(|a| (a * a) * (a * a)).sum::<f64>() / w;
            }
        }
    });
    let nonzero_base = match cfg.scheme {
        Scheme::ComplexModulus => 2.0,
        Scheme::RealBasis => 3.0,
    };
    let mut out = Vec::new();
    for (i, &(ell, _)) in cfg.multipoles.iter().enumerate() {
        let mut push = |class, lo: usize, base: f64, per: u64| {
            let e = jackknife(&blocks, per, |m| m[lo + 1] / (m[lo] * m[lo]) - base);
            out.push(NormalityScore {
                ell,
                class,
                excess_kurtosis: e,
                z: e.mean / e.std_error,
            });
        };
        push(OrderClass::Zero, 4 * i, 3.0, 1);
        if ell > 0 {
            push(OrderClass::NonZero, 4 * i + 2, nonzero_base, nonzero_count(cfg, ell));
        }
    }
    Ok(out)
}
