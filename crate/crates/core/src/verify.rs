//! Self-contained verification suites: Monte Carlo estimates against the
//! closed forms, reported as named checks.
//!
//! A report depends only on its options, never on timing or thread count,
//! so two runs with the same options serialize identically.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{fourth_moment_from_moments, variance_from_moments, CoefficientMoments, NuRatio};
use crate::montecarlo::{
    estimate_coefficient_moments, estimate_field_moment_map, estimate_reconstruction_error,
    estimate_reconstruction_probability, normality_diagnostic, McConfig, McEstimate, OrderClass,
};
use crate::regularize::{penalty_for_confidence, Scheme};
use crate::sampling::RngSeed;
use crate::specfun::PointHarmonics;
use crate::spectrum::power_law;

pub const SCHEMA_VERSION: u32 = 1;

/// Standard errors allowed between an estimate and its closed form.
pub const SE_MARGIN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Coeff,
    Field,
    Probability,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coeff" => Ok(Suite::Coeff),
            "field" => Ok(Suite::Field),
            "probability" => Ok(Suite::Probability),
            "all" => Ok(Suite::All),
            _ => Err(Error::Config(format!("unknown suite {s:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Coeff => "coeff",
            Suite::Field => "field",
            Suite::Probability => "probability",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Small,
    Full,
}

impl Budget {
    fn scale(self) -> u64 {
        match self {
            Budget::Small => 1,
            Budget::Full => 10,
        }
    }
}

impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Budget::Small),
            "full" => Ok(Budget::Full),
            _ => Err(Error::Config(format!("unknown budget {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub budget: Budget,
    /// Test hook: multiplies the closed-form `γ₁` used as the expected value.
    /// Any factor away from 1 must make the suite fail.
    pub tamper_gamma1: Option<f64>,
}

impl VerifyOptions {
    pub fn new(suite: Suite, seed: u64, budget: Budget) -> Self {
        Self {
            suite,
            seed,
            budget,
            tamper_gamma1: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|observed - expected| ≤ tolerance`
    Within,
    /// `observed ≥ expected`
    AtLeast,
    /// `observed ≤ expected`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub std_error: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    fn within(suite: Suite, name: String, est: McEstimate, expected: f64) -> Self {
        let tolerance = SE_MARGIN * est.std_error;
        Self {
            suite,
            name,
            observed: est.mean,
            expected,
            std_error: est.std_error,
            tolerance,
            relation: Relation::Within,
            passed: (est.mean - expected).abs() <= tolerance,
        }
    }

    fn bound(suite: Suite, name: String, observed: f64, std_error: f64, expected: f64, relation: Relation) -> Self {
        let passed = match relation {
            Relation::AtLeast => observed >= expected,
            Relation::AtMost => observed <= expected,
            Relation::Within => unreachable!(),
        };
        Self {
            suite,
            name,
            observed,
            expected,
            std_error,
            tolerance: 0.0,
            relation,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub options: VerifyOptions,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    if let Some(f) = opts.tamper_gamma1 {
        if !f.is_finite() {
            return Err(Error::Config(format!("tamper factor must be finite, got {f}")));
        }
    }
    let mut checks = Vec::new();
    if opts.suite.includes(Suite::Coeff) {
        coeff_suite(opts, &mut checks)?;
    }
    if opts.suite.includes(Suite::Field) {
        field_suite(opts, &mut checks)?;
    }
    if opts.suite.includes(Suite::Probability) {
        probability_suite(opts, &mut checks)?;
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        options: opts.clone(),
        checks,
        passed,
    })
}

fn moments_at(nu: f64, opts: &VerifyOptions) -> Result<CoefficientMoments<f64>> {
    let mut g = CoefficientMoments::at(NuRatio::new(nu)?);
    g.gamma1 *= opts.tamper_gamma1.unwrap_or(1.0);
    Ok(g)
}

fn scheme_tag(s: Scheme) -> &'static str {
    match s {
        Scheme::ComplexModulus => "complex",
        Scheme::RealBasis => "real",
    }
}

fn coeff_suite(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let reps = 200_000 * opts.budget.scale();
    let ell = 2;
    for (i, nu) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let g = moments_at(nu, opts)?;
        for scheme in [Scheme::ComplexModulus, Scheme::RealBasis] {
            let stream = 100 + 2 * i as u64 + (scheme == Scheme::RealBasis) as u64;
            let cfg =
                McConfig::new(RngSeed::new(opts.seed, stream), vec![(ell, 1.0)], nu, scheme).with_replicates(reps);
            for order in [2u32, 4] {
                for e in estimate_coefficient_moments(&cfg, order)? {
                    let expected = match (e.class, scheme, order) {
                        (OrderClass::NonZero, Scheme::ComplexModulus, 2) => g.gamma1,
                        (OrderClass::NonZero, Scheme::ComplexModulus, _) => g.gamma3,
                        (_, _, 2) => g.gamma0,
                        _ => g.gamma2,
                    };
                    let class = match e.class {
                        OrderClass::Zero => "m=0",
                        OrderClass::NonZero => "m!=0",
                    };
                    let name = format!("coeff.{}.nu={nu}.{class}.E|a|^{order}", scheme_tag(scheme));
                    out.push(Check::within(Suite::Coeff, name, e.estimate, expected));
                }
            }
        }
    }
    // regularized coefficients are visibly non-Gaussian at nu = 1
    let cfg = McConfig::new(
        RngSeed::new(opts.seed, 110),
        vec![(ell, 1.0)],
        1.0,
        Scheme::ComplexModulus,
    )
    .with_replicates(reps);
    for s in normality_diagnostic(&cfg)? {
        let class = match s.class {
            OrderClass::Zero => "m=0",
            OrderClass::NonZero => "m!=0",
        };
        out.push(Check::bound(
            Suite::Coeff,
            format!("coeff.complex.nu=1.{class}.excess_kurtosis_z"),
            s.z,
            1.0,
            SE_MARGIN,
            Relation::AtLeast,
        ));
    }
    Ok(())
}

fn field_suite(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let reps = 100_000 * opts.budget.scale();
    let ell = 10;
    let points = vec![(0.0, 0.0), (PI / 3.0, 0.0), (PI / 2.0, 0.0)];
    let harmonics: Vec<PointHarmonics<f64>> = points.iter().map(|&(t, p)| PointHarmonics::new(ell, t, p)).collect();
    let mut stream = 200;
    for nu in [0.0, 2.0] {
        let g = moments_at(nu, opts)?;
        for scheme in [Scheme::ComplexModulus, Scheme::RealBasis] {
            let cfg = McConfig::new(RngSeed::new(opts.seed, stream), vec![(ell, 1.0)], nu, scheme)
                .with_replicates(reps)
                .with_eval_points(points.clone());
            stream += 1;
            for order in [2u32, 4] {
                let map = estimate_field_moment_map(&cfg, order)?;
                for (p, h) in map.points.iter().zip(&harmonics) {
                    let expected = if order == 2 {
                        variance_from_moments(&g, scheme, h)
                    } else {
                        fourth_moment_from_moments(&g, scheme, h)
                    };
                    let name = format!("field.{}.nu={nu}.theta={:.4}.E[T^{order}]", scheme_tag(scheme), p.theta);
                    out.push(Check::within(Suite::Field, name, p.estimate, expected));
                }
            }
        }
    }
    // pole versus equator on a fresh stream, so the z-score is not reused
    // from the map checks above
    let nu = 2.0;
    let cfg = McConfig::new(RngSeed::new(opts.seed, stream), vec![(ell, 1.0)], nu, Scheme::RealBasis)
        .with_replicates(reps)
        .with_eval_points(vec![points[0], points[2]]);
    let d = estimate_field_moment_map(&cfg, 4)?.contrast(0, 1)?;
    out.push(Check::bound(
        Suite::Field,
        format!("field.real.nu={nu}.pole_minus_equator_z"),
        d.mean / d.std_error,
        1.0,
        SE_MARGIN,
        Relation::AtLeast,
    ));
    Ok(())
}

fn probability_suite(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let reps = 1000 * opts.budget.scale();
    let spec = power_law(10.0, 3.0, 32)?;
    let multipoles: Vec<(usize, f64)> = spec.iter().collect();
    let (eps, delta) = (10.0, 0.1);
    let conf = penalty_for_confidence(eps, delta, &spec)?;
    for (k, scheme) in [Scheme::ComplexModulus, Scheme::RealBasis].into_iter().enumerate() {
        let tag = scheme_tag(scheme);
        let cfg = McConfig::new(
            RngSeed::new(opts.seed, 300 + k as u64),
            multipoles.clone(),
            conf.penalty().lambda(),
            scheme,
        )
        .with_replicates(reps);
        let p = estimate_reconstruction_probability(&cfg, eps)?;
        out.push(Check::bound(
            Suite::Probability,
            format!("probability.{tag}.eps={eps}.delta={delta}.wilson_low"),
            p.wilson_low,
            0.0,
            1.0 - delta,
            Relation::AtLeast,
        ));
        let err = estimate_reconstruction_error(&cfg)?;
        out.push(Check::bound(
            Suite::Probability,
            format!("probability.{tag}.expected_sq_error"),
            err.mean + SE_MARGIN * err.std_error,
            err.std_error,
            conf.expectation_budget,
            Relation::AtMost,
        ));
        let exact = estimate_reconstruction_probability(&McConfig { lambda: 0.0, ..cfg }, 1e-12)?;
        out.push(Check::bound(
            Suite::Probability,
            format!("probability.{tag}.lambda=0"),
            exact.estimate,
            0.0,
            1.0,
            Relation::AtLeast,
        ));
    }
    Ok(())
}
