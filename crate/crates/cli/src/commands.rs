use std::f64::consts::PI;
use std::fs::File;

use serde::Serialize;
use serde_json::json;

use spheroreg::moments::MomentReport;
use spheroreg::montecarlo::estimate_field_moment_map;
use spheroreg::specfun::legendre_p;
use spheroreg::spectrum::{kurtosis_reference_table, power_law, read_spectrum_csv, validate, Envelope};
use spheroreg::verify::{self, Budget, Suite, VerifyOptions};
use spheroreg::{McConfig, Penalty, PowerSpectrum, RegularizedMultipole, RngSeed, Scheme};

use crate::output::{self, csv, num, RunManifest, SCHEMA_VERSION};
use crate::{BudgetArg, Failure, Format, MapArgs, MomentsArgs, ReferenceTableArgs, SchemeArg, SuiteArg, VerifyArgs};

/// Exponent used to fit an envelope when none is given.
const DEFAULT_DECAY: f64 = 2.1;

fn scheme_name(s: SchemeArg) -> &'static str {
    match s {
        SchemeArg::Complex => "complex",
        SchemeArg::Real => "real",
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn pair(flag: &str, s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("--{flag} expects `K,ALPHA`, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn load_spectrum(a: &MomentsArgs) -> Result<PowerSpectrum<f64>, Failure> {
    if let Some(spec) = &a.power_law {
        let (k, alpha) = pair("power-law", spec)?;
        let ell_max = a
            .ell_max
            .ok_or_else(|| Failure::Usage("--power-law needs --ell-max".into()))?;
        return Ok(power_law(k, alpha, ell_max)?);
    }
    let path = a
        .spectrum
        .as_ref()
        .ok_or_else(|| Failure::Usage("no spectrum given".into()))?;
    let file = File::open(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let points = read_spectrum_csv(file).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let points: Vec<(usize, f64)> = match a.ell_max {
        Some(m) => points.into_iter().filter(|&(l, _)| l <= m).collect(),
        None => points,
    };
    match &a.envelope {
        Some(env) => {
            let (k, alpha) = pair("envelope", env)?;
            let envelope = Envelope::new(k, alpha)?;
            let violations = validate(&points, &envelope)?;
            for v in &violations {
                eprintln!(
                    "violation: l={} c_l={} bound={} ({:?})",
                    v.ell, v.c_ell, v.bound, v.kind
                );
            }
            Ok(PowerSpectrum::new(points, envelope)?)
        }
        None => Ok(PowerSpectrum::with_fitted_envelope(points, DEFAULT_DECAY)?),
    }
}

#[derive(Serialize)]
struct MomentRow {
    ell: usize,
    nu: f64,
    gamma0: f64,
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    kappa_pole: f64,
}

pub fn moments(a: MomentsArgs) -> Result<(), Failure> {
    let spectrum = load_spectrum(&a)?;
    let penalty = Penalty::new(a.lambda)?;
    let scheme = Scheme::from(a.scheme);
    let mut rows = Vec::with_capacity(spectrum.len());
    for (ell, c) in spectrum.iter() {
        let r = MomentReport::new(ell, c, penalty, scheme)?;
        rows.push(MomentRow {
            ell,
            nu: r.nu,
            gamma0: r.gamma0,
            gamma1: r.gamma1,
            gamma2: r.gamma2,
            gamma3: r.gamma3,
            kappa_pole: r.kappa_pole,
        });
    }
    let env = spectrum.envelope();
    let params = json!({
        "spectrum": a.spectrum.as_ref().map(|p| p.display().to_string()),
        "power_law": a.power_law,
        "ell_max": a.ell_max,
        "envelope": { "constant": env.constant, "exponent": env.exponent },
        "lambda": a.lambda,
        "scheme": scheme_name(a.scheme),
        "format": format_name(a.output.format),
    });
    let body = match a.output.format {
        Format::Csv => csv(
            &["ell", "nu", "gamma0", "gamma1", "gamma2", "gamma3", "kappa_pole"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.ell.to_string(),
                        num(r.nu),
                        num(r.gamma0),
                        num(r.gamma1),
                        num(r.gamma2),
                        num(r.gamma3),
                        num(r.kappa_pole),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => output::json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "moments",
            "lambda": a.lambda,
            "scheme": scheme_name(a.scheme),
            "rows": rows,
        }))?,
    };
    output::emit(
        a.output.out.as_deref(),
        &body,
        &RunManifest::new("moments", params, None),
    )
}

#[derive(Serialize)]
struct MapRow {
    theta: f64,
    value: f64,
    envelope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    se: Option<f64>,
}

/// Smallest replicate count accepted for a Monte Carlo map.
const MIN_MAP_REPLICATES: u64 = 100;

pub fn map(a: MapArgs) -> Result<(), Failure> {
    let order: u32 = a
        .order
        .parse()
        .map_err(|_| Failure::Usage(format!("bad order {}", a.order)))?;
    if a.grid < 2 {
        return Err(Failure::Usage(format!("--grid must be at least 2, got {}", a.grid)));
    }
    if !a.phi.is_finite() {
        return Err(Failure::Usage("--phi must be finite".into()));
    }
    let scheme = Scheme::from(a.scheme);
    let penalty = Penalty::new(a.lambda)?;
    let field = RegularizedMultipole::new(a.ell, a.c_ell, penalty, scheme)?;
    let moment = |t: f64| {
        if order == 2 {
            field.variance(t, a.phi)
        } else {
            field.fourth_moment(t, a.phi)
        }
    };
    let pole = moment(0.0);
    let thetas: Vec<f64> = (0..a.grid).map(|i| PI * i as f64 / (a.grid - 1) as f64).collect();
    let envelope: Vec<f64> = thetas
        .iter()
        .map(|&t| Ok(pole * legendre_p(a.ell, t.cos())?.powi(order as i32)))
        .collect::<Result<_, spheroreg::Error>>()?;

    let rows: Vec<MapRow> = match a.montecarlo {
        None => thetas
            .iter()
            .zip(&envelope)
            .map(|(&t, &e)| MapRow {
                theta: t,
                value: moment(t),
                envelope: e,
                se: None,
            })
            .collect(),
        Some(r) => {
            if r < MIN_MAP_REPLICATES {
                return Err(Failure::Usage(format!(
                    "--montecarlo needs at least {MIN_MAP_REPLICATES} replicates, got {r}"
                )));
            }
            let cfg = McConfig::new(RngSeed::new(a.seed, 0), vec![(a.ell, a.c_ell)], a.lambda, scheme)
                .with_replicates(r)
                .with_eval_points(thetas.iter().map(|&t| (t, a.phi)).collect());
            let est = estimate_field_moment_map(&cfg, order)?;
            est.points
                .iter()
                .zip(&envelope)
                .map(|(p, &e)| MapRow {
                    theta: p.theta,
                    value: p.estimate.mean,
                    envelope: e,
                    se: Some(p.estimate.std_error),
                })
                .collect()
        }
    };

    let params = json!({
        "ell": a.ell,
        "lambda": a.lambda,
        "c_ell": a.c_ell,
        "scheme": scheme_name(a.scheme),
        "order": order,
        "grid": a.grid,
        "phi": a.phi,
        "montecarlo": a.montecarlo,
        "format": format_name(a.output.format),
    });
    let seed = a.montecarlo.map(|_| a.seed);
    let body = match a.output.format {
        Format::Csv => {
            let mut header = vec!["theta", "value", "envelope"];
            if a.montecarlo.is_some() {
                header.push("se");
            }
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![num(r.theta), num(r.value), num(r.envelope)];
                    v.extend(r.se.map(num));
                    v
                })
                .collect();
            csv(&header, &cells)
        }
        Format::Json => output::json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "map",
            "ell": a.ell,
            "order": order,
            "scheme": scheme_name(a.scheme),
            "nu": field.nu().value(),
            "rows": rows,
        }))?,
    };
    output::emit(a.output.out.as_deref(), &body, &RunManifest::new("map", params, seed))
}

pub fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let suite = match a.suite {
        SuiteArg::Coeff => Suite::Coeff,
        SuiteArg::Field => Suite::Field,
        SuiteArg::Probability => Suite::Probability,
        SuiteArg::All => Suite::All,
    };
    let budget = match a.budget {
        BudgetArg::Small => Budget::Small,
        BudgetArg::Full => Budget::Full,
    };
    let mut opts = VerifyOptions::new(suite, a.seed, budget);
    opts.tamper_gamma1 = a.tamper_gamma1;
    let report = verify::run(&opts)?;
    let body = output::json(&report)?;
    let params = serde_json::to_value(&opts).map_err(|e| Failure::Data(e.to_string()))?;
    output::emit(
        a.out.as_deref(),
        &body,
        &RunManifest::new("verify", params, Some(a.seed)),
    )?;

    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    eprintln!(
        "{} of {} checks passed",
        report.checks.len() - failed.len(),
        report.checks.len()
    );
    if failed.is_empty() {
        return Ok(());
    }
    for name in &failed {
        eprintln!("FAILED {name}");
    }
    Err(Failure::Verification(format!("{} check(s) failed", failed.len())))
}

#[derive(Serialize)]
struct TableRow {
    ell: usize,
    c_ell: f64,
    kappa_ref: Option<f64>,
    kappa_computed: f64,
    rel_deviation: Option<f64>,
}

pub fn reference_table(a: ReferenceTableArgs) -> Result<(), Failure> {
    let penalty = Penalty::new(a.lambda)?;
    let mut rows = Vec::new();
    for r in kurtosis_reference_table() {
        let k = MomentReport::new(r.ell, r.c_ell, penalty, Scheme::ComplexModulus)?.kappa_pole;
        rows.push(TableRow {
            ell: r.ell,
            c_ell: r.c_ell,
            kappa_ref: r.kappa_ref,
            kappa_computed: k,
            rel_deviation: r.kappa_ref.map(|want| (k - want) / want),
        });
    }
    let params = json!({ "lambda": a.lambda, "format": format_name(a.output.format) });
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let body = match a.output.format {
        Format::Csv => csv(
            &["ell", "c_ell", "kappa_ref", "kappa_computed", "rel_deviation"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.ell.to_string(),
                        num(r.c_ell),
                        opt(r.kappa_ref),
                        num(r.kappa_computed),
                        opt(r.rel_deviation),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => output::json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "reference-table",
            "lambda": a.lambda,
            "rows": rows,
        }))?,
    };
    output::emit(
        a.output.out.as_deref(),
        &body,
        &RunManifest::new("reference-table", params, None),
    )
}
