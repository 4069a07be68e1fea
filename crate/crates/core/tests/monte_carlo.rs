use std::f64::consts::PI;

use spheroreg::moments::{self, odd_moment_zero_check, NuRatio, RegularizedMultipole};
use spheroreg::montecarlo::{
    estimate_coefficient_moments, estimate_field_moment_map, estimate_reconstruction_error,
    estimate_reconstruction_probability, normality_diagnostic, OrderClass,
};
use spheroreg::regularize::{penalty_bound, penalty_for_confidence, regularize_multipole};
use spheroreg::sampling::{sample_replicate, HarmonicCoefficients};
use spheroreg::spectrum::power_law;
use spheroreg::{Basis, McConfig, McEstimate, Penalty, RngSeed, Scheme};
use spheroreg_oracles as oracle;

fn draws(ell: usize, c: f64, basis: Basis, n: u64, seed: u64) -> Vec<HarmonicCoefficients<f64>> {
    (0..n)
        .map(|r| sample_replicate(ell, c, basis, RngSeed::new(seed, 0), r).unwrap())
        .collect()
}

#[test]
fn sampler_variances() {
    let xs = draws(4, 2.0, Basis::Complex, 100_000, 1);
    let a0: Vec<f64> = xs.iter().map(|c| c.as_complex().unwrap()[0].re.powi(2)).collect();
    let a3: Vec<f64> = xs.iter().map(|c| c.as_complex().unwrap()[3].norm_sqr()).collect();
    assert!(McEstimate::from_samples(&a0).unwrap().within(2.0, 3.0));
    assert!(McEstimate::from_samples(&a3).unwrap().within(2.0, 3.0));
    let rs = draws(4, 2.0, Basis::Real, 100_000, 2);
    for i in [0, 4, 8] {
        let v: Vec<f64> = rs.iter().map(|c| c.as_real().unwrap()[i].powi(2)).collect();
        assert!(McEstimate::from_samples(&v).unwrap().within(2.0, 3.0), "index {i}");
    }
}

#[test]
fn modulus_follows_rayleigh_law() {
    let c = 2.0;
    let xs = draws(2, c, Basis::Complex, 20_000, 3);
    let rho: Vec<f64> = xs.iter().map(|a| a.as_complex().unwrap()[1].norm()).collect();
    // density 2r/C exp(-r²/C) has CDF 1 - exp(-r²/C)
    let d = oracle::ks_statistic(&rho, |r| 1.0 - (-r * r / c).exp());
    assert!(d < oracle::ks_critical_99(rho.len()), "KS {d}");
}

#[test]
fn unregularized_field_is_isotropic_in_variance() {
    let pts = vec![(0.0, 0.0), (0.7, 1.0), (PI / 2.0, 2.0), (2.2, 3.3), (3.0, 5.0)];
    let cfg = McConfig::new(RngSeed::new(5, 1), vec![(6, 1.5)], 0.0, Scheme::ComplexModulus)
        .with_replicates(40_000)
        .with_eval_points(pts);
    let want = 13.0 * 1.5 / (4.0 * PI);
    for p in estimate_field_moment_map(&cfg, 2).unwrap().points {
        assert!(p.estimate.within(want, 4.0), "{p:?}");
    }
}

#[test]
fn coefficient_moments_match_closed_forms() {
    let (c, lambda) = (2.0, 2f64.sqrt());
    let nu = NuRatio::new(1.0).unwrap();
    let cfg = McConfig::new(RngSeed::new(6, 0), vec![(3, c)], lambda, Scheme::ComplexModulus).with_replicates(200_000);
    let second = estimate_coefficient_moments(&cfg, 2).unwrap();
    let fourth = estimate_coefficient_moments(&cfg, 4).unwrap();
    let get = |v: &[spheroreg::montecarlo::CoefficientMomentEstimate], class| {
        v.iter().find(|e| e.class == class).unwrap().estimate
    };
    assert!(get(&second, OrderClass::Zero).within(moments::gamma0(nu) * c, 3.0));
    assert!(get(&second, OrderClass::NonZero).within(moments::gamma1(nu) * c, 3.0));
    assert!(get(&fourth, OrderClass::Zero).within(moments::gamma2(nu) * c * c, 3.0));
    assert!(get(&fourth, OrderClass::NonZero).within(moments::gamma3(nu) * c * c, 3.0));

    let zero = McConfig {
        lambda: 0.0,
        ..cfg.clone()
    };
    for e in estimate_coefficient_moments(&zero, 2).unwrap() {
        assert!(e.estimate.within(c, 3.0));
    }
}

#[test]
fn field_fourth_moment_at_pole_matches_trispectrum() {
    let (ell, c, nu) = (5, 1.0, 2.0);
    let cfg = McConfig::new(RngSeed::new(7, 0), vec![(ell, c)], nu, Scheme::ComplexModulus)
        .with_replicates(200_000)
        .with_eval_points(vec![(0.0, 0.0), (1.0, 0.3)]);
    let m = RegularizedMultipole::new(ell, c, Penalty::new(nu).unwrap(), Scheme::ComplexModulus).unwrap();
    let map = estimate_field_moment_map(&cfg, 4).unwrap();
    for p in &map.points {
        assert!(p.estimate.within(m.fourth_moment(p.theta, p.phi), 3.0), "{p:?}");
    }
}

#[test]
fn real_scheme_anisotropy_is_detected() {
    let cfg = McConfig::new(RngSeed::new(8, 0), vec![(10, 1.0)], 2.0, Scheme::RealBasis)
        .with_replicates(100_000)
        .with_eval_points(vec![(0.0, 0.0), (PI / 2.0, 0.0)]);
    let map = estimate_field_moment_map(&cfg, 4).unwrap();
    let d = map.contrast(0, 1).unwrap();
    assert!(d.mean / d.std_error > 4.0, "{d:?}");
}

#[test]
fn odd_moments_vanish() {
    let penalty = Penalty::new(1.0).unwrap();
    let mut complex = Vec::new();
    let mut axial = Vec::new();
    for r in 0..1_000_000u64 {
        let obs = sample_replicate(1, 1.0, Basis::Complex, RngSeed::new(9, 0), r).unwrap();
        let reg = regularize_multipole(&obs, penalty, Scheme::ComplexModulus).unwrap();
        let v = reg.as_complex().unwrap();
        axial.push(v[0]);
        complex.push(v[1]);
    }
    for order in [1, 3] {
        assert!(odd_moment_zero_check(&complex, order)
            .unwrap()
            .consistent_with_zero(4.0));
    }
    let a = odd_moment_zero_check(&axial, 1).unwrap();
    assert!(a.consistent_with_zero(4.0));
    assert_eq!(a.im.mean, 0.0);
}

#[test]
fn penalty_bound_controls_expected_error() {
    let spec = power_law(10.0, 3.0, 32).unwrap();
    let eps = 20.0;
    let bound = penalty_bound(eps, &spec).unwrap();
    let multipoles: Vec<(usize, f64)> = spec.iter().collect();
    let cfg =
        McConfig::new(RngSeed::new(10, 0), multipoles, bound.lambda(), Scheme::ComplexModulus).with_replicates(1000);
    let err = estimate_reconstruction_error(&cfg).unwrap();
    assert!(
        err.mean + 3.0 * err.std_error <= eps,
        "{err:?} for lambda {}",
        bound.lambda()
    );
}

#[test]
fn reconstruction_probability() {
    let spec = power_law(10.0, 3.0, 32).unwrap();
    let multipoles: Vec<(usize, f64)> = spec.iter().collect();
    let (eps, delta) = (10.0, 0.1);
    let conf = penalty_for_confidence(eps, delta, &spec).unwrap();
    for scheme in [Scheme::ComplexModulus, Scheme::RealBasis] {
        let cfg = McConfig::new(RngSeed::new(12, 0), multipoles.clone(), conf.penalty().lambda(), scheme)
            .with_replicates(1000);
        let p = estimate_reconstruction_probability(&cfg, eps).unwrap();
        assert!(p.wilson_low >= 1.0 - delta, "{p:?}");

        let exact = estimate_reconstruction_probability(
            &McConfig {
                lambda: 0.0,
                ..cfg.clone()
            },
            1e-12,
        )
        .unwrap();
        assert_eq!(exact.estimate, 1.0);

        // with everything thresholded away the error is ‖T‖ itself
        let wiped = estimate_reconstruction_probability(
            &McConfig {
                lambda: 1e6,
                ..cfg.clone()
            },
            4.0,
        )
        .unwrap();
        let norm_le = (0..1000u64)
            .filter(|&r| {
                let n2: f64 = multipoles
                    .iter()
                    .map(|&(l, c)| sample_replicate(l, c, scheme.basis(), cfg.seed, r).unwrap().norm_sqr())
                    .sum();
                n2 <= 16.0
            })
            .count();
        assert_eq!(wiped.successes, norm_le as u64);
    }
}

#[test]
fn normality_diagnostic_flags_regularization() {
    let base = McConfig::new(RngSeed::new(13, 0), vec![(2, 1.0)], 0.0, Scheme::ComplexModulus).with_replicates(20_000);
    for s in normality_diagnostic(&base).unwrap() {
        assert!(s.z.abs() < 4.0, "{s:?}");
    }
    let strong = McConfig {
        lambda: 1.0,
        replicates: 1_000_000,
        ..base.clone()
    };
    for s in normality_diagnostic(&strong).unwrap() {
        assert!(s.z > 10.0, "{s:?}");
    }
    let mild = McConfig {
        lambda: 0.5,
        replicates: 200_000,
        ..base.clone()
    };
    for s in normality_diagnostic(&mild).unwrap() {
        assert!(s.z > 4.0, "{s:?}");
    }
    let weak = McConfig {
        lambda: 0.1,
        replicates: 10_000,
        ..base.clone()
    };
    let nu = NuRatio::new(0.1).unwrap();
    let gap = moments::kurtosis_pole(nu) - 3.0;
    assert!(gap > 0.0);
    let s = normality_diagnostic(&weak).unwrap()[0];
    assert!(s.excess_kurtosis.within(gap, 4.0), "{s:?} vs {gap}");
    assert!(normality_diagnostic(&McConfig {
        replicates: 5000,
        ..base
    })
    .is_err());
}

#[test]
fn standard_errors_are_calibrated() {
    let nu = NuRatio::new(1.0).unwrap();
    let want = moments::gamma3(nu);
    let hits = (0..50u64)
        .filter(|&seed| {
            let cfg = McConfig::new(RngSeed::new(seed, 77), vec![(1, 1.0)], 1.0, Scheme::ComplexModulus)
                .with_replicates(20_000);
            let e = estimate_coefficient_moments(&cfg, 4).unwrap();
            e.iter()
                .find(|e| e.class == OrderClass::NonZero)
                .unwrap()
                .estimate
                .within(want, 2.0)
        })
        .count();
    assert!(hits >= 45, "{hits}/50 within 2 SE");
}

#[test]
fn identical_configs_are_bitwise_reproducible() {
    let cfg = McConfig::new(RngSeed::new(14, 3), vec![(4, 1.0), (9, 0.5)], 0.7, Scheme::RealBasis)
        .with_replicates(5000)
        .with_eval_points(vec![(0.0, 0.0), (1.0, 2.0)]);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    estimate_coefficient_moments(&cfg, 4).unwrap(),
                    estimate_field_moment_map(&cfg, 2).unwrap().points,
                    estimate_reconstruction_error(&cfg).unwrap(),
                )
            })
    };
    let (a, b) = (run(1), run(7));
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
