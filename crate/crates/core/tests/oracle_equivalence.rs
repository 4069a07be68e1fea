use std::f64::consts::PI;

use num_complex::Complex;
use spheroreg::moments::{self, NuRatio};
use spheroreg::regularize::{objective, regularize_multipole, shrink_complex, shrink_real};
use spheroreg::sampling::{eval_field, sample_multipole, HarmonicCoefficients};
use spheroreg::specfun::{
    erfc, legendre_p, normal_cdf, sph_harm_complex, sph_harm_real, upper_incomplete_gamma, HalfInt,
};
use spheroreg::{Basis, Penalty, RngSeed, Scheme};
use spheroreg_oracles as oracle;

fn nu(x: f64) -> NuRatio<f64> {
    NuRatio::new(x).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

const LINEAR_NUS: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];

#[test]
fn gamma_functions_match_quadrature() {
    for x in LINEAR_NUS {
        let cases = [
            ("gamma0", moments::gamma0(nu(x)), oracle::gaussian_tail_moment(2, x)),
            ("gamma1", moments::gamma1(nu(x)), oracle::rayleigh_tail_moment(2, x)),
            ("gamma2", moments::gamma2(nu(x)), oracle::gaussian_tail_moment(4, x)),
            ("gamma3", moments::gamma3(nu(x)), oracle::rayleigh_tail_moment(4, x)),
            (
                "p=3",
                moments::even_moment(3, nu(x)).unwrap(),
                oracle::rayleigh_tail_moment(6, x),
            ),
        ];
        for (name, got, want) in cases {
            assert!(rel(got, want) < 1e-9, "{name} at nu={x}: {got} vs {want}");
        }
    }
}

#[test]
fn gamma_functions_match_quadrature_in_log_space() {
    for x in [6.0, 8.0, 10.0] {
        let cases = [
            (
                "gamma0",
                moments::ln_gamma0(nu(x)),
                oracle::ln_gaussian_tail_moment(2, x),
            ),
            (
                "gamma1",
                moments::ln_gamma1(nu(x)),
                oracle::ln_rayleigh_tail_moment(2, x),
            ),
            (
                "gamma2",
                moments::ln_gamma2(nu(x)),
                oracle::ln_gaussian_tail_moment(4, x),
            ),
            (
                "gamma3",
                moments::ln_gamma3(nu(x)),
                oracle::ln_rayleigh_tail_moment(4, x),
            ),
            (
                "p=3",
                moments::ln_even_moment(3, nu(x)).unwrap(),
                oracle::ln_rayleigh_tail_moment(6, x),
            ),
        ];
        for (name, got, want) in cases {
            assert!(
                (got - want).abs() < 1e-6 * want.abs(),
                "{name} at nu={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn closed_forms_match_quadrature_where_they_are_used() {
    for x in [0.0, 0.1, 0.7, 1.2, 1.45] {
        assert!(rel(moments::closed_form::gamma0(x), oracle::gaussian_tail_moment(2, x)) < 1e-11);
        assert!(rel(moments::closed_form::gamma1(x), oracle::rayleigh_tail_moment(2, x)) < 1e-11);
        assert!(rel(moments::closed_form::gamma2(x), oracle::gaussian_tail_moment(4, x)) < 1e-11);
        assert!(rel(moments::closed_form::gamma3(x), oracle::rayleigh_tail_moment(4, x)) < 1e-11);
    }
}

#[test]
fn incomplete_gamma_matches_quadrature() {
    for twice in 1..=9u32 {
        for c in [0.0, 0.5, 1.0, 5.0, 25.0, 50.0] {
            let got: f64 = upper_incomplete_gamma(HalfInt::from_twice(twice).unwrap(), c).unwrap();
            let want = oracle::upper_gamma_quad(twice as f64 / 2.0, c);
            assert!(rel(got, want) < 1e-10, "p={}/2 c={c}: {got} vs {want}", twice);
        }
    }
}

#[test]
fn normal_functions_match_quadrature() {
    assert!(rel(normal_cdf(1.0), oracle::normal_cdf_quad(1.0)) < 1e-12);
    assert!((normal_cdf(1.0_f64) - 0.841_344_746_068_542_9).abs() < 1e-15);
    for x in [0.0, 0.3, 1.0, 2.5, 4.0, 6.0] {
        assert!(rel(erfc(x), oracle::erfc_quad(x)) < 1e-12, "erfc({x})");
        let want = 1.0 - 0.5 * oracle::erfc_quad(x / 2f64.sqrt());
        assert!(rel(normal_cdf(x), want) < 1e-12, "Phi({x})");
        assert!(rel(erfc(x), 2.0 * normal_cdf(-(2f64.sqrt()) * x)) < 1e-12);
    }
}

#[test]
fn legendre_matches_rodrigues() {
    for ell in 0..=12u32 {
        for i in 0..=40 {
            let x = -1.0 + i as f64 * 0.05;
            let got = legendre_p(ell as usize, x).unwrap();
            assert!(
                (got - oracle::legendre_rodrigues(ell, x)).abs() < 1e-12,
                "l={ell} x={x}"
            );
        }
    }
    assert!((legendre_p(10, 0.3).unwrap() - oracle::legendre_explicit(10, 0.3)).abs() < 1e-12);
}

#[test]
fn degree_two_real_harmonics_match_hand_expansion() {
    for (t, p) in [(0.3, 1.1), (1.2, 4.0), (PI / 2.0, 0.0), (2.9, 5.9)] {
        let want = oracle::real_harmonics_l2(t, p);
        for (i, m) in (-2..=2).enumerate() {
            assert!((sph_harm_real(2, m, t, p).unwrap() - want[i]).abs() < 1e-14, "m={m}");
        }
    }
    let want = oracle::real_harmonics_l2(PI / 2.0, 0.0);
    let v2_direct = (4.0 * PI / 5.0f64).powi(2) * want.iter().map(|y| y.powi(4)).sum::<f64>();
    assert!((moments::v_ell(2, PI / 2.0, 0.0) - v2_direct).abs() < 1e-14);
}

#[test]
fn harmonics_are_orthonormal_on_quadrature_grid() {
    let ell = 12;
    let grid = oracle::sphere_grid(ell + 1, 2 * ell + 1);
    for m in -(ell as i64)..=ell as i64 {
        for m2 in [m, (m + 3).min(ell as i64)] {
            let s: Complex<f64> = grid
                .iter()
                .map(|&(t, p, w)| {
                    sph_harm_complex(ell, m, t, p).unwrap() * sph_harm_complex(ell, m2, t, p).unwrap().conj() * w
                })
                .sum();
            let want = if m == m2 { 1.0 } else { 0.0 };
            assert!((s - want).norm() < 1e-12, "m={m} m'={m2}: {s}");
        }
    }
}

#[test]
fn field_parseval_on_quadrature_grid() {
    for ell in [0, 1, 7, 32, 64] {
        let grid = oracle::sphere_grid(ell + 2, 2 * ell + 2);
        for basis in [Basis::Complex, Basis::Real] {
            let c = sample_multipole(ell, 1.3, basis, RngSeed::new(ell as u64, 9)).unwrap();
            let integral: f64 = grid.iter().map(|&(t, p, w)| w * eval_field(&c, t, p).powi(2)).sum();
            assert!(
                (integral - c.norm_sqr()).abs() < 1e-8 * c.norm_sqr().max(1.0),
                "l={ell} {basis:?}"
            );
        }
    }
}

// φ(ρ^obs, ρ; λ) = ½(ρ^obs)² + ½ρ² - ρ^obs ρ + λρ, minimized over ρ ≥ 0
fn phi(obs: f64, rho: f64, lambda: f64) -> f64 {
    0.5 * obs * obs + 0.5 * rho * rho - obs * rho + lambda * rho
}

#[test]
fn shrink_beats_fine_grid_search() {
    let mut s = 0x2545_f491_4f6c_dd1du64;
    let mut uniform = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..1000 {
        let obs = 5.0 * uniform();
        let lambda = 3.0 * uniform();
        let closed = shrink_real(obs, Penalty::new(lambda).unwrap());
        let (_, best) = oracle::grid_minimize(|r| phi(obs, r, lambda), 0.0, 2.0 * obs, 1e-4);
        assert!(phi(obs, closed, lambda) <= best + 1e-8);
        let c = shrink_complex(Complex::from_polar(obs, 1.0), Penalty::new(lambda).unwrap()).norm();
        assert!(phi(obs, c, lambda) <= best + 1e-8);
    }
}

#[test]
fn regularized_multipole_beats_random_candidates() {
    let mut s = 7u64;
    let mut normal = move || {
        // Box-Muller on a xorshift stream
        let mut u = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            ((s >> 11) as f64 + 0.5) / (1u64 << 53) as f64
        };
        let (a, b) = (u(), u());
        (-2.0 * a.ln()).sqrt() * (2.0 * PI * b).cos()
    };
    let penalty = Penalty::new(0.9).unwrap();
    for (scheme, basis) in [
        (Scheme::ComplexModulus, Basis::Complex),
        (Scheme::RealBasis, Basis::Real),
    ] {
        let obs = sample_multipole(6, 1.5, basis, RngSeed::new(4, 2)).unwrap();
        let sol = regularize_multipole(&obs, penalty, scheme).unwrap();
        let best = objective(&obs, &sol, penalty, scheme).unwrap();
        for i in 0..10_000 {
            let scale = [1e-3, 1e-1, 1.0][i % 3];
            let cand = match basis {
                Basis::Complex => {
                    let v: Vec<Complex<f64>> = sol
                        .as_complex()
                        .unwrap()
                        .iter()
                        .enumerate()
                        .map(|(k, a)| {
                            let im = if k == 0 { 0.0 } else { scale * normal() };
                            a + Complex::new(scale * normal(), im)
                        })
                        .collect();
                    HarmonicCoefficients::complex(6, v).unwrap()
                }
                Basis::Real => {
                    let v = sol.as_real().unwrap().iter().map(|a| a + scale * normal()).collect();
                    HarmonicCoefficients::real(6, v).unwrap()
                }
            };
            assert!(best <= objective(&obs, &cand, penalty, scheme).unwrap() + 1e-12);
        }
    }
}
