mod common;

use std::f64::consts::PI;

use common::{normal_pdf, quadrature_std, random_mixture};
use num_complex::Complex64;
use photon_box::spectral::*;
use proptest::prelude::*;

fn grid(min: f64, max: f64, n: usize) -> FrequencyGrid {
    FrequencyGrid::spanning(min, max, n).unwrap()
}

#[test]
fn narrow_gaussian_matches_analytic_pair() {
    let sigma = 1e-3;
    // oracle: |c̃(t)|² of a Gaussian c(ω) with |c|² of width σ is a Gaussian of width 1/(2σ);
    // integrate that analytic density independently
    let oracle_dt = quadrature_std(|t| normal_pdf(t, 0.0, 1.0 / (2.0 * sigma)), -8000.0, 8000.0);
    assert!((oracle_dt - 500.0).abs() < 1e-6);

    let a = make_gaussian(0.0, sigma, grid(-0.02, 0.02, 2048)).unwrap();
    let u = uncertainty_product(&a).unwrap();
    assert!((u.delta_omega - 1e-3).abs() < 1e-7);
    assert!((u.delta_t.to_f64() - oracle_dt).abs() / oracle_dt < 1e-4);
    assert!((u.product.to_f64() - 0.5).abs() < 1e-3);
}

#[test]
fn unit_gaussian_time_density() {
    let a = make_gaussian(0.0, 1.0, grid(-10.0, 10.0, 2048)).unwrap();
    for t in [0.0, 0.5] {
        let got = fourier_at(&a, t).norm_sqr();
        assert!((got - normal_pdf(t, 0.0, 0.5)).abs() < 1e-4, "t={t}: {got}");
    }
    let r = time_uncertainty(&fourier_transform(&a, 1.0).unwrap()).unwrap();
    assert!(!r.divergent);
    assert!((r.sigma - 0.5).abs() < 1e-3);
    assert!((r.sigma.powi(2) - (r.second_moment - r.mean.powi(2))).abs() < 1e-9);
}

#[test]
fn wide_gaussian_time_spread() {
    let a = make_gaussian(0.0, 2.0, grid(-20.0, 20.0, 2048)).unwrap();
    let r = time_uncertainty(&fourier_transform(&a, 1.0).unwrap()).unwrap();
    assert!((r.sigma - 0.25).abs() < 1e-3);
}

#[test]
fn gaussians_saturate_across_scales() {
    for sigma in [0.01, 0.1, 1.0, 10.0] {
        let a = make_gaussian(0.0, sigma, grid(-10.0 * sigma, 10.0 * sigma, 2048)).unwrap();
        let u = uncertainty_product(&a).unwrap();
        assert!((u.product.to_f64() - 0.5).abs() < 1e-3, "σ={sigma}: {:?}", u);
        assert!(u.bound_satisfied);
    }
}

#[test]
fn rect_transform_first_zero() {
    let width = 1.0;
    let a = make_rect(0.0, width, grid(-4.0, 4.0, 2048)).unwrap();
    let p = fourier_transform(&a, 1.0).unwrap();
    let density = p.density();
    let start = p.count() / 2;
    let first_min = (start + 1..p.count() - 1)
        .find(|&k| density[k] <= density[k - 1] && density[k] <= density[k + 1])
        .unwrap();
    let expected = 2.0 * PI / width;
    assert!((p.t(first_min) - expected).abs() <= p.t_step(), "{}", p.t(first_min));
}

#[test]
fn rect_time_spread_diverges() {
    // oracle: doubling the time window (halving the frequency step) keeps growing ⟨t²⟩
    let mut previous = 0.0;
    for level in 0..5 {
        let n = 512 << level;
        let a = make_rect(0.0, 1.0, grid(-2.0, 2.0, n)).unwrap();
        let r = time_uncertainty(&fourier_transform(&a, 1.0).unwrap()).unwrap();
        assert!(r.divergent, "level {level}");
        if level > 0 {
            assert!(r.second_moment > 1.5 * previous, "{} vs {previous}", r.second_moment);
        }
        previous = r.second_moment;
    }
    let a = make_rect(0.0, 1.0, grid(-2.0, 2.0, 2048)).unwrap();
    let u = uncertainty_product(&a).unwrap();
    assert!(u.product.is_infinite() && u.delta_t.is_infinite() && u.bound_satisfied);
}

#[test]
fn divergence_thresholds_are_configurable() {
    let a = make_rect(0.0, 1.0, grid(-2.0, 2.0, 1024)).unwrap();
    let p = fourier_transform(&a, 1.0).unwrap();
    let lenient = DivergenceTest {
        tail_fraction: 0.1,
        moment_fraction: 0.9,
    };
    assert!(!time_uncertainty_with(&p, &lenient).unwrap().divergent);
}

#[test]
fn two_separated_gaussians() {
    use photon_box::spectral::MixtureComponent;
    let comp = |omega0| MixtureComponent {
        weight: Complex64::new(1.0, 0.0),
        omega0,
        sigma: 0.1,
        delay: 0.0,
    };
    let a = make_gaussian_mixture(&[comp(-5.0), comp(5.0)], grid(-7.0, 7.0, 4096)).unwrap();
    let oracle = (5.0f64.powi(2) + 0.1f64.powi(2)).sqrt();
    let r = frequency_uncertainty(&a).unwrap();
    assert!((r.sigma - oracle).abs() < 1e-2);
    assert!((r.sigma - 5.001).abs() < 1e-2);
}

#[test]
fn rect_second_moment_matches_closed_form() {
    // ∫_{-1/2}^{1/2} ω² dω = 1/12
    let oracle = common::simpson(|w| w * w, -0.5, 0.5, 1000);
    let a = make_rect(0.0, 1.0, grid(-1.0, 1.0, 8192)).unwrap();
    assert!((moment(&a, 2) - oracle).abs() < 1e-4);
}

#[test]
fn csv_round_trip_preserves_spread() {
    let a = make_gaussian(3.0, 0.7, grid(-5.0, 11.0, 1024)).unwrap();
    let mut buf = Vec::new();
    write_amplitude_csv(&a, &mut buf).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("omega,re,im\n"));
    let rows = read_amplitude_csv(buf.as_slice()).unwrap();
    let loaded = load_amplitude(&rows).unwrap();
    let before = frequency_uncertainty(&a).unwrap().sigma;
    let after = frequency_uncertainty(&loaded.amplitude).unwrap().sigma;
    assert!((before - after).abs() < 1e-12);
    assert!((loaded.normalization_factor - 1.0).abs() < 1e-12);
}

#[test]
fn unnormalized_input_gives_same_spread() {
    let a = make_gaussian(0.0, 1.0, grid(-10.0, 10.0, 512)).unwrap();
    let doubled: Vec<_> = a.rows().into_iter().map(|(w, re, im)| (w, 2.0 * re, 2.0 * im)).collect();
    let loaded = load_amplitude(&doubled).unwrap();
    assert!((loaded.normalization_factor - 0.5).abs() < 1e-12);
    // oracle: the analytic unit Gaussian
    let oracle = quadrature_std(|w| normal_pdf(w, 0.0, 1.0), -10.0, 10.0);
    assert!((frequency_uncertainty(&loaded.amplitude).unwrap().sigma - oracle).abs() < 1e-6);
}

#[test]
fn time_delay_translates_profile() {
    let a = make_gaussian(1.0, 0.8, grid(-9.0, 11.0, 1024)).unwrap();
    let base = time_uncertainty(&fourier_transform(&a, 1.0).unwrap()).unwrap();
    let moved = time_uncertainty(&fourier_transform(&a.with_time_delay(4.0), 1.0).unwrap()).unwrap();
    assert!((moved.mean - base.mean - 4.0).abs() < 1e-9, "{base:?} {moved:?}");
    assert!((moved.sigma - base.sigma).abs() < 1e-9);
    // a phase e^{-iω t0} is a delay of -t0 under the e^{-iωt} transform convention
    let back = time_uncertainty(&fourier_transform(&a.with_time_delay(-4.0), 1.0).unwrap()).unwrap();
    assert!((back.mean - base.mean + 4.0).abs() < 1e-9);
    assert!((back.sigma - base.sigma).abs() < 1e-9);
}

#[test]
fn delta_regularization_limit() {
    let mut last: Option<(f64, f64)> = None;
    for sigma in [0.1, 0.01, 0.001] {
        let a = make_gaussian(0.0, sigma, grid(-10.0 * sigma, 10.0 * sigma, 2048)).unwrap();
        let u = uncertainty_product(&a).unwrap();
        let dt = u.delta_t.to_f64();
        assert!(u.product.to_f64() >= 0.5 - 1e-3);
        if let Some((dw, t)) = last {
            assert!(u.delta_omega < dw && dt > t);
        }
        last = Some((u.delta_omega, dt));
    }
}

#[test]
fn random_mixtures_respect_bound() {
    for seed in 0..20 {
        let a = random_mixture(seed);
        assert!(!a.is_truncated());
        let p = fourier_transform(&a, 1.0).unwrap();
        assert!((p.norm_squared() - 1.0).abs() < 1e-6, "seed {seed}");
        let u = uncertainty_product(&a).unwrap();
        assert!(u.bound_satisfied, "seed {seed}: {:?}", u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalization_invariance(seed in 0u64..1000, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let a = random_mixture(seed);
        let b = a.rescaled(Complex64::new(re, im)).unwrap();
        let (fa, fb) = (frequency_uncertainty(&a).unwrap(), frequency_uncertainty(&b).unwrap());
        prop_assert!((fa.sigma - fb.sigma).abs() <= 1e-12 * fa.sigma);
        let ta = time_uncertainty(&fourier_transform(&a, 1.0).unwrap()).unwrap();
        let tb = time_uncertainty(&fourier_transform(&b, 1.0).unwrap()).unwrap();
        prop_assert!((ta.sigma - tb.sigma).abs() <= 1e-12 * ta.sigma);
    }

    #[test]
    fn shift_covariance(seed in 0u64..1000, shift in -50.0f64..50.0) {
        let a = random_mixture(seed);
        let b = a.shifted(shift);
        let (fa, fb) = (frequency_uncertainty(&a).unwrap(), frequency_uncertainty(&b).unwrap());
        prop_assert!((fb.mean - fa.mean - shift).abs() < 1e-9);
        prop_assert!((fa.sigma - fb.sigma).abs() < 1e-9);
        let ta = time_uncertainty(&fourier_transform(&a, 1.0).unwrap()).unwrap();
        let tb = time_uncertainty(&fourier_transform(&b, 1.0).unwrap()).unwrap();
        prop_assert!((ta.sigma - tb.sigma).abs() < 1e-9);
    }
}
