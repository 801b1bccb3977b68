use photon_box::bohr::*;
use photon_box::rng::rng_from_seed;
use rand::Rng;

fn si(t: f64, t0: f64, delta_x: f64, delta_p: f64) -> WeighingScenario {
    WeighingScenario {
        constants: PhysicalConstants::default(),
        weighing_duration_t: t,
        reference_time_t0: t0,
        delta_x,
        delta_p,
        shutter_delta_t: 1e-9,
        enforce_ratio: true,
    }
}

#[test]
fn si_shutter_bound() {
    let e = photon_energy_lower_bound(1e-9, &PhysicalConstants::default()).unwrap();
    assert!((e - 1.0545718e-25).abs() < 1e-37);
}

#[test]
fn si_weighing_chain() {
    let hbar = PhysicalConstants::default().hbar;
    let delta_p = 1e-30;
    let s = si(1.0, 1.0, hbar / delta_p, delta_p);
    let b = bohr_product(&s).unwrap();
    // oracle: ΔE = Δp c²/(g t), Δt = g Δx t₀/c², computed by hand
    let (c, g) = (2.99792458e8f64, 9.80665);
    let de = delta_p * c * c / g;
    let dt = g * (hbar / delta_p) / (c * c);
    assert!((b.energy_precision - de).abs() / de < 1e-14);
    assert!((b.emission_time_spread - dt).abs() / dt < 1e-14);
    assert!((b.et_product / hbar - 1.0).abs() < 1e-9);
    assert!(b.bound_satisfied_if_px_bound || (b.px_product / hbar - 1.0).abs() < 1e-15);
}

#[test]
fn identity_over_random_draws() {
    let mut rng = rng_from_seed(2718);
    for _ in 0..1000 {
        let k = PhysicalConstants {
            hbar: 10f64.powf(rng.random_range(-35.0..1.0)),
            c: 10f64.powf(rng.random_range(0.0..9.0)),
            g: 10f64.powf(rng.random_range(-2.0..2.0)),
        };
        let t = 10f64.powf(rng.random_range(-3.0..3.0));
        let s = WeighingScenario {
            constants: k,
            weighing_duration_t: t,
            reference_time_t0: t * rng.random_range(0.9..1.1),
            delta_x: 10f64.powf(rng.random_range(-10.0..2.0)),
            delta_p: 10f64.powf(rng.random_range(-35.0..0.0)),
            shutter_delta_t: 1.0,
            enforce_ratio: true,
        };
        let b = bohr_product(&s).unwrap();
        let direct = s.ratio_t0_over_t() * s.delta_p * s.delta_x;
        assert!((b.chained_product - direct).abs() <= 1e-12 * direct, "{s:?}");
        assert!((b.et_product - direct).abs() <= 1e-12 * direct);
    }
}

#[test]
fn exact_hbar_when_premise_is_tight() {
    let k = PhysicalConstants::unit();
    let s = WeighingScenario {
        constants: PhysicalConstants { hbar: 0.5, ..k },
        weighing_duration_t: 2.0,
        reference_time_t0: 2.0,
        delta_x: 0.25,
        delta_p: 2.0,
        shutter_delta_t: 1.0,
        enforce_ratio: true,
    };
    let b = bohr_product(&s).unwrap();
    assert_eq!(b.et_product, 0.5);
    assert!(b.bound_satisfied_if_px_bound);
}

#[test]
fn time_lapse_is_linear_in_height() {
    let k = PhysicalConstants::unit();
    let t0 = 10.0;
    let a = gravitational_time_lapse(1e-3, t0, &k).unwrap() - t0;
    let b = gravitational_time_lapse(3e-3, t0, &k).unwrap() - t0;
    assert!((b / a - 3.0).abs() < 1e-9);
}

#[test]
fn ratio_guard() {
    let s = si(1.0, 1.5, 1.0, 1.0);
    assert!(bohr_product(&s).is_err());
    assert!(bohr_product(&WeighingScenario { enforce_ratio: false, ..s }).is_ok());
}

#[test]
fn si_scenario_with_slow_surface_clock() {
    let hbar = PhysicalConstants::default().hbar;
    let s = si(1.0, 1.000001, hbar / 1e-30, 1e-30);
    let b = bohr_product(&s).unwrap();
    assert!((b.et_product / hbar - 1.000001).abs() < 1e-9, "{}", b.et_product / hbar);
    // the rounded Δx = 1.0546e-4 overshoots Δp·Δx = ħ by 2.7e-5
    let rounded = bohr_product(&si(1.0, 1.000001, 1.0546e-4, 1e-30)).unwrap();
    assert!((rounded.px_product / hbar - 1.0000267).abs() < 1e-7);
}
