#![allow(dead_code)]

use num_complex::Complex64;
use photon_box::rng::rng_from_seed;
use photon_box::spectral::{make_gaussian_mixture, FrequencyGrid, MixtureComponent, SpectralAmplitude};
use rand::Rng;

/// Grid used for the random smooth amplitudes.
pub fn mixture_grid() -> FrequencyGrid {
    FrequencyGrid::spanning(-20.0, 20.0, 1024).unwrap()
}

/// Coherent sum of three Gaussians with random centers, widths, complex weights and delays.
pub fn random_mixture(seed: u64) -> SpectralAmplitude {
    let mut rng = rng_from_seed(seed);
    let components: Vec<MixtureComponent> = (0..3)
        .map(|_| MixtureComponent {
            weight: Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU)),
            omega0: rng.random_range(-5.0..5.0),
            sigma: rng.random_range(0.3..1.5),
            delay: rng.random_range(-3.0..3.0),
        })
        .collect();
    make_gaussian_mixture(&components, mixture_grid()).unwrap()
}

/// Composite Simpson rule on [a, b] with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        s += if k % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

/// Standard deviation of a density by Simpson quadrature on [a, b].
pub fn quadrature_std(density: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let n = 20_000;
    let norm = simpson(&density, a, b, n);
    let mean = simpson(|x| x * density(x), a, b, n) / norm;
    let var = simpson(|x| (x - mean).powi(2) * density(x), a, b, n) / norm;
    var.sqrt()
}

/// Normal density.
pub fn normal_pdf(x: f64, mean: f64, sigma: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}
