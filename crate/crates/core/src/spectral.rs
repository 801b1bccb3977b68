//! One-photon spectral amplitudes and the Fourier time-frequency bound.
//!
//! A [`SpectralAmplitude`] samples c(ω) on a uniform [`FrequencyGrid`], normalized so that the
//! trapezoidal integral of |c(ω)|² is one. Its time profile is the direct trapezoidal evaluation of
//!
//! ```text
//! c̃(t) = ∫ dω/√(2π) c(ω) e^{-iωt}
//! ```
//!
//! on a centered time grid. All quantities use ħ = 1, so Δω is also ΔE.
//!
//! The discrete sum is periodic in t with period 2π/step, so a window factor of 1 covers exactly
//! one period and Parseval holds to rounding error for amplitudes whose support fits the grid.
//! Larger factors are accepted but include periodic replicas of the profile.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::extended::Extended;

/// Minimum number of grid points.
pub const MIN_GRID_POINTS: usize = 8;

/// Endpoint |c|² must stay below this fraction of the peak, otherwise the amplitude is truncated.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

/// Lower edge of the Fourier bound, with the quadrature tolerance folded in.
pub const FOURIER_BOUND: f64 = 0.5;
pub const FOURIER_BOUND_TOLERANCE: f64 = 1e-3;

/// Half-widths (in σ) a Gaussian profile must fit inside the grid.
const GAUSSIAN_SUPPORT_SIGMAS: f64 = 8.0;

const UNIFORM_SPACING_RTOL: f64 = 1e-9;

/// Uniform grid `omega_min + k * step` for `k` in `0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omega_min: f64,
    step: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, step: f64, count: usize) -> Result<Self> {
        if !omega_min.is_finite() {
            return Err(invalid("omega_min", "must be finite"));
        }
        require_positive("step", step)?;
        if count < MIN_GRID_POINTS {
            return Err(invalid(
                "count",
                format!("need at least {MIN_GRID_POINTS} points, got {count}"),
            ));
        }
        Ok(Self {
            omega_min,
            step,
            count,
        })
    }

    /// Grid with `count` points from `min` to `max` inclusive.
    pub fn spanning(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(invalid("range", format!("need finite min < max, got [{min}, {max}]")));
        }
        if count < MIN_GRID_POINTS {
            return Err(invalid(
                "count",
                format!("need at least {MIN_GRID_POINTS} points, got {count}"),
            ));
        }
        Self::new(min, (max - min) / (count - 1) as f64, count)
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega(self.count - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.omega_min + k as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.omega(k))
    }

    /// Periodic length `count * step`; the Fourier time spacing is 2π divided by this.
    pub fn period_span(&self) -> f64 {
        self.count as f64 * self.step
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.omega_min && omega <= self.omega_max()
    }

    /// Same grid translated by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            omega_min: self.omega_min + delta,
            ..*self
        }
    }

    fn require_covers(&self, need_min: f64, need_max: f64) -> Result<()> {
        if self.omega_min <= need_min && self.omega_max() >= need_max {
            Ok(())
        } else {
            Err(Error::GridTooNarrow {
                grid_min: self.omega_min,
                grid_max: self.omega_max(),
                need_min,
                need_max,
            })
        }
    }
}

/// Trapezoidal integral of uniformly spaced samples.
pub(crate) fn trapezoid<I>(samples: I, step: f64) -> f64
where
    I: ExactSizeIterator<Item = f64>,
{
    let last = samples.len().saturating_sub(1);
    let sum: f64 = samples
        .enumerate()
        .map(|(k, v)| if k == 0 || k == last { 0.5 * v } else { v })
        .sum();
    sum * step
}

fn trapezoid_weight(k: usize, count: usize, step: f64) -> f64 {
    if k == 0 || k + 1 == count {
        0.5 * step
    } else {
        step
    }
}

/// Sampled spectral amplitude c(ω), normalized on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
    truncated: bool,
}

impl SpectralAmplitude {
    /// Normalizes `values` on `grid`. Returns the amplitude and the factor the input was multiplied by.
    pub fn normalized(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<(Self, f64)> {
        if values.len() != grid.count() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.count(),
            });
        }
        if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(invalid("values", "amplitude contains non-finite entries"));
        }
        let norm = trapezoid(values.iter().map(|c| c.norm_sqr()), grid.step());
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::AllZeroAmplitude);
        }
        let factor = norm.sqrt().recip();
        let values: Vec<Complex64> = values.into_iter().map(|c| c * factor).collect();
        let truncated = endpoint_truncated(&values);
        Ok((
            Self {
                grid,
                values,
                truncated,
            },
            factor,
        ))
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// True when |c|² at a grid endpoint is not negligible; bound checks are then advisory.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_squared(&self) -> f64 {
        trapezoid(self.values.iter().map(|c| c.norm_sqr()), self.grid.step())
    }

    /// Multiplies every sample by `e^{iω t0}`, which moves |c̃(t)|² to later times by `t0`.
    pub fn with_time_delay(&self, t0: f64) -> Self {
        let values = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(w, c)| c * Complex64::from_polar(1.0, w * t0))
            .collect();
        Self {
            grid: self.grid,
            values,
            truncated: self.truncated,
        }
    }

    /// Translates the amplitude in frequency by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            grid: self.grid.shifted(delta),
            values: self.values.clone(),
            truncated: self.truncated,
        }
    }

    /// Multiplies by `scale` and renormalizes.
    pub fn rescaled(&self, scale: Complex64) -> Result<Self> {
        let values = self.values.iter().map(|c| c * scale).collect();
        Self::normalized(self.grid, values).map(|(a, _)| a)
    }

    /// Linear interpolation of c(ω); zero outside the grid.
    pub fn interpolate(&self, omega: f64) -> Complex64 {
        if !self.grid.contains(omega) {
            return Complex64::new(0.0, 0.0);
        }
        let x = (omega - self.grid.omega_min()) / self.grid.step();
        let k = (x.floor() as usize).min(self.grid.count() - 2);
        let frac = x - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    /// Rows `(omega, re, im)` for export.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.grid
            .points()
            .zip(&self.values)
            .map(|(w, c)| (w, c.re, c.im))
            .collect()
    }
}

fn endpoint_truncated(values: &[Complex64]) -> bool {
    let peak = values.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
    let first = values.first().map_or(0.0, |c| c.norm_sqr());
    let last = values.last().map_or(0.0, |c| c.norm_sqr());
    first >= TRUNCATION_THRESHOLD * peak || last >= TRUNCATION_THRESHOLD * peak
}

/// Gaussian amplitude whose density |c|² has mean `omega0` and standard deviation `sigma`.
pub fn make_gaussian(omega0: f64, sigma: f64, grid: FrequencyGrid) -> Result<SpectralAmplitude> {
    make_gaussian_mixture(
        &[MixtureComponent {
            weight: Complex64::new(1.0, 0.0),
            omega0,
            sigma,
            delay: 0.0,
        }],
        grid,
    )
}

/// One term of a Gaussian superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: Complex64,
    pub omega0: f64,
    pub sigma: f64,
    /// Time delay t0 applied as the phase `e^{iω t0}`.
    pub delay: f64,
}

/// Coherent sum of Gaussian amplitudes, each `(2πσ²)^{-1/4} exp(-(ω-ω0)²/(4σ²)) e^{iω t0}`.
pub fn make_gaussian_mixture(
    components: &[MixtureComponent],
    grid: FrequencyGrid,
) -> Result<SpectralAmplitude> {
    if components.is_empty() {
        return Err(Error::EmptyInput);
    }
    for c in components {
        if !c.omega0.is_finite() || !c.delay.is_finite() {
            return Err(invalid("omega0", "must be finite"));
        }
        require_positive("sigma", c.sigma)?;
        grid.require_covers(
            c.omega0 - GAUSSIAN_SUPPORT_SIGMAS * c.sigma,
            c.omega0 + GAUSSIAN_SUPPORT_SIGMAS * c.sigma,
        )?;
        if grid.step() > c.sigma {
            return Err(Error::GridTooCoarse(format!(
                "step {} exceeds Gaussian width {}",
                grid.step(),
                c.sigma
            )));
        }
    }
    let values = grid
        .points()
        .map(|w| {
            components
                .iter()
                .map(|c| {
                    let envelope = (2.0 * PI * c.sigma * c.sigma).powf(-0.25)
                        * (-(w - c.omega0).powi(2) / (4.0 * c.sigma * c.sigma)).exp();
                    c.weight * Complex64::from_polar(envelope, w * c.delay)
                })
                .sum()
        })
        .collect();
    SpectralAmplitude::normalized(grid, values).map(|(a, _)| a)
}

/// Flat amplitude `1/√W` on `[omega0 - W/2, omega0 + W/2]`.
///
/// The two cells cut by the window edges carry the overlapping fraction of the probability, so the
/// sampled density integrates the window exactly instead of rounding it to whole cells.
pub fn make_rect(omega0: f64, width: f64, grid: FrequencyGrid) -> Result<SpectralAmplitude> {
    if !omega0.is_finite() {
        return Err(invalid("omega0", "must be finite"));
    }
    require_positive("width", width)?;
    let (lo, hi) = (omega0 - 0.5 * width, omega0 + 0.5 * width);
    grid.require_covers(lo - grid.step(), hi + grid.step())?;
    if width < 4.0 * grid.step() {
        return Err(Error::GridTooCoarse(format!(
            "window {width} spans fewer than 4 grid steps of {}",
            grid.step()
        )));
    }
    let h = grid.step();
    let values = grid
        .points()
        .map(|w| {
            let overlap = ((w + 0.5 * h).min(hi) - (w - 0.5 * h).max(lo)).max(0.0) / h;
            Complex64::new((overlap / width).sqrt(), 0.0)
        })
        .collect();
    SpectralAmplitude::normalized(grid, values).map(|(a, _)| a)
}

/// Result of [`load_amplitude`].
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedAmplitude {
    pub amplitude: SpectralAmplitude,
    pub normalization_factor: f64,
}

/// Builds a normalized amplitude from `(omega, re, im)` rows on a uniform grid.
pub fn load_amplitude(rows: &[(f64, f64, f64)]) -> Result<LoadedAmplitude> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if rows.len() < MIN_GRID_POINTS {
        return Err(invalid(
            "rows",
            format!("need at least {MIN_GRID_POINTS} rows, got {}", rows.len()),
        ));
    }
    let first = rows[0].0;
    let last = rows[rows.len() - 1].0;
    let step = (last - first) / (rows.len() - 1) as f64;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::NonUniformGrid { row: 1 });
    }
    for (k, pair) in rows.windows(2).enumerate() {
        let d = pair[1].0 - pair[0].0;
        // allow for decimal round-off in the exported abscissae
        let slack = UNIFORM_SPACING_RTOL * step + 4.0 * f64::EPSILON * pair[1].0.abs().max(pair[0].0.abs());
        if d.is_nan() || d <= 0.0 || (d - step).abs() > slack {
            return Err(Error::NonUniformGrid { row: k + 1 });
        }
    }
    let grid = FrequencyGrid::new(first, step, rows.len())?;
    let values = rows.iter().map(|&(_, re, im)| Complex64::new(re, im)).collect();
    let (amplitude, normalization_factor) = SpectralAmplitude::normalized(grid, values)?;
    Ok(LoadedAmplitude {
        amplitude,
        normalization_factor,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct AmplitudeRow {
    omega: f64,
    re: f64,
    im: f64,
}

/// Reads the `omega,re,im` CSV format.
pub fn read_amplitude_csv<R: Read>(reader: R) -> std::result::Result<Vec<(f64, f64, f64)>, csv::Error> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize::<AmplitudeRow>()
        .map(|row| row.map(|r| (r.omega, r.re, r.im)))
        .collect()
}

/// Writes the `omega,re,im` CSV format.
pub fn write_amplitude_csv<W: Write>(a: &SpectralAmplitude, writer: W) -> std::result::Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(writer);
    for (omega, re, im) in a.rows() {
        wtr.serialize(AmplitudeRow { omega, re, im })?;
    }
    wtr.flush()?;
    Ok(())
}

/// ⟨ωⁿ⟩ by trapezoidal quadrature of |c|² ωⁿ.
pub fn moment(a: &SpectralAmplitude, n: u32) -> f64 {
    trapezoid(
        a.grid
            .points()
            .zip(&a.values)
            .map(|(w, c)| c.norm_sqr() * w.powi(n as i32)),
        a.grid.step(),
    )
}

/// Mean, raw second moment and standard deviation of a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub mean: f64,
    pub second_moment: f64,
    pub sigma: f64,
    pub divergent: bool,
}

/// Mean and variance of `density` sampled on a uniform axis, normalized by its own integral.
///
/// The variance is the central moment, which cannot go negative; the raw difference
/// `⟨x²⟩ - ⟨x⟩²` is still checked so that a broken quadrature is reported instead of hidden.
fn density_report(axis: impl Fn(usize) -> f64, density: &[f64], step: f64) -> Result<(UncertaintyReport, f64)> {
    let n = density.len();
    let norm = trapezoid(density.iter().copied(), step);
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::AllZeroAmplitude);
    }
    let mean = trapezoid((0..n).map(|k| density[k] * axis(k)), step) / norm;
    let second = trapezoid((0..n).map(|k| density[k] * axis(k).powi(2)), step) / norm;
    let central = trapezoid((0..n).map(|k| density[k] * (axis(k) - mean).powi(2)), step) / norm;
    let raw = second - mean * mean;
    if raw < -1e-12 * second.abs().max(1.0) {
        return Err(Error::Internal(format!("negative variance {raw:e}")));
    }
    Ok((
        UncertaintyReport {
            mean,
            second_moment: second,
            sigma: central.max(0.0).sqrt(),
            divergent: false,
        },
        norm,
    ))
}

/// Δω from the first two moments of |c|². Never divergent on a finite grid.
pub fn frequency_uncertainty(a: &SpectralAmplitude) -> Result<UncertaintyReport> {
    let grid = a.grid;
    density_report(|k| grid.omega(k), &a.density(), grid.step()).map(|(r, _)| r)
}

/// Sampled c̃(t) on a uniform time grid centered at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    t_min: f64,
    t_step: f64,
    values: Vec<Complex64>,
}

impl TimeProfile {
    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_step(&self) -> f64 {
        self.t_step
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.t_step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Trapezoidal ∫|c̃(t)|² dt; equals one by Parseval for contained support.
    pub fn norm_squared(&self) -> f64 {
        trapezoid(self.values.iter().map(|c| c.norm_sqr()), self.t_step)
    }

    /// Half the extent of the time window.
    pub fn half_window(&self) -> f64 {
        -self.t_min
    }
}

/// Evaluates c̃(t) by a direct trapezoidal sum over the frequency grid.
///
/// The time grid has spacing `2π / (count * step)` and extent `time_window_factor * 2π / step`
/// (rounded to an even number of intervals), centered on t = 0.
pub fn fourier_transform(a: &SpectralAmplitude, time_window_factor: f64) -> Result<TimeProfile> {
    if !(time_window_factor.is_finite() && time_window_factor >= 1.0) {
        return Err(invalid(
            "time_window_factor",
            format!("must be finite and >= 1, got {time_window_factor}"),
        ));
    }
    let grid = a.grid;
    let t_step = 2.0 * PI / grid.period_span();
    let intervals = {
        let raw = (time_window_factor * grid.count() as f64).round() as usize;
        raw + raw % 2
    };
    let t_min = -((intervals / 2) as f64) * t_step;
    let weighted: Vec<Complex64> = a
        .values
        .iter()
        .enumerate()
        .map(|(k, c)| c * trapezoid_weight(k, grid.count(), grid.step()) / (2.0 * PI).sqrt())
        .collect();

    let values = (0..=intervals)
        .into_par_iter()
        .map(|j| {
            let t = t_min + j as f64 * t_step;
            let rotor = Complex64::from_polar(1.0, -grid.step() * t);
            let mut phase = Complex64::from_polar(1.0, -grid.omega_min() * t);
            let mut acc = Complex64::new(0.0, 0.0);
            for w in &weighted {
                acc += w * phase;
                phase *= rotor;
            }
            acc
        })
        .collect();
    Ok(TimeProfile {
        t_min,
        t_step,
        values,
    })
}

/// c̃(t) at a single time, by the same trapezoidal sum as [`fourier_transform`].
pub fn fourier_at(a: &SpectralAmplitude, t: f64) -> Complex64 {
    let grid = a.grid;
    a.values
        .iter()
        .enumerate()
        .map(|(k, c)| {
            c * trapezoid_weight(k, grid.count(), grid.step()) * Complex64::from_polar(1.0, -grid.omega(k) * t)
        })
        .sum::<Complex64>()
        / (2.0 * PI).sqrt()
}

/// Tail heuristic that flags a time second moment as window-limited.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTest {
    /// Outer fraction of the window (split across both ends).
    pub tail_fraction: f64,
    /// Fraction of the second moment the tail may hold before the moment counts as divergent.
    pub moment_fraction: f64,
}

impl Default for DivergenceTest {
    fn default() -> Self {
        Self {
            tail_fraction: 0.1,
            moment_fraction: 0.05,
        }
    }
}

/// Δt from the moments of |c̃(t)|² with the default tail test.
pub fn time_uncertainty(p: &TimeProfile) -> Result<UncertaintyReport> {
    time_uncertainty_with(p, &DivergenceTest::default())
}

pub fn time_uncertainty_with(p: &TimeProfile, test: &DivergenceTest) -> Result<UncertaintyReport> {
    let density = p.density();
    let (mut report, norm) = density_report(|k| p.t(k), &density, p.t_step)?;
    let cutoff = (1.0 - test.tail_fraction) * p.half_window();
    let n = density.len();
    let central = |k: usize| density[k] * (p.t(k) - report.mean).powi(2);
    let total = trapezoid((0..n).map(central), p.t_step) / norm;
    let tail = trapezoid(
        (0..n).map(|k| if p.t(k).abs() > cutoff { central(k) } else { 0.0 }),
        p.t_step,
    ) / norm;
    report.divergent = total > 0.0 && tail > test.moment_fraction * total;
    Ok(report)
}

/// Δω, Δt, their product and whether the product respects the 1/2 bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyProduct {
    pub delta_omega: f64,
    pub delta_t: Extended,
    pub product: Extended,
    pub bound_satisfied: bool,
    /// Set when the amplitude is truncated at the grid edge; the check is then advisory.
    pub advisory: bool,
}

pub fn uncertainty_product(a: &SpectralAmplitude) -> Result<UncertaintyProduct> {
    uncertainty_product_with(a, 1.0, &DivergenceTest::default())
}

pub fn uncertainty_product_with(
    a: &SpectralAmplitude,
    time_window_factor: f64,
    test: &DivergenceTest,
) -> Result<UncertaintyProduct> {
    let freq = frequency_uncertainty(a)?;
    let time = time_uncertainty_with(&fourier_transform(a, time_window_factor)?, test)?;
    Ok(combine(freq.sigma, &time, a.is_truncated()))
}

pub(crate) fn combine(delta_omega: f64, time: &UncertaintyReport, advisory: bool) -> UncertaintyProduct {
    if time.divergent {
        UncertaintyProduct {
            delta_omega,
            delta_t: Extended::Infinite,
            product: Extended::Infinite,
            bound_satisfied: true,
            advisory,
        }
    } else {
        let product = delta_omega * time.sigma;
        UncertaintyProduct {
            delta_omega,
            delta_t: Extended::Finite(time.sigma),
            product: Extended::Finite(product),
            bound_satisfied: product >= FOURIER_BOUND - FOURIER_BOUND_TOLERANCE,
            advisory,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(min: f64, max: f64, n: usize) -> FrequencyGrid {
        FrequencyGrid::spanning(min, max, n).unwrap()
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(FrequencyGrid::new(0.0, 0.0, 16).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 7).is_err());
        assert!(FrequencyGrid::new(f64::NAN, 1.0, 16).is_err());
        let g = FrequencyGrid::new(-1.0, 0.5, 8).unwrap();
        assert_eq!(g.omega(3), 0.5);
        assert_eq!(g.omega_max(), 2.5);
    }

    #[test]
    fn gaussian_unit_sigma() {
        let a = make_gaussian(0.0, 1.0, grid(-10.0, 10.0, 2048)).unwrap();
        assert!(!a.is_truncated());
        assert!((moment(&a, 0) - 1.0).abs() < 1e-9);
        assert!((moment(&a, 2) - 1.0).abs() < 1e-4);
        let r = frequency_uncertainty(&a).unwrap();
        assert!((r.sigma - 1.0).abs() < 1e-4);
        assert!((r.sigma.powi(2) - (r.second_moment - r.mean.powi(2))).abs() < 1e-9);
    }

    #[test]
    fn gaussian_mean_is_center() {
        let a = make_gaussian(5.0, 0.5, grid(0.0, 10.0, 2048)).unwrap();
        assert!((frequency_uncertainty(&a).unwrap().mean - 5.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_grid_too_narrow() {
        let err = make_gaussian(0.0, 1.0, grid(-5.0, 5.0, 512)).unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow { .. }));
    }

    #[test]
    fn rect_moments() {
        let a = make_rect(0.0, 1.0, grid(-1.0, 1.0, 8192)).unwrap();
        let r = frequency_uncertainty(&a).unwrap();
        assert!((r.sigma - 1.0 / 12f64.sqrt()).abs() < 1e-4, "{}", r.sigma);
        assert!((moment(&a, 2) - 1.0 / 12.0).abs() < 1e-4);
        let b = make_rect(3.0, 2.0, grid(1.0, 5.0, 4096)).unwrap();
        assert!((frequency_uncertainty(&b).unwrap().mean - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rect_needs_margin() {
        assert!(matches!(
            make_rect(0.0, 2.0, grid(-1.0, 1.0, 512)),
            Err(Error::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn all_zero_and_empty_inputs() {
        assert_eq!(load_amplitude(&[]).unwrap_err(), Error::EmptyInput);
        let zeros: Vec<_> = (0..3).map(|k| (k as f64, 0.0, 0.0)).collect();
        // three rows also fall below the minimum grid size; pad to isolate the all-zero path
        assert!(load_amplitude(&zeros).is_err());
        let zeros: Vec<_> = (0..16).map(|k| (k as f64, 0.0, 0.0)).collect();
        assert_eq!(load_amplitude(&zeros).unwrap_err(), Error::AllZeroAmplitude);
    }

    #[test]
    fn non_uniform_rows_rejected() {
        let mut rows: Vec<_> = (0..16).map(|k| (k as f64, 1.0, 0.0)).collect();
        rows[7].0 += 0.01;
        assert!(matches!(
            load_amplitude(&rows),
            Err(Error::NonUniformGrid { .. })
        ));
    }

    #[test]
    fn truncated_flag_set_when_support_hits_edge() {
        let g = grid(-2.0, 2.0, 256);
        let values = g.points().map(|w| Complex64::new((-w * w / 4.0).exp(), 0.0)).collect();
        let (a, _) = SpectralAmplitude::normalized(g, values).unwrap();
        assert!(a.is_truncated());
        assert!(uncertainty_product(&a).unwrap().advisory);
    }

    #[test]
    fn parseval_for_contained_gaussian() {
        let a = make_gaussian(1.0, 0.7, grid(-8.0, 10.0, 1024)).unwrap();
        let p = fourier_transform(&a, 1.0).unwrap();
        assert!((p.norm_squared() - 1.0).abs() < 1e-6);
        assert!(p.t(p.count() / 2).abs() < 1e-12);
    }

    #[test]
    fn window_factor_must_be_at_least_one() {
        let a = make_gaussian(0.0, 1.0, grid(-10.0, 10.0, 256)).unwrap();
        assert!(fourier_transform(&a, 0.5).is_err());
    }

    #[test]
    fn gaussian_saturates_bound() {
        let a = make_gaussian(0.0, 1.0, grid(-10.0, 10.0, 2048)).unwrap();
        let u = uncertainty_product(&a).unwrap();
        assert!((u.delta_t.to_f64() - 0.5).abs() < 1e-3);
        assert!((u.product.to_f64() - 0.5).abs() < 1e-3);
        assert!(u.bound_satisfied && !u.advisory);
    }

    #[test]
    fn interpolation_is_exact_on_nodes() {
        let a = make_gaussian(0.0, 1.0, grid(-10.0, 10.0, 128)).unwrap();
        let g = *a.grid();
        for k in [0, 5, 64, 127] {
            assert!((a.interpolate(g.omega(k)) - a.values()[k]).norm() < 1e-14);
        }
        assert_eq!(a.interpolate(11.0), Complex64::new(0.0, 0.0));
    }
}
