//! Entangled box-photon energy state and finite-resolution box weighing.
//!
//! After emission the joint state is `∫dω c(ω) |Ω - ω⟩_box |ω⟩_photon` with `Ω = m₀c²/ħ`. Every
//! branch carries total energy Ω, so the sum is sharp while each marginal is as uncertain as c(ω).
//!
//! Weighing the box is modelled as a von Neumann pointer of resolution σ: the reading is
//! `ω_meas = ω + σ·ξ` with ω drawn from |c|² and ξ standard normal, and the photon amplitude
//! collapses to `c(ω) exp(-(ω - ω_meas)² / (4σ²))`. As σ → 0 this approaches the sharp collapse
//! onto `|Ω - ω_meas⟩|ω_meas⟩`. The reading distribution is exactly the normalizer of the
//! posterior, which is what makes the outcome-averaged photon marginal equal to the prior.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::rng::{rng_from_seed, trial_seed, TrialRng, RNG_ALGORITHM};
use crate::spectral::{
    combine, fourier_transform, frequency_uncertainty, time_uncertainty, FrequencyGrid,
    SpectralAmplitude, UncertaintyProduct, UncertaintyReport,
};
use crate::stats::{bin_probabilities, chi_square, histogram, ChiSquare, GridSampler};

/// Minimum number of trials for the no-signaling test.
pub const MIN_NO_SIGNALING_TRIALS: usize = 1000;

/// Significance level of the chi-square tests.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;

/// The prior grid is reused for the posterior while its step resolves the pointer this finely.
const POINTER_SAMPLES_PER_SIGMA: f64 = 8.0;

/// Half-width, in pointer σ, of the refined posterior grid.
const POSTERIOR_HALF_WIDTH_SIGMAS: f64 = 12.0;

/// Bits below the leading bit of Ω kept by the conservation lattice.
const LATTICE_BITS: i32 = 40;

/// Joint box-photon state, before or after a box-energy measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEnergyState {
    box_rest_frequency: f64,
    photon: SpectralAmplitude,
    last_outcome: Option<f64>,
}

/// One box weighing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub outcome_frequency: f64,
    pub resolution: f64,
    pub box_energy_reading: f64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

/// Spacing of the dyadic lattice on which Ω and every reading live.
///
/// Ω and a reading ω are both integer multiples of this quantum and far below 2⁵³ quanta, so
/// `Ω - ω` is computed exactly and adding ω back returns Ω bit for bit.
fn lattice_quantum(rest: f64) -> f64 {
    2f64.powi(rest.log2().floor() as i32 - LATTICE_BITS)
}

fn snap(value: f64, quantum: f64) -> f64 {
    (value / quantum).round() * quantum
}

/// Entangled state of a box with rest frequency `box_rest_frequency` and an emitted photon.
///
/// The rest frequency is snapped to the conservation lattice, a relative change below 1e-12.
pub fn make_photon_box(box_rest_frequency: f64, photon: SpectralAmplitude) -> Result<JointEnergyState> {
    require_positive("box_rest_frequency", box_rest_frequency)?;
    let max_omega = photon.grid().omega_max();
    if box_rest_frequency <= max_omega {
        return Err(Error::RestFrequencyTooSmall {
            rest: box_rest_frequency,
            max_omega,
        });
    }
    let rest = snap(box_rest_frequency, lattice_quantum(box_rest_frequency));
    Ok(JointEnergyState {
        box_rest_frequency: rest,
        photon,
        last_outcome: None,
    })
}

/// Draws the photon frequency the pointer couples to. Implemented by the Born-rule sampler and
/// by test fixtures that break it on purpose.
pub trait OutcomeSampler: Sync {
    fn draw(&self, prior: &GridSampler, rng: &mut TrialRng) -> f64;
}

/// Inverse-CDF sampling of |c(ω)|².
#[derive(Debug, Clone, Copy, Default)]
pub struct BornSampler;

impl OutcomeSampler for BornSampler {
    fn draw(&self, prior: &GridSampler, rng: &mut TrialRng) -> f64 {
        prior.quantile(rng.random::<f64>())
    }
}

impl JointEnergyState {
    pub fn box_rest_frequency(&self) -> f64 {
        self.box_rest_frequency
    }

    pub fn photon(&self) -> &SpectralAmplitude {
        &self.photon
    }

    pub fn is_collapsed(&self) -> bool {
        self.last_outcome.is_some()
    }

    pub fn last_outcome(&self) -> Option<f64> {
        self.last_outcome
    }

    /// Box energy eigenvalue paired with photon frequency `omega`.
    pub fn box_frequency(&self, omega: f64) -> f64 {
        self.box_rest_frequency - omega
    }

    /// Spread of box plus photon energy. Zero: every branch `|Ω - ω⟩|ω⟩` has total Ω.
    pub fn total_energy_uncertainty(&self) -> f64 {
        0.0
    }

    /// Photon and box energy reports. The box mirrors the photon: same σ, mean `Ω - ⟨ω⟩`.
    pub fn marginal_uncertainties(&self) -> Result<(UncertaintyReport, UncertaintyReport)> {
        let photon = frequency_uncertainty(&self.photon)?;
        let rest = self.box_rest_frequency;
        let boxed = UncertaintyReport {
            mean: rest - photon.mean,
            second_moment: rest * rest - 2.0 * rest * photon.mean + photon.second_moment,
            sigma: photon.sigma,
            divergent: false,
        };
        Ok((photon, boxed))
    }

    /// Weighs the box with Gaussian pointer resolution `resolution`.
    pub fn measure_box_energy(&self, resolution: f64, seed: u64) -> Result<(MeasurementRecord, JointEnergyState)> {
        let prior = GridSampler::from_amplitude(&self.photon)?;
        self.measure_with(&BornSampler, &prior, resolution, seed)
            .map(|(record, state, _)| (record, state))
    }

    /// Measurement with an explicit outcome sampler. Also returns the generator so the caller
    /// can keep drawing from the same trial stream.
    pub fn measure_with<S: OutcomeSampler + ?Sized>(
        &self,
        sampler: &S,
        prior: &GridSampler,
        resolution: f64,
        seed: u64,
    ) -> Result<(MeasurementRecord, JointEnergyState, TrialRng)> {
        let mut rng = rng_from_seed(seed);
        let record = self.read_pointer(sampler, prior, resolution, seed, &mut rng)?;
        let posterior = collapse(&self.photon, record.outcome_frequency, resolution)?;
        let state = JointEnergyState {
            box_rest_frequency: self.box_rest_frequency,
            photon: posterior,
            last_outcome: Some(record.outcome_frequency),
        };
        Ok((record, state, rng))
    }

    /// Box reading alone, without building the posterior.
    pub fn weigh(&self, prior: &GridSampler, resolution: f64, seed: u64) -> Result<MeasurementRecord> {
        self.read_pointer(&BornSampler, prior, resolution, seed, &mut rng_from_seed(seed))
    }

    fn read_pointer<S: OutcomeSampler + ?Sized>(
        &self,
        sampler: &S,
        prior: &GridSampler,
        resolution: f64,
        seed: u64,
        rng: &mut TrialRng,
    ) -> Result<MeasurementRecord> {
        if self.is_collapsed() {
            return Err(Error::AlreadyCollapsed);
        }
        require_positive("resolution", resolution)?;
        let omega = sampler.draw(prior, rng);
        let noise: f64 = rng.sample(StandardNormal);
        let quantum = lattice_quantum(self.box_rest_frequency);
        let reading = snap(omega + resolution * noise, quantum);
        if reading.abs() >= quantum * 2f64.powi(53) {
            return Err(Error::Internal(format!(
                "pointer reading {reading} outside the conservation lattice"
            )));
        }
        Ok(MeasurementRecord {
            outcome_frequency: reading,
            resolution,
            box_energy_reading: self.box_rest_frequency - reading,
            seed,
            rng_algorithm: RNG_ALGORITHM,
        })
    }

    /// Fourier Δt of the collapsed photon amplitude.
    pub fn post_measurement_time_uncertainty(&self, time_window_factor: f64) -> Result<UncertaintyReport> {
        if !self.is_collapsed() {
            return Err(Error::NotCollapsed);
        }
        time_uncertainty(&fourier_transform(&self.photon, time_window_factor)?)
    }

    /// Δω, Δt and their product for the current photon amplitude.
    pub fn photon_uncertainty_product(&self, time_window_factor: f64) -> Result<UncertaintyProduct> {
        let freq = frequency_uncertainty(&self.photon)?;
        let time = time_uncertainty(&fourier_transform(&self.photon, time_window_factor)?)?;
        Ok(combine(freq.sigma, &time, self.photon.is_truncated()))
    }

    /// Born-rule check: histogram of `trials` readings against |c|² on equal-probability bins.
    pub fn born_rule_check(&self, resolution: f64, trials: usize, bins: usize, seed: u64) -> Result<BornRuleCheck> {
        if self.is_collapsed() {
            return Err(Error::AlreadyCollapsed);
        }
        let prior = GridSampler::from_amplitude(&self.photon)?;
        let records = (0..trials as u64)
            .into_par_iter()
            .map(|i| self.weigh(&prior, resolution, trial_seed(seed, i)))
            .collect::<Result<Vec<_>>>()?;
        let conservation_violations = records
            .iter()
            .filter(|r| r.box_energy_reading + r.outcome_frequency != self.box_rest_frequency)
            .count();
        let outcomes: Vec<f64> = records.iter().map(|r| r.outcome_frequency).collect();
        let edges = prior.equiprobable_edges(bins);
        let chi = chi_square(&histogram(&outcomes, &edges), &bin_probabilities(|x| prior.cdf(x), &edges))?;
        Ok(BornRuleCheck {
            chi_square: chi,
            passed: chi.p_value > CHI_SQUARE_ALPHA,
            conservation_violations,
        })
    }

    /// Outcome-averaged photon marginal against the prior.
    ///
    /// Each trial weighs the box, then draws one photon frequency from the collapsed amplitude.
    /// Pooled over trials those draws follow the prior |c|² when no signal passes from box to photon.
    pub fn no_signaling_check(&self, resolution: f64, trials: usize, bins: usize, seed: u64) -> Result<NoSignalingCheck> {
        self.no_signaling_check_with(&BornSampler, resolution, trials, bins, seed)
    }

    pub fn no_signaling_check_with<S: OutcomeSampler + ?Sized>(
        &self,
        sampler: &S,
        resolution: f64,
        trials: usize,
        bins: usize,
        seed: u64,
    ) -> Result<NoSignalingCheck> {
        if self.is_collapsed() {
            return Err(Error::AlreadyCollapsed);
        }
        if trials < MIN_NO_SIGNALING_TRIALS {
            return Err(Error::TooFewTrials {
                got: trials,
                min: MIN_NO_SIGNALING_TRIALS,
            });
        }
        let prior = GridSampler::from_amplitude(&self.photon)?;
        let photon_draws = (0..trials as u64)
            .into_par_iter()
            .map(|i| {
                let (_, post, mut rng) = self.measure_with(sampler, &prior, resolution, trial_seed(seed, i))?;
                let posterior = GridSampler::from_amplitude(&post.photon)?;
                Ok(posterior.quantile(rng.random::<f64>()))
            })
            .collect::<Result<Vec<f64>>>()?;
        let edges = prior.equiprobable_edges(bins);
        let chi = chi_square(
            &histogram(&photon_draws, &edges),
            &bin_probabilities(|x| prior.cdf(x), &edges),
        )?;
        Ok(NoSignalingCheck {
            statistic: chi.statistic,
            p_value: chi.p_value,
            passed: chi.p_value > CHI_SQUARE_ALPHA,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BornRuleCheck {
    pub chi_square: ChiSquare,
    pub passed: bool,
    pub conservation_violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoSignalingCheck {
    pub statistic: f64,
    pub p_value: f64,
    pub passed: bool,
}

/// Posterior photon amplitude `c(ω) exp(-(ω - reading)² / (4σ²))`, renormalized.
///
/// When the prior grid is too coarse for the pointer width, the posterior lives on a refined grid
/// of the same size centered on the reading, with c(ω) linearly interpolated.
fn collapse(prior: &SpectralAmplitude, reading: f64, resolution: f64) -> Result<SpectralAmplitude> {
    let grid = if prior.grid().step() * POINTER_SAMPLES_PER_SIGMA <= resolution {
        *prior.grid()
    } else {
        let half = POSTERIOR_HALF_WIDTH_SIGMAS * resolution;
        FrequencyGrid::spanning(reading - half, reading + half, prior.grid().count())?
    };
    let same_grid = grid == *prior.grid();
    let values: Vec<Complex64> = grid
        .points()
        .enumerate()
        .map(|(k, w)| {
            let c = if same_grid { prior.values()[k] } else { prior.interpolate(w) };
            c * (-(w - reading).powi(2) / (4.0 * resolution * resolution)).exp()
        })
        .collect();
    match SpectralAmplitude::normalized(grid, values) {
        Ok((a, _)) => Ok(a),
        Err(Error::AllZeroAmplitude) => Err(Error::PosteriorUnderflow { resolution }),
        Err(e) => Err(e),
    }
}
