//! Two-branch EPR momentum state and the Gaussian wavepacket family.
//!
//! The state is `a₀|p⟩|-p⟩ + a₁|-p⟩|p⟩`. Momentum eigenkets are never sampled on a grid; claims
//! about position spread are made on Gaussian packets `exp(i p₀ x) exp(-x²/(4L²))`, whose L → ∞
//! limit stands in for a sharp momentum.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::rng::rng_from_seed;
use crate::spectral::{
    fourier_transform, frequency_uncertainty, time_uncertainty, FrequencyGrid, SpectralAmplitude,
};

const NORM_TOLERANCE: f64 = 1e-12;

/// Packets must fit within ±8L of the position window.
const PACKET_SUPPORT_WIDTHS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleMomentumState {
    p: f64,
    amplitudes: [Complex64; 2],
    collapsed_branch: Option<usize>,
}

/// Equal-weight EPR state with momentum magnitude `p`.
pub fn make_epr(p: f64) -> Result<TwoParticleMomentumState> {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    TwoParticleMomentumState::with_amplitudes(p, [a, a])
}

impl TwoParticleMomentumState {
    /// State with explicit branch amplitudes; branch 0 is `(p, -p)`, branch 1 is `(-p, p)`.
    pub fn with_amplitudes(p: f64, amplitudes: [Complex64; 2]) -> Result<Self> {
        require_positive("p", p)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            p,
            amplitudes,
            collapsed_branch: None,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn collapsed_branch(&self) -> Option<usize> {
        self.collapsed_branch
    }

    /// Momenta `(first, second)` in `branch`.
    pub fn branch_momenta(&self, branch: usize) -> (f64, f64) {
        match branch {
            0 => (self.p, -self.p),
            _ => (-self.p, self.p),
        }
    }

    pub fn branch_total_momentum(&self, branch: usize) -> f64 {
        let (a, b) = self.branch_momenta(branch);
        a + b
    }

    /// Marginal distribution of the first particle: `[(p, |a₀|²), (-p, |a₁|²)]`.
    pub fn first_particle_marginal(&self) -> [(f64, f64); 2] {
        [
            (self.p, self.amplitudes[0].norm_sqr()),
            (-self.p, self.amplitudes[1].norm_sqr()),
        ]
    }

    /// Measures the first particle's momentum and collapses onto the matching branch.
    pub fn measure_first_momentum(&self, seed: u64) -> Result<(f64, Self)> {
        if self.collapsed_branch.is_some() {
            return Err(Error::AlreadyCollapsed);
        }
        let u: f64 = rng_from_seed(seed).random();
        let branch = if u < self.amplitudes[0].norm_sqr() { 0 } else { 1 };
        let mut amplitudes = [Complex64::new(0.0, 0.0); 2];
        amplitudes[branch] = Complex64::new(1.0, 0.0);
        let collapsed = Self {
            p: self.p,
            amplitudes,
            collapsed_branch: Some(branch),
        };
        Ok((self.branch_momenta(branch).0, collapsed))
    }

    /// Momentum of the second particle after the first was measured: the negated outcome.
    pub fn second_particle_momentum(&self) -> Result<f64> {
        let branch = self.collapsed_branch.ok_or(Error::NotCollapsed)?;
        Ok(-self.branch_momenta(branch).0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketParams {
    pub p_center: f64,
    /// Position-space standard deviation L.
    pub width_l: f64,
}

/// Symmetric position grid `[-half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionWindow {
    pub half_width: f64,
    pub count: usize,
}

impl Default for PositionWindow {
    fn default() -> Self {
        Self {
            half_width: 1000.0,
            count: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavepacketUncertainties {
    pub delta_x: f64,
    pub delta_p: f64,
    pub product: f64,
}

/// Δx from |ψ(x)|² on the position grid and Δp from |φ(p)|², φ the Fourier transform of ψ.
pub fn wavepacket_uncertainties(w: &WavepacketParams, window: &PositionWindow) -> Result<WavepacketUncertainties> {
    require_positive("width_l", w.width_l)?;
    if !w.p_center.is_finite() {
        return Err(invalid("p_center", "must be finite"));
    }
    require_positive("half_width", window.half_width)?;
    let l = w.width_l;
    if PACKET_SUPPORT_WIDTHS * l > window.half_width {
        return Err(Error::GridTooNarrow {
            grid_min: -window.half_width,
            grid_max: window.half_width,
            need_min: -PACKET_SUPPORT_WIDTHS * l,
            need_max: PACKET_SUPPORT_WIDTHS * l,
        });
    }
    let grid = FrequencyGrid::spanning(-window.half_width, window.half_width, window.count)?;
    if grid.step() > l {
        return Err(Error::GridTooCoarse(format!(
            "position step {} exceeds packet width {l}",
            grid.step()
        )));
    }
    // the momentum axis is periodic with period 2π/step; the packet must sit well inside it
    let p_half_period = std::f64::consts::PI / grid.step();
    if w.p_center.abs() + PACKET_SUPPORT_WIDTHS / (2.0 * l) > p_half_period {
        return Err(Error::GridTooCoarse(format!(
            "momentum window ±{p_half_period} cannot hold a packet at p = {}",
            w.p_center
        )));
    }
    let values = grid
        .points()
        .map(|x| Complex64::from_polar((-x * x / (4.0 * l * l)).exp(), w.p_center * x))
        .collect();
    let (psi, _) = SpectralAmplitude::normalized(grid, values)?;
    let delta_x = frequency_uncertainty(&psi)?.sigma;
    let delta_p = time_uncertainty(&fourier_transform(&psi, 1.0)?)?.sigma;
    Ok(WavepacketUncertainties {
        delta_x,
        delta_p,
        product: delta_x * delta_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_momentum() {
        assert!(make_epr(0.0).is_err());
        assert!(make_epr(-1.0).is_err());
    }

    #[test]
    fn branches_have_zero_total_momentum() {
        let s = make_epr(1.0).unwrap();
        assert_eq!(s.branch_total_momentum(0), 0.0);
        assert_eq!(s.branch_total_momentum(1), 0.0);
    }

    #[test]
    fn equal_marginal() {
        let s = make_epr(3.0).unwrap();
        let m = s.first_particle_marginal();
        assert_eq!(m[0].0, 3.0);
        assert_eq!(m[1].0, -3.0);
        assert!((m[0].1 - 0.5).abs() < 1e-15 && (m[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_superposition_is_certain() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = TwoParticleMomentumState::with_amplitudes(2.0, [one, zero]).unwrap();
        for seed in 0..200 {
            let (out, c) = s.measure_first_momentum(seed).unwrap();
            assert_eq!(out, 2.0);
            assert_eq!(c.second_particle_momentum().unwrap(), -2.0);
        }
    }

    #[test]
    fn double_measurement_and_premature_query() {
        let s = make_epr(1.0).unwrap();
        assert_eq!(s.second_particle_momentum().unwrap_err(), Error::NotCollapsed);
        let (_, c) = s.measure_first_momentum(5).unwrap();
        assert_eq!(c.measure_first_momentum(6).unwrap_err(), Error::AlreadyCollapsed);
    }

    #[test]
    fn unnormalized_amplitudes_rejected() {
        let a = Complex64::new(0.8, 0.0);
        assert!(TwoParticleMomentumState::with_amplitudes(1.0, [a, a]).is_err());
    }

    #[test]
    fn unit_packet() {
        let u = wavepacket_uncertainties(
            &WavepacketParams { p_center: 0.0, width_l: 1.0 },
            &PositionWindow::default(),
        )
        .unwrap();
        assert!((u.delta_x - 1.0).abs() < 1e-3);
        assert!((u.delta_p - 0.5).abs() < 1e-3);
        assert!((u.product - 0.5).abs() < 1e-3);
    }

    #[test]
    fn moving_packet_keeps_spread() {
        let u = wavepacket_uncertainties(
            &WavepacketParams { p_center: 2.0, width_l: 1.0 },
            &PositionWindow::default(),
        )
        .unwrap();
        assert!((u.product - 0.5).abs() < 1e-3);
    }

    #[test]
    fn wide_packet_needs_wide_window() {
        let err = wavepacket_uncertainties(
            &WavepacketParams { p_center: 0.0, width_l: 200.0 },
            &PositionWindow::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow { .. }));
    }
}
