//! Sampling from gridded densities and chi-square goodness of fit.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::spectral::{FrequencyGrid, SpectralAmplitude};

/// Inverse-CDF sampler for a density sampled on a uniform grid.
///
/// The CDF is the cumulative trapezoidal integral, interpolated linearly inside each cell.
#[derive(Debug, Clone)]
pub struct GridSampler {
    grid: FrequencyGrid,
    cdf: Vec<f64>,
}

impl GridSampler {
    pub fn new(grid: FrequencyGrid, density: &[f64]) -> Result<Self> {
        if density.len() != grid.count() {
            return Err(Error::DimensionMismatch {
                left: density.len(),
                right: grid.count(),
            });
        }
        let mut cdf = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for pair in density.windows(2) {
            acc += 0.5 * (pair[0] + pair[1]) * grid.step();
            cdf.push(acc);
        }
        if acc.is_nan() || acc <= 0.0 {
            return Err(Error::AllZeroAmplitude);
        }
        for v in &mut cdf {
            *v /= acc;
        }
        Ok(Self { grid, cdf })
    }

    pub fn from_amplitude(a: &SpectralAmplitude) -> Result<Self> {
        Self::new(*a.grid(), &a.density())
    }

    /// Maps a uniform variate in [0, 1) to a grid coordinate.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // first node whose cumulative mass reaches u
        let hi = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let lo = hi - 1;
        let mass = self.cdf[hi] - self.cdf[lo];
        let frac = if mass > 0.0 { (u - self.cdf[lo]) / mass } else { 0.0 };
        self.grid.omega(lo) + frac * self.grid.step()
    }

    /// Piecewise-linear CDF, 0 below and 1 above the grid.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.grid.omega_min() {
            return 0.0;
        }
        if x >= self.grid.omega_max() {
            return 1.0;
        }
        let pos = (x - self.grid.omega_min()) / self.grid.step();
        let k = (pos.floor() as usize).min(self.cdf.len() - 2);
        let frac = pos - k as f64;
        self.cdf[k] + frac * (self.cdf[k + 1] - self.cdf[k])
    }

    /// Interior edges of `bins` equal-probability bins.
    pub fn equiprobable_edges(&self, bins: usize) -> Vec<f64> {
        (1..bins).map(|i| self.quantile(i as f64 / bins as f64)).collect()
    }
}

/// Counts samples into `edges.len() + 1` bins; the outer bins are open-ended.
pub fn histogram(samples: &[f64], edges: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; edges.len() + 1];
    for &x in samples {
        counts[edges.partition_point(|&e| e <= x)] += 1;
    }
    counts
}

/// Bin probabilities for a CDF and interior edges.
pub fn bin_probabilities(cdf: impl Fn(f64) -> f64, edges: &[f64]) -> Vec<f64> {
    let mut probs = Vec::with_capacity(edges.len() + 1);
    let mut prev = 0.0;
    for &e in edges {
        let c = cdf(e);
        probs.push(c - prev);
        prev = c;
    }
    probs.push(1.0 - prev);
    probs
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::DimensionMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut statistic = 0.0;
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * n;
        if e <= 0.0 {
            if o > 0 {
                return Ok(ChiSquare {
                    statistic: f64::INFINITY,
                    dof: observed.len() - 1,
                    p_value: 0.0,
                });
            }
            continue;
        }
        statistic += (o as f64 - e).powi(2) / e;
    }
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_density_quantiles_are_linear() {
        let g = FrequencyGrid::spanning(0.0, 1.0, 11).unwrap();
        let s = GridSampler::new(g, &[1.0; 11]).unwrap();
        for u in [0.0, 0.13, 0.5, 0.999] {
            assert!((s.quantile(u) - u).abs() < 1e-12);
            assert!((s.cdf(u) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_open_ended() {
        assert_eq!(histogram(&[-5.0, 0.5, 1.0, 9.0], &[0.0, 1.0]), vec![1, 1, 2]);
    }

    #[test]
    fn chi_square_perfect_fit() {
        let c = chi_square(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(c.statistic, 0.0);
        assert!((c.p_value - 1.0).abs() < 1e-12);
        let bad = chi_square(&[100, 0, 0, 0], &[0.25; 4]).unwrap();
        assert!(bad.p_value < 1e-10);
    }
}
