//! Singlet correlations and the CHSH combination.
//!
//! Outcomes come from the explicit two-qubit singlet `(|01⟩ - |10⟩)/√2` and spin projectors along
//! directions in the x-z plane; the `-cos(a - b)` law is a consequence, not an input.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, trial_seed};

pub const MIN_TRIALS_PER_PAIR: usize = 1000;

/// Analyzer angles (radians) for the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl MeasurementSettings {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<Self> {
        if [a, a_prime, b, b_prime].iter().all(|v| v.is_finite()) {
            Ok(Self { a, a_prime, b, b_prime })
        } else {
            Err(invalid("settings", "angles must be finite"))
        }
    }

    /// Settings reaching |S| = 2√2 on the singlet.
    pub fn optimal() -> Self {
        Self {
            a: 0.0,
            a_prime: FRAC_PI_2,
            b: FRAC_PI_4,
            b_prime: 3.0 * FRAC_PI_4,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.a_prime, self.b, self.b_prime]
    }

    /// The four `(alice, bob, sign)` terms of S.
    fn terms(&self) -> [(f64, f64, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a, self.b_prime, -1.0),
            (self.a_prime, self.b, 1.0),
            (self.a_prime, self.b_prime, 1.0),
        ]
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Spin observable `cos θ σz + sin θ σx`.
fn spin_along(theta: f64) -> Matrix2<Complex64> {
    let (s, co) = theta.sin_cos();
    Matrix2::new(c(co), c(s), c(s), c(-co))
}

/// Projector onto outcome `sign` (±1) of the spin along `theta`.
fn projector(theta: f64, sign: f64) -> Matrix2<Complex64> {
    (Matrix2::identity() + spin_along(theta) * c(sign)) * c(0.5)
}

fn singlet() -> Vector4<Complex64> {
    Vector4::new(c(0.0), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2), c(0.0))
}

const SIGNS: [f64; 2] = [1.0, -1.0];

/// Joint outcome probabilities `P[i][j]` for Alice sign `SIGNS[i]` and Bob sign `SIGNS[j]`.
pub fn joint_distribution(a: f64, b: f64) -> [[f64; 2]; 2] {
    let psi = singlet();
    let mut p = [[0.0; 2]; 2];
    for (i, &sa) in SIGNS.iter().enumerate() {
        for (j, &sb) in SIGNS.iter().enumerate() {
            let op: Matrix4<Complex64> = projector(a, sa).kronecker(&projector(b, sb));
            p[i][j] = psi.dotc(&(op * psi)).re;
        }
    }
    p
}

/// E(a, b): expectation of the product of the two ±1 outcomes.
pub fn singlet_correlation(a: f64, b: f64) -> f64 {
    let p = joint_distribution(a, b);
    let mut e = 0.0;
    for (i, sa) in SIGNS.iter().enumerate() {
        for (j, sb) in SIGNS.iter().enumerate() {
            e += sa * sb * p[i][j];
        }
    }
    e
}

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
pub fn chsh_value(s: &MeasurementSettings) -> f64 {
    s.terms()
        .iter()
        .map(|&(x, y, sign)| sign * singlet_correlation(x, y))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshEstimate {
    pub s_estimate: f64,
    pub std_error: f64,
    pub correlations: [f64; 4],
}

/// Simulated experiment: `trials_per_pair` outcome pairs per setting pair, pair `i` seeded with
/// `seed + i`.
pub fn chsh_monte_carlo(s: &MeasurementSettings, trials_per_pair: usize, seed: u64) -> Result<ChshEstimate> {
    if trials_per_pair < MIN_TRIALS_PER_PAIR {
        return Err(Error::TooFewTrials {
            got: trials_per_pair,
            min: MIN_TRIALS_PER_PAIR,
        });
    }
    let n = trials_per_pair as f64;
    let mut s_estimate = 0.0;
    let mut variance = 0.0;
    let mut correlations = [0.0; 4];
    for (idx, &(x, y, sign)) in s.terms().iter().enumerate() {
        let p = joint_distribution(x, y);
        let cumulative = [p[0][0], p[0][0] + p[0][1], p[0][0] + p[0][1] + p[1][0]];
        let mut rng = rng_from_seed(trial_seed(seed, idx as u64));
        let mut sum = 0i64;
        for _ in 0..trials_per_pair {
            let u: f64 = rng.random();
            // (+,+) and (-,-) give +1, mixed outcomes give -1
            sum += match cumulative.iter().position(|&c| u < c) {
                Some(0) => 1,
                Some(1) | Some(2) => -1,
                _ => 1,
            };
        }
        let e = sum as f64 / n;
        correlations[idx] = e;
        s_estimate += sign * e;
        variance += (1.0 - e * e).max(0.0) / (n - 1.0);
    }
    Ok(ChshEstimate {
        s_estimate,
        std_error: variance.sqrt(),
        correlations,
    })
}
