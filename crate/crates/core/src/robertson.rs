//! Robertson inequality, Heisenberg rate and the clock form of the time-energy bound on small
//! dense Hermitian matrices.
//!
//! Evolution is `ψ(t) = exp(-iHt) ψ`, so `d⟨Q⟩/dt = ⟨i[H, Q]⟩`. The clock time spread is taken as
//! the exact definition `Δt = ΔQ / |d⟨Q⟩/dt|`, which together with Robertson gives `ΔH·Δt ≥ 1/2`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::extended::Extended;
use crate::rng::{rng_from_seed, trial_seed};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const NORM_TOLERANCE: f64 = 1e-12;

/// Robertson slack for the `holds` flag.
pub const ROBERTSON_TOLERANCE: f64 = 1e-10;

/// Central-difference step for the finite-difference rate.
pub const FD_STEP: f64 = 1e-4;

/// Rates below this are treated as a stationary clock.
pub const STATIONARY_RATE: f64 = 1e-12;

pub const CLOCK_BOUND: f64 = 0.5;
pub const CLOCK_TOLERANCE: f64 = 1e-10;

/// Hermitian matrix of dimension 2 to 16.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteObservable {
    matrix: DMatrix<Complex64>,
}

impl FiniteObservable {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let dim = matrix.nrows();
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return Err(invalid("dim", format!("must be in [{MIN_DIM}, {MAX_DIM}], got {dim}")));
        }
        let deviation = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    /// Row-major construction from real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        Self::new(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("valid")
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        Self::new(DMatrix::from_row_slice(2, 2, &[z, -i, i, z])).expect("valid")
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("valid")
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(entries.len(), entries.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(DMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Unit-norm complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: DVector<Complex64>,
}

impl StateVector {
    pub fn new(components: DVector<Complex64>) -> Result<Self> {
        let norm = components.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { components })
    }

    pub fn normalized(components: DVector<Complex64>) -> Result<Self> {
        let norm = components.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            components: components / Complex64::new(norm, 0.0),
        })
    }

    pub fn from_slice(components: &[Complex64]) -> Result<Self> {
        Self::normalized(DVector::from_row_slice(components))
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &DVector<Complex64> {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }
}

fn check_dims(q: &FiniteObservable, psi: &StateVector) -> Result<()> {
    if q.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: q.dim(),
            right: psi.dim(),
        });
    }
    Ok(())
}

/// `⟨ψ|A|ψ⟩` for any square `A`.
fn sandwich(a: &DMatrix<Complex64>, psi: &StateVector) -> Complex64 {
    psi.components.dotc(&(a * &psi.components))
}

/// Mean `⟨ψ|Q|ψ⟩` and spread `sqrt(⟨Q²⟩ - ⟨Q⟩²)`.
pub fn expectation_and_uncertainty(q: &FiniteObservable, psi: &StateVector) -> Result<(f64, f64)> {
    check_dims(q, psi)?;
    let q_psi = &q.matrix * &psi.components;
    let mean = psi.components.dotc(&q_psi);
    let scale = 1.0 + q.matrix.norm();
    if mean.im.abs() > HERMITIAN_TOLERANCE * scale {
        return Err(Error::Internal(format!(
            "expectation of a Hermitian matrix has imaginary part {:e}",
            mean.im
        )));
    }
    // ⟨Q²⟩ = ‖Qψ‖² for Hermitian Q
    let second = q_psi.norm_squared();
    Ok((mean.re, (second - mean.re * mean.re).max(0.0).sqrt()))
}

fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobertsonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `ΔQ·ΔH` against `½|⟨[Q, H]⟩|`.
pub fn robertson_check(q: &FiniteObservable, h: &FiniteObservable, psi: &StateVector) -> Result<RobertsonCheck> {
    check_dims(q, psi)?;
    check_dims(h, psi)?;
    let (_, dq) = expectation_and_uncertainty(q, psi)?;
    let (_, dh) = expectation_and_uncertainty(h, psi)?;
    let lhs = dq * dh;
    let rhs = 0.5 * sandwich(&commutator(&q.matrix, &h.matrix), psi).norm();
    Ok(RobertsonCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - ROBERTSON_TOLERANCE,
    })
}

/// `exp(-iHt) ψ` through the eigendecomposition of `H`.
pub fn evolve(h: &FiniteObservable, psi: &StateVector, t: f64) -> Result<StateVector> {
    check_dims(h, psi)?;
    let eigen = SymmetricEigen::new(h.matrix.clone());
    Ok(evolve_with(&eigen, psi, t))
}

fn evolve_with(eigen: &SymmetricEigen<Complex64, nalgebra::Dyn>, psi: &StateVector, t: f64) -> StateVector {
    let v = &eigen.eigenvectors;
    let mut coeffs = v.adjoint() * &psi.components;
    for (c, &lambda) in coeffs.iter_mut().zip(eigen.eigenvalues.iter()) {
        *c *= Complex64::from_polar(1.0, -lambda * t);
    }
    StateVector {
        components: v * coeffs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergRate {
    pub analytic_rate: f64,
    pub fd_rate: f64,
    pub rel_error: f64,
}

/// `d⟨Q⟩/dt` from the commutator and from a central difference of the evolved expectation.
pub fn heisenberg_rate(q: &FiniteObservable, h: &FiniteObservable, psi: &StateVector) -> Result<HeisenbergRate> {
    check_dims(q, psi)?;
    check_dims(h, psi)?;
    let analytic_rate = analytic_rate(q, h, psi);
    let eigen = SymmetricEigen::new(h.matrix.clone());
    let at = |t: f64| sandwich(&q.matrix, &evolve_with(&eigen, psi, t)).re;
    // five-point central stencil; the three-point one leaves O(h²‖H‖³‖Q‖) behind
    let fd_rate = (8.0 * (at(FD_STEP) - at(-FD_STEP)) - (at(2.0 * FD_STEP) - at(-2.0 * FD_STEP))) / (12.0 * FD_STEP);
    Ok(HeisenbergRate {
        analytic_rate,
        fd_rate,
        rel_error: (analytic_rate - fd_rate).abs() / analytic_rate.abs().max(1e-12),
    })
}

fn analytic_rate(q: &FiniteObservable, h: &FiniteObservable, psi: &StateVector) -> f64 {
    (Complex64::i() * sandwich(&commutator(&h.matrix, &q.matrix), psi)).re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClockUncertainty {
    pub delta_t: Extended,
    pub energy_time_product: Extended,
    pub holds: bool,
}

/// Clock time spread `ΔQ / |d⟨Q⟩/dt|` and the product `ΔH·Δt`.
pub fn clock_time_uncertainty(q: &FiniteObservable, h: &FiniteObservable, psi: &StateVector) -> Result<ClockUncertainty> {
    check_dims(q, psi)?;
    check_dims(h, psi)?;
    let rate = analytic_rate(q, h, psi).abs();
    if rate < STATIONARY_RATE {
        return Ok(ClockUncertainty {
            delta_t: Extended::Infinite,
            energy_time_product: Extended::Infinite,
            holds: true,
        });
    }
    let (_, dq) = expectation_and_uncertainty(q, psi)?;
    let (_, dh) = expectation_and_uncertainty(h, psi)?;
    let delta_t = dq / rate;
    let product = dh * delta_t;
    Ok(ClockUncertainty {
        delta_t: Extended::Finite(delta_t),
        energy_time_product: Extended::Finite(product),
        holds: product >= CLOCK_BOUND - CLOCK_TOLERANCE,
    })
}

/// `(A + A†)/2` with independent standard normal real and imaginary parts in `A`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<FiniteObservable> {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    FiniteObservable::new(h)
}

/// Normalized vector of complex standard normals.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::normalized(DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }))
}

/// One row of the random sweep report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub trial: u64,
    pub dim: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub rate_rel_error: f64,
    pub analytic_rate: f64,
    pub et_product: Extended,
    pub et_holds: bool,
}

/// Random `(Q, H, ψ)` triple for trial `trial`, with dimension drawn from `min_dim..=max_dim`.
pub fn random_triple(
    seed: u64,
    trial: u64,
    min_dim: usize,
    max_dim: usize,
) -> Result<(FiniteObservable, FiniteObservable, StateVector)> {
    if !(MIN_DIM <= min_dim && min_dim <= max_dim && max_dim <= MAX_DIM) {
        return Err(invalid("dims", format!("need {MIN_DIM} <= min <= max <= {MAX_DIM}")));
    }
    let mut rng = rng_from_seed(trial_seed(seed, trial));
    let dim = rng.random_range(min_dim..=max_dim);
    let q = random_hermitian(dim, &mut rng)?;
    let h = random_hermitian(dim, &mut rng)?;
    let psi = random_state(dim, &mut rng)?;
    Ok((q, h, psi))
}

/// Evaluates every check on one triple.
pub fn sweep_row(trial: u64, q: &FiniteObservable, h: &FiniteObservable, psi: &StateVector) -> Result<SweepRow> {
    let rob = robertson_check(q, h, psi)?;
    let rate = heisenberg_rate(q, h, psi)?;
    let clock = clock_time_uncertainty(q, h, psi)?;
    Ok(SweepRow {
        trial,
        dim: q.dim(),
        lhs: rob.lhs,
        rhs: rob.rhs,
        holds: rob.holds,
        rate_rel_error: rate.rel_error,
        analytic_rate: rate.analytic_rate,
        et_product: clock.energy_time_product,
        et_holds: clock.holds,
    })
}
