//! Bohr's semiclassical weighing argument as plain arithmetic.
//!
//! The chain: a weighing of precision ΔE fixes the weight to `ΔE g / c²`, which over the weighing
//! time t transfers momentum `Δp = ΔE g t / c²`; a position spread Δx in the potential `g x`
//! dilates the emission time by `Δt = g Δx t₀ / c²`. Their product is `(t₀/t) Δp Δx`, and only the
//! extra assumption `Δp Δx ≥ ħ` turns it into `ΔE Δt ≥ ħ`. That conditional is reported rather than
//! assumed.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};

/// Largest |g x| / c² accepted by the linearized time dilation.
pub const WEAK_FIELD_LIMIT: f64 = 0.01;

/// Allowed range of t₀/t when the ratio guard is on.
pub const RATIO_RANGE: (f64, f64) = (0.9, 1.1);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub g: f64,
}

impl Default for PhysicalConstants {
    /// SI values.
    fn default() -> Self {
        Self {
            hbar: 1.0545718e-34,
            c: 2.99792458e8,
            g: 9.80665,
        }
    }
}

impl PhysicalConstants {
    pub fn unit() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            g: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("hbar", self.hbar)?;
        require_positive("c", self.c)?;
        require_positive("g", self.g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeighingScenario {
    pub constants: PhysicalConstants,
    /// Duration t of the weighing.
    pub weighing_duration_t: f64,
    /// Reference time t₀ elapsed at the surface.
    pub reference_time_t0: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub shutter_delta_t: f64,
    /// Enforce t₀/t within [`RATIO_RANGE`].
    pub enforce_ratio: bool,
}

impl WeighingScenario {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        require_positive("t", self.weighing_duration_t)?;
        require_positive("t0", self.reference_time_t0)?;
        require_positive("delta_x", self.delta_x)?;
        require_positive("delta_p", self.delta_p)?;
        require_positive("shutter_delta_t", self.shutter_delta_t)?;
        let ratio = self.ratio_t0_over_t();
        if self.enforce_ratio && !(RATIO_RANGE.0..=RATIO_RANGE.1).contains(&ratio) {
            return Err(invalid(
                "t0",
                format!("t0/t = {ratio} outside [{}, {}]", RATIO_RANGE.0, RATIO_RANGE.1),
            ));
        }
        Ok(())
    }

    pub fn ratio_t0_over_t(&self) -> f64 {
        self.reference_time_t0 / self.weighing_duration_t
    }
}

/// Einstein's claimed bound `ΔE ≳ ħ/Δt` for a shutter open during `shutter_delta_t`.
pub fn photon_energy_lower_bound(shutter_delta_t: f64, k: &PhysicalConstants) -> Result<f64> {
    require_positive("shutter_delta_t", shutter_delta_t)?;
    k.validate()?;
    Ok(k.hbar / shutter_delta_t)
}

/// Energy precision `Δp c² / (g t)` of a weighing with momentum precision `delta_p`.
pub fn weighing_energy_precision(delta_p: f64, s: &WeighingScenario) -> Result<f64> {
    s.validate()?;
    require_positive("delta_p", delta_p)?;
    let k = &s.constants;
    Ok(delta_p * k.c * k.c / (k.g * s.weighing_duration_t))
}

/// Weak-field clock rate `t = (1 + g x / c²) t₀`, with x measured from the surface.
pub fn gravitational_time_lapse(x: f64, t0: f64, k: &PhysicalConstants) -> Result<f64> {
    k.validate()?;
    if !x.is_finite() {
        return Err(invalid("x", "must be finite"));
    }
    require_positive("t0", t0)?;
    let ratio = k.g * x / (k.c * k.c);
    if ratio.abs() >= WEAK_FIELD_LIMIT {
        return Err(Error::WeakFieldViolated {
            ratio: ratio.abs(),
            limit: WEAK_FIELD_LIMIT,
        });
    }
    Ok((1.0 + ratio) * t0)
}

/// Emission-time spread `g Δx t₀ / c²` from a position spread `delta_x`.
pub fn emission_time_uncertainty(delta_x: f64, s: &WeighingScenario) -> Result<f64> {
    s.validate()?;
    require_positive("delta_x", delta_x)?;
    let k = &s.constants;
    Ok(k.g * delta_x * s.reference_time_t0 / (k.c * k.c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BohrProduct {
    /// `(t₀/t) Δp Δx`.
    pub et_product: f64,
    pub px_product: f64,
    pub ratio_t0_over_t: f64,
    /// Whether `Δp Δx ≥ ħ`, the premise under which `ΔE Δt ≳ ħ` follows.
    pub bound_satisfied_if_px_bound: bool,
    /// ΔE and Δt from the two steps, multiplied; equal to `et_product` up to rounding.
    pub chained_product: f64,
    pub energy_precision: f64,
    pub emission_time_spread: f64,
}

pub fn bohr_product(s: &WeighingScenario) -> Result<BohrProduct> {
    s.validate()?;
    let energy_precision = weighing_energy_precision(s.delta_p, s)?;
    let emission_time_spread = emission_time_uncertainty(s.delta_x, s)?;
    let px_product = s.delta_p * s.delta_x;
    let ratio = s.ratio_t0_over_t();
    Ok(BohrProduct {
        et_product: ratio * px_product,
        px_product,
        ratio_t0_over_t: ratio,
        bound_satisfied_if_px_bound: px_product >= s.constants.hbar,
        chained_product: energy_precision * emission_time_spread,
        energy_precision,
        emission_time_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_scenario() -> WeighingScenario {
        WeighingScenario {
            constants: PhysicalConstants::unit(),
            weighing_duration_t: 1.0,
            reference_time_t0: 1.0,
            delta_x: 1.0,
            delta_p: 1.0,
            shutter_delta_t: 1.0,
            enforce_ratio: true,
        }
    }

    #[test]
    fn unit_values() {
        let s = unit_scenario();
        assert_eq!(photon_energy_lower_bound(1.0, &s.constants).unwrap(), 1.0);
        assert_eq!(weighing_energy_precision(1.0, &s).unwrap(), 1.0);
        assert_eq!(emission_time_uncertainty(1.0, &s).unwrap(), 1.0);
    }

    #[test]
    fn scaling_laws() {
        let k = PhysicalConstants::default();
        let a = photon_energy_lower_bound(1e-9, &k).unwrap();
        assert_eq!(photon_energy_lower_bound(2e-9, &k).unwrap(), a / 2.0);

        let mut s = unit_scenario();
        s.constants = k;
        let e1 = weighing_energy_precision(1e-30, &s).unwrap();
        s.weighing_duration_t = 2.0;
        s.enforce_ratio = false;
        assert_eq!(weighing_energy_precision(1e-30, &s).unwrap(), e1 / 2.0);

        let t1 = emission_time_uncertainty(1e-6, &s).unwrap();
        let t10 = emission_time_uncertainty(1e-5, &s).unwrap();
        assert!((t10 / t1 - 10.0).abs() < 1e-14);
    }

    #[test]
    fn surface_reference() {
        assert_eq!(gravitational_time_lapse(0.0, 3.0, &PhysicalConstants::default()).unwrap(), 3.0);
    }

    #[test]
    fn weak_field_guard() {
        let k = PhysicalConstants::unit();
        assert!(matches!(
            gravitational_time_lapse(0.02, 1.0, &k),
            Err(Error::WeakFieldViolated { .. })
        ));
        assert!(gravitational_time_lapse(0.005, 1.0, &k).is_ok());
    }

    #[test]
    fn invalid_inputs() {
        let k = PhysicalConstants::unit();
        assert!(photon_energy_lower_bound(0.0, &k).is_err());
        assert!(photon_energy_lower_bound(-1.0, &k).is_err());
        let mut s = unit_scenario();
        s.weighing_duration_t = 0.0;
        assert!(weighing_energy_precision(1.0, &s).is_err());
        let mut s = unit_scenario();
        s.reference_time_t0 = 2.0;
        assert!(bohr_product(&s).is_err());
        s.enforce_ratio = false;
        assert!(bohr_product(&s).is_ok());
    }

    #[test]
    fn conditional_structure() {
        let mut s = unit_scenario();
        s.constants.hbar = 2.0;
        let b = bohr_product(&s).unwrap();
        assert_eq!(b.px_product, 1.0);
        assert!(!b.bound_satisfied_if_px_bound);
    }
}
