//! Hole filling: contraction of the weighted radial energy across dyadic scales.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;

use super::weighted_radial_energy;

/// ρ = (1/3)·2^{−k}, k = 0..3.
pub const DEFAULT_HOLE_SCALES: [f64; 4] = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 12.0, 1.0 / 24.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleFillingResult {
    pub theta: f64,
    /// ln(1/θ)/(2 ln 2), clamped to (0, 1].
    pub alpha: f64,
    /// ln(1/θ)/(2 ln 2) before clamping.
    pub raw_alpha: f64,
    pub scales: Vec<f64>,
    /// W(ρ/2)/W(ρ) per scale.
    pub per_scale_ratios: Vec<f64>,
}

/// Ratios W(ρ/2)/W(ρ) for a given energy profile W.
pub fn hole_filling_with(energy: impl Fn(f64) -> Result<f64>, scales: &[f64]) -> Result<HoleFillingResult> {
    if scales.is_empty() {
        return Err(Error::InvalidArgument("hole filling needs at least one scale".into()));
    }
    let mut ratios = Vec::with_capacity(scales.len());
    for &rho in scales {
        let (outer, inner) = (energy(rho)?, energy(0.5 * rho)?);
        let ratio = crate::report::ratio(inner, outer);
        if !(ratio < 1.0) {
            return Err(Error::RatioNotContractive { scale: rho, ratio });
        }
        ratios.push(ratio);
    }
    let theta = ratios.iter().copied().fold(0.0, f64::max);
    let raw_alpha = (1.0 / theta).ln() / (2.0 * 2f64.ln());
    Ok(HoleFillingResult { theta, alpha: raw_alpha.min(1.0), raw_alpha, scales: scales.to_vec(), per_scale_ratios: ratios })
}

/// Hole filling on W(ρ) = ∫_{B_ρ} r^{2−n} u_r² of a single field.
pub fn hole_filling(field: &RadialField, scales: &[f64]) -> Result<HoleFillingResult> {
    hole_filling_with(|rho| weighted_radial_energy(field, rho), scales)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_law_recovers_exponent() {
        let res = hole_filling_with(|rho| Ok(rho.powf(1.0)), &DEFAULT_HOLE_SCALES).unwrap();
        assert!((res.theta - 0.5).abs() < 1e-15);
        assert!((res.alpha - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quarter_ratio_gives_unit_exponent() {
        let res = hole_filling_with(|rho| Ok(rho * rho), &[0.5]).unwrap();
        assert!((res.theta - 0.25).abs() < 1e-15);
        assert!((res.alpha - 1.0).abs() < 1e-15);
    }

    #[test]
    fn growing_energy_is_rejected() {
        let err = hole_filling_with(|rho| Ok(1.0 / rho), &[0.5]);
        assert!(matches!(err, Err(Error::RatioNotContractive { .. })));
    }
}
