//! Hölder bounds for radial fields from the growth of ∫|u_{r_y}| on balls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::inequality::morrey::{norm_bound, radial_derivative_mass, seminorm_bound};
use crate::quadrature::DomainSpec;

use super::holder_seminorm;

/// Distances |y| of the probed centres.
pub const CENTER_NORMS: [f64; 3] = [0.0, 0.125, 0.25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderBound {
    pub alpha: f64,
    pub cbar: f64,
    /// Smallest C̄ compatible with every probed ball.
    pub measured_cbar: f64,
    pub seminorm_bound: f64,
    pub norm_bound: f64,
    /// Discrete seminorm over r ≤ 1/4.
    pub direct_seminorm: f64,
    /// sup|u| over r ≤ 1/4 plus the discrete seminorm.
    pub direct_norm: f64,
    pub consistent: bool,
}

/// Radii 2^{−k}/2, k = 0..10.
#[must_use]
pub fn default_radii() -> Vec<f64> {
    (0..=10).map(|k| 0.5 * 0.5f64.powi(k)).collect()
}

/// Checks ∫_{B_ρ(y)}|u_{r_y}| ≤ C̄ρ^{n−1+α} on the probed balls and returns the resulting Cα bound.
pub fn morrey_application(field: &RadialField, alpha: f64, cbar: f64) -> Result<HolderBound> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("α must lie in (0, 1], got {alpha}")));
    }
    let n = field.n();
    let du = field.differentiate(1)?;
    let slope = |r: f64| du.interpolate(r);
    let mut measured: f64 = 0.0;
    for &y in &CENTER_NORMS {
        for rho in default_radii() {
            if y + rho > field.mesh().outer() {
                continue;
            }
            let mass = radial_derivative_mass(n, slope, y, rho);
            let allowed = cbar * rho.powf(n as f64 - 1.0 + alpha);
            measured = measured.max(mass / rho.powf(n as f64 - 1.0 + alpha));
            if mass > allowed * (1.0 + 1e-9) {
                return Err(Error::HypothesisViolated(format!(
                    "∫|u_r| over B_{rho}(|y| = {y}) = {mass:.6e} exceeds C̄ρ^(n−1+α) = {allowed:.6e}"
                )));
            }
        }
    }
    let l1 = crate::quadrature::quadrature_radial(&field.map(|_, u| u.abs())?, 0.0, DomainSpec::ball(1.0))?;
    let semi = seminorm_bound(n, alpha, cbar);
    let norm = norm_bound(n, alpha, cbar, l1);
    let direct_semi = holder_seminorm(field.nodes(), field.values(), 0.25, alpha);
    let sup = field.nodes().iter().zip(field.values()).filter(|(&r, _)| r <= 0.25).map(|(_, u)| u.abs()).fold(0.0, f64::max);
    let direct_norm = sup + direct_semi;
    Ok(HolderBound {
        alpha,
        cbar,
        measured_cbar: measured,
        seminorm_bound: semi,
        norm_bound: norm,
        direct_seminorm: direct_semi,
        direct_norm,
        consistent: direct_semi <= semi && direct_norm <= norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Dimension, RadialMesh};

    fn field(f: impl Fn(f64) -> f64) -> RadialField {
        RadialField::from_fn(RadialMesh::unit_uniform(2001).unwrap(), Dimension::new(3).unwrap(), f).unwrap()
    }

    #[test]
    fn constant_field_gives_nonnegative_bound() {
        let b = morrey_application(&field(|_| 2.0), 0.5, 1.0).unwrap();
        assert_eq!(b.direct_seminorm, 0.0);
        assert!(b.seminorm_bound >= 0.0 && b.consistent);
    }

    #[test]
    fn distance_function_stays_below_bound() {
        // |∇r| = 1, so ∫_{B_ρ(y)}|u_{r_y}| ≤ |B_ρ| = 4πρ³/3: C̄ = 4π/3 with α = 1.
        let b = morrey_application(&field(|r| r), 1.0, 4.0 * std::f64::consts::PI / 3.0).unwrap();
        assert!(b.consistent, "{b:?}");
        assert!((b.direct_seminorm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn logarithm_violates_growth_at_the_origin() {
        let mesh = RadialMesh::unit_geometric(2000).unwrap();
        let u = RadialField::from_fn(mesh, Dimension::new(3).unwrap(), |r| -2.0 * r.ln()).unwrap();
        // ∫_{B_ρ}|u_r| = 4πρ² against C̄ρ^{2+α}: fails once ρ^α < 4π/C̄.
        assert!(matches!(morrey_application(&u, 0.5, 100.0), Err(Error::HypothesisViolated(_))));
    }
}
