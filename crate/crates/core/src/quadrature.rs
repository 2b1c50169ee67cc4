//! Domains and radial quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::special::sphere_measure;

/// Balls, annuli, half-balls, half-annuli (upper half-space) and unit cubes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Ball { rho: f64 },
    Annulus { inner: f64, outer: f64 },
    HalfBall { rho: f64 },
    HalfAnnulus { inner: f64, outer: f64 },
    Cube { side: f64, n: usize },
}

impl DomainSpec {
    pub fn ball(rho: f64) -> Self {
        Self::Ball { rho }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Self::Annulus { inner, outer }
    }

    /// Radial extent `[lo, hi]` and the angular fraction of the full sphere.
    pub fn radial_extent(&self) -> Result<(f64, f64, f64)> {
        let (lo, hi, frac) = match *self {
            Self::Ball { rho } => (0.0, rho, 1.0),
            Self::Annulus { inner, outer } => (inner, outer, 1.0),
            Self::HalfBall { rho } => (0.0, rho, 0.5),
            Self::HalfAnnulus { inner, outer } => (inner, outer, 0.5),
            Self::Cube { .. } => {
                return Err(Error::InvalidArgument("cubes are not radial domains".into()));
            }
        };
        if !(lo >= 0.0) || !(hi > lo) {
            return Err(Error::InvalidArgument(format!("need 0 ≤ ρ₁ < ρ₂, got [{lo}, {hi}]")));
        }
        Ok((lo, hi, frac))
    }
}

/// Composite trapezoid of sampled `values` over `[a, b]` ⊂ `[x_0, x_N]`,
/// with linear interpolation of the integrand at the endpoints.
pub fn trapezoid_between(x: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = x.len();
    let a = a.max(x[0]);
    let b = b.min(x[n - 1]);
    if b <= a {
        return 0.0;
    }
    let ia = x.partition_point(|&v| v <= a);
    let ib = x.partition_point(|&v| v < b);
    let va = crate::field::interpolate(x, values, a);
    let vb = crate::field::interpolate(x, values, b);
    if ia >= ib {
        return 0.5 * (b - a) * (va + vb);
    }
    let mut s = 0.5 * (x[ia] - a) * (va + values[ia]);
    for i in ia..ib - 1 {
        s += 0.5 * (x[i + 1] - x[i]) * (values[i] + values[i + 1]);
    }
    s + 0.5 * (b - x[ib - 1]) * (values[ib - 1] + vb)
}

/// ∫_D r^w g dx for a radial integrand `g` sampled on `nodes`, in dimension `n`.
pub fn radial_integral(nodes: &[f64], g: &[f64], n: usize, weight: f64, domain: DomainSpec) -> Result<f64> {
    let (lo, hi, frac) = domain.radial_extent()?;
    let r0 = nodes[0];
    let r1 = nodes[nodes.len() - 1];
    if hi > r1 * (1.0 + 1e-12) || (lo > 0.0 && lo < r0 * (1.0 - 1e-12)) {
        return Err(Error::DomainOutsideMesh { lo, hi, mesh_lo: r0, mesh_hi: r1 });
    }
    let n1 = (n - 1) as i32;
    let mut integrand = Vec::with_capacity(nodes.len());
    for (i, (&r, &v)) in nodes.iter().zip(g).enumerate() {
        let val = v * r.powf(weight) * r.powi(n1);
        if !val.is_finite() {
            return Err(Error::NonFiniteValue { index: i, value: val });
        }
        integrand.push(val);
    }
    Ok(frac * sphere_measure(n) * trapezoid_between(nodes, &integrand, lo, hi))
}

/// ∫_D r^w g dx where `g` is the field itself.
pub fn quadrature_radial(field: &RadialField, weight_exponent: f64, domain: DomainSpec) -> Result<f64> {
    radial_integral(field.nodes(), field.values(), field.n(), weight_exponent, domain)
}

/// Nodal trapezoid weights of `∫_{[a,b]} · r^{n-1} |S^{n-1}| dr` (interior nodes only, endpoints snapped).
pub fn radial_node_weights(nodes: &[f64], n: usize, a: f64, b: f64) -> Vec<f64> {
    let s = sphere_measure(n);
    let mut w = vec![0.0; nodes.len()];
    for i in 0..nodes.len().saturating_sub(1) {
        let (x0, x1) = (nodes[i], nodes[i + 1]);
        let lo = x0.max(a);
        let hi = x1.min(b);
        if hi <= lo {
            continue;
        }
        let frac = (hi - lo) / (x1 - x0);
        let h = 0.5 * (x1 - x0) * frac;
        w[i] += h * s * x0.powi(n as i32 - 1);
        w[i + 1] += h * s * x1.powi(n as i32 - 1);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Dimension, RadialMesh};
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_volume_in_three_dimensions() {
        let mesh = RadialMesh::unit_uniform(4000).unwrap();
        let one = RadialField::from_fn(mesh, Dimension::new(3).unwrap(), |_| 1.0).unwrap();
        let v = quadrature_radial(&one, 0.0, DomainSpec::ball(1.0)).unwrap();
        assert!((v / (4.0 * PI / 3.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_integrand_gives_zero() {
        let mesh = RadialMesh::unit_uniform(100).unwrap();
        let z = RadialField::from_fn(mesh, Dimension::new(5).unwrap(), |_| 0.0).unwrap();
        assert_eq!(quadrature_radial(&z, -3.0, DomainSpec::ball(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn domain_outside_mesh_is_rejected() {
        let mesh = RadialMesh::uniform(1e-3, 0.5, 100).unwrap();
        let z = RadialField::from_fn(mesh, Dimension::new(3).unwrap(), |_| 1.0).unwrap();
        assert!(matches!(
            quadrature_radial(&z, 0.0, DomainSpec::ball(1.0)),
            Err(Error::DomainOutsideMesh { .. })
        ));
    }

    #[test]
    fn partial_cells_are_interpolated() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, 2.0];
        assert!((trapezoid_between(&x, &y, 0.5, 1.5) - 1.0).abs() < 1e-15);
        assert!((trapezoid_between(&x, &y, 0.25, 0.75) - 0.25).abs() < 1e-15);
    }
}
