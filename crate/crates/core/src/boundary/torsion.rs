//! The mixed problem −Δφ = 1 in A⁺_{ρ₁,ρ₂}, φ = 0 on the flat part, φ_ν = 0 on both arcs.
//!
//! Two routes: the 5-point scheme with ghost Neumann rows, and a series for φ̃ = φ + x₂²/2,
//! which is harmonic, odd under reflection across the flat part, and has radial derivative
//! r sin φ |sin φ| on both arcs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::{Field2D, HalfDiskMesh};
use super::poisson::{PolarPoisson, RadialCondition};

pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const NEUMANN_TOLERANCE: f64 = 1e-3;
pub const ROUTE_TOLERANCE: f64 = 1e-4;
/// Odd modes kept in the series; coefficients decay like m⁻⁴.
pub const SERIES_MODES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionSolution {
    pub field: Field2D,
    pub gradient_sup: f64,
    pub sup: f64,
    /// sup over interior nodes of |−Δ_h φ − 1|.
    pub residual: f64,
    /// sup over both arcs of the one-sided second-order normal derivative.
    pub neumann_defect: f64,
    /// sup over nodes of |φ_FD − φ_series|.
    pub route_difference: f64,
}

impl TorsionSolution {
    /// (1 − 10⁻⁶)/sup|∇φ|.
    #[must_use]
    pub fn comparison_constant(&self) -> f64 {
        (1.0 - 1e-6) / self.gradient_sup
    }

    /// Largest c·φ − x₂ over the nodes for c = [`Self::comparison_constant`].
    #[must_use]
    pub fn height_excess(&self) -> f64 {
        let c = self.comparison_constant();
        let m = self.field.mesh();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..=m.nr {
            for j in 0..=m.nphi {
                let height = m.radius(i) * m.angle(j).sin();
                worst = worst.max(c * self.field.at(i, j) - height);
            }
        }
        worst
    }
}

/// Series coefficient of sin(mφ) in sin φ|sin φ| on (−π, π]; zero for even m.
#[must_use]
pub fn neumann_coefficient(m: usize) -> f64 {
    if m % 2 == 0 {
        0.0
    } else {
        let mf = m as f64;
        -8.0 / (std::f64::consts::PI * mf * (mf * mf - 4.0))
    }
}

/// φ(r, φ) from the harmonic series for φ̃, using odd modes up to 2·`modes` − 1.
#[must_use]
pub fn series_value(rho1: f64, rho2: f64, r: f64, phi: f64, modes: usize) -> f64 {
    let q_base = rho1 / rho2;
    let (up, down) = (r / rho2, rho1 / r);
    let s1 = phi.sin();
    let c2 = 2.0 * (2.0 * phi).cos();
    // sin((m+2)φ) = 2cos(2φ) sin(mφ) − sin((m−2)φ).
    let (mut s_prev, mut s_cur) = (-s1, s1);
    let (mut up_m, mut down_m, mut q_m) = (up, down, q_base);
    let up2 = up * up;
    let down2 = down * down;
    let q2 = q_base * q_base;
    let mut total = 0.0;
    for k in 0..modes {
        let m = 2 * k + 1;
        let beta = neumann_coefficient(m) / m as f64;
        let (p, q) = (rho2 * rho2 * beta, rho1 * rho1 * beta);
        let den = 1.0 - q_m * q_m;
        let a = (p - q_m * q) / den;
        let b = (q_m * p - q) / den;
        total += (a * up_m + b * down_m) * s_cur;
        let s_next = c2 * s_cur - s_prev;
        s_prev = s_cur;
        s_cur = s_next;
        up_m *= up2;
        down_m *= down2;
        q_m *= q2;
    }
    total - 0.5 * (r * s1).powi(2)
}

/// Solves the mixed problem on an nr × nphi polar grid and cross-checks the series route.
pub fn torsion_solve(rho1: f64, rho2: f64, nr: usize, nphi: usize) -> Result<TorsionSolution> {
    if !(rho1 > 0.0 && rho2 > rho1) {
        return Err(Error::InvalidArgument(format!("need 0 < ρ₁ < ρ₂, got ({rho1}, {rho2})")));
    }
    let mesh = HalfDiskMesh::half_annulus(rho1, rho2, nr, nphi)?;
    let p = PolarPoisson::new(mesh, RadialCondition::Neumann, RadialCondition::Neumann)?;
    let mut g = vec![1.0; mesh.len()];
    p.mask(&mut g);
    let phi = p.solve(&g, &vec![0.0; mesh.len()]);
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverSingular("non-finite torsion values".into()));
    }
    let image = p.apply(&phi);
    let mut residual: f64 = 0.0;
    for i in 1..nr {
        for j in 1..nphi {
            residual = residual.max((image[mesh.index(i, j)] - 1.0).abs());
        }
    }
    let field = Field2D::new(mesh, phi)?;
    let h = mesh.dr();
    let mut neumann_defect: f64 = 0.0;
    for j in 0..=nphi {
        let inner = (-3.0 * field.at(0, j) + 4.0 * field.at(1, j) - field.at(2, j)) / (2.0 * h);
        let outer = (3.0 * field.at(nr, j) - 4.0 * field.at(nr - 1, j) + field.at(nr - 2, j)) / (2.0 * h);
        neumann_defect = neumann_defect.max(inner.abs()).max(outer.abs());
    }
    let mut route_difference: f64 = 0.0;
    for i in 0..=nr {
        for j in 1..nphi {
            let s = series_value(rho1, rho2, mesh.radius(i), mesh.angle(j), SERIES_MODES);
            route_difference = route_difference.max((s - field.at(i, j)).abs());
        }
    }
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::SolverSingular(format!("torsion residual {residual:e}")));
    }
    if route_difference > ROUTE_TOLERANCE {
        return Err(Error::SolverSingular(format!("grid and series routes differ by {route_difference:e}")));
    }
    let grad = field.gradient();
    let gradient_sup = (0..mesh.len()).map(|k| grad.norm(k)).fold(0.0, f64::max);
    let sup = field.max_value();
    Ok(TorsionSolution { field, gradient_sup, sup, residual, neumann_defect, route_difference })
}

/// sup of the Dirichlet torsion function −Δφ = 1 on the half-disk mesh.
pub fn half_disk_torsion_sup(mesh: HalfDiskMesh) -> Result<f64> {
    let p = PolarPoisson::dirichlet(mesh)?;
    let mut g = vec![1.0; mesh.len()];
    p.mask(&mut g);
    let phi = p.solve(&g, &vec![0.0; mesh.len()]);
    Ok(phi.iter().copied().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_reproduce_the_neumann_data() {
        for phi in [0.3f64, 1.2, 2.0] {
            let s: f64 = (0..4000).map(|k| neumann_coefficient(2 * k + 1) * (((2 * k + 1) as f64) * phi).sin()).sum();
            assert!((s - phi.sin().powi(2)).abs() < 1e-9, "{phi}");
        }
    }

    #[test]
    fn series_meets_the_mixed_conditions() {
        let (a, b) = (4.15, 4.85);
        // Flat part.
        assert!(series_value(a, b, 4.5, 0.0, SERIES_MODES).abs() < 1e-14);
        // Arcs: centred radial difference quotient.
        let d = 1e-5;
        for phi in [0.4, 1.5] {
            for r in [a, b] {
                let dphi = (series_value(a, b, r + d, phi, SERIES_MODES) - series_value(a, b, r - d, phi, SERIES_MODES)) / (2.0 * d);
                assert!(dphi.abs() < 1e-6, "r={r} φ={phi}: {dphi}");
            }
        }
    }

    #[test]
    fn routes_agree_and_conditions_hold() {
        let t = torsion_solve(4.15, 4.85, 128, 512).unwrap();
        assert!(t.residual <= RESIDUAL_TOLERANCE);
        assert!(t.neumann_defect <= NEUMANN_TOLERANCE, "{}", t.neumann_defect);
        assert!(t.route_difference <= ROUTE_TOLERANCE, "{}", t.route_difference);
        assert!(t.field.min_value() >= 0.0);
        assert!(t.height_excess() <= 0.0, "{}", t.height_excess());
    }
}
