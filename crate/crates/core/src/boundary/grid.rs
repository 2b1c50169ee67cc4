//! Polar grids on half-disks and half-annuli, and fields sampled on them.
//!
//! Node (i, j) sits at r_i = inner + i·dr, φ_j = j·π/nphi. Rows j = 0 and j = nphi are the flat
//! boundary; when `inner` is 0 the whole i = 0 row is the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::trapezoid_between;
use crate::report::MeshMeta;

pub const MIN_RADIAL_CELLS: usize = 8;
pub const MIN_ANGULAR_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfDiskMesh {
    pub inner: f64,
    pub outer: f64,
    /// Radial cells; nodes i = 0..=nr.
    pub nr: usize,
    /// Angular cells; nodes j = 0..=nphi.
    pub nphi: usize,
}

impl HalfDiskMesh {
    /// Half-disk B⁺_R with the origin as the i = 0 row.
    pub fn half_disk(radius: f64, nr: usize, nphi: usize) -> Result<Self> {
        Self::half_annulus(0.0, radius, nr, nphi)
    }

    pub fn half_annulus(inner: f64, outer: f64, nr: usize, nphi: usize) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::InvalidMesh(format!("need 0 ≤ inner < outer, got [{inner}, {outer}]")));
        }
        if nr < MIN_RADIAL_CELLS {
            return Err(Error::MeshTooCoarse { nodes: nr + 1, required: MIN_RADIAL_CELLS + 1 });
        }
        if nphi < MIN_ANGULAR_CELLS {
            return Err(Error::MeshTooCoarse { nodes: nphi + 1, required: MIN_ANGULAR_CELLS + 1 });
        }
        Ok(Self { inner, outer, nr, nphi })
    }

    /// Both spacings halved.
    #[must_use]
    pub fn refined(&self) -> Self {
        Self { nr: 2 * self.nr, nphi: 2 * self.nphi, ..*self }
    }

    #[must_use]
    pub fn dr(&self) -> f64 {
        (self.outer - self.inner) / self.nr as f64
    }

    #[must_use]
    pub fn dphi(&self) -> f64 {
        std::f64::consts::PI / self.nphi as f64
    }

    #[must_use]
    pub fn radius(&self, i: usize) -> f64 {
        if i == self.nr {
            self.outer
        } else {
            self.inner + i as f64 * self.dr()
        }
    }

    #[must_use]
    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * self.dphi()
    }

    #[must_use]
    pub fn radii(&self) -> Vec<f64> {
        (0..=self.nr).map(|i| self.radius(i)).collect()
    }

    /// Number of stored values.
    #[must_use]
    pub fn len(&self) -> usize {
        (self.nr + 1) * (self.nphi + 1)
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[must_use]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.nphi + 1) + j
    }

    #[must_use]
    pub fn has_origin(&self) -> bool {
        self.inner == 0.0
    }

    #[must_use]
    pub fn meta(&self) -> MeshMeta {
        MeshMeta {
            kind: if self.has_origin() { "half-disk-polar".into() } else { "half-annulus-polar".into() },
            nodes: self.nr + 1,
            inner: self.inner,
            outer: self.outer,
            angular_nodes: Some(self.nphi + 1),
        }
    }
}

/// Polar-frame gradient (u_r, u_φ/r) at every node.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub radial: Vec<f64>,
    pub angular: Vec<f64>,
}

impl Gradient {
    #[must_use]
    pub fn norm(&self, k: usize) -> f64 {
        self.radial[k].hypot(self.angular[k])
    }
}

/// Polar-frame Hessian components at every node.
#[derive(Debug, Clone)]
pub struct Hessian {
    pub rr: Vec<f64>,
    pub rt: Vec<f64>,
    pub tt: Vec<f64>,
}

impl Hessian {
    #[must_use]
    pub fn norm(&self, k: usize) -> f64 {
        (self.rr[k].powi(2) + 2.0 * self.rt[k].powi(2) + self.tt[k].powi(2)).sqrt()
    }

    #[must_use]
    pub fn matrix(&self, k: usize) -> Vec<Vec<f64>> {
        vec![vec![self.rr[k], self.rt[k]], vec![self.rt[k], self.tt[k]]]
    }
}

/// A planar field on a [`HalfDiskMesh`], zero on the flat rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field2D {
    mesh: HalfDiskMesh,
    values: Vec<f64>,
}

impl Field2D {
    pub fn new(mesh: HalfDiskMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidArgument(format!("{} values for a mesh with {} nodes", values.len(), mesh.len())));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        for i in 0..=mesh.nr {
            for j in [0, mesh.nphi] {
                if values[mesh.index(i, j)] != 0.0 {
                    return Err(Error::InvalidArgument(format!("field is nonzero on the flat boundary at r = {}", mesh.radius(i))));
                }
            }
        }
        Ok(Self { mesh, values })
    }

    #[must_use]
    pub fn zeros(mesh: HalfDiskMesh) -> Self {
        Self { mesh, values: vec![0.0; mesh.len()] }
    }

    /// Samples `g(r, φ)`; the flat rows are set to zero.
    pub fn from_fn(mesh: HalfDiskMesh, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = vec![0.0; mesh.len()];
        for i in 0..=mesh.nr {
            for j in 1..mesh.nphi {
                values[mesh.index(i, j)] = g(mesh.radius(i), mesh.angle(j));
            }
        }
        Self::new(mesh, values)
    }

    #[must_use]
    pub fn mesh(&self) -> &HalfDiskMesh {
        &self.mesh
    }

    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[must_use]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.index(i, j)]
    }

    #[must_use]
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    #[must_use]
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Bilinear interpolation in (r, φ); `None` outside the mesh.
    #[must_use]
    pub fn sample(&self, r: f64, phi: f64) -> Option<f64> {
        let m = &self.mesh;
        let tol = 1e-12 * m.outer;
        if r < m.inner - tol || r > m.outer + tol || !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&phi) {
            return None;
        }
        let (i, a) = cell(r - m.inner, m.dr(), m.nr);
        let (j, b) = cell(phi, m.dphi(), m.nphi);
        let v = |p: usize, q: usize| self.values[m.index(p, q)];
        Some(
            (1.0 - a) * ((1.0 - b) * v(i, j) + b * v(i, j + 1))
                + a * ((1.0 - b) * v(i + 1, j) + b * v(i + 1, j + 1)),
        )
    }

    /// Slope in r of the bilinear interpolant: the exact derivative along rays.
    #[must_use]
    pub fn sample_radial_slope(&self, r: f64, phi: f64) -> Option<f64> {
        let m = &self.mesh;
        let tol = 1e-12 * m.outer;
        if r < m.inner - tol || r > m.outer + tol || !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&phi) {
            return None;
        }
        let (i, _) = cell(r - m.inner, m.dr(), m.nr);
        let (j, b) = cell(phi, m.dphi(), m.nphi);
        let v = |p: usize, q: usize| self.values[m.index(p, q)];
        let lo = (1.0 - b) * v(i, j) + b * v(i, j + 1);
        let hi = (1.0 - b) * v(i + 1, j) + b * v(i + 1, j + 1);
        Some((hi - lo) / m.dr())
    }

    /// Second-order gradient; one-sided at the outer rows and flat rows.
    #[must_use]
    pub fn gradient(&self) -> Gradient {
        let m = self.mesh;
        let (nr, nphi, dr, dphi) = (m.nr, m.nphi, m.dr(), m.dphi());
        let mut radial = vec![0.0; m.len()];
        let mut angular = vec![0.0; m.len()];
        for i in 0..=nr {
            for j in 0..=nphi {
                let k = m.index(i, j);
                radial[k] = d_first(|p| self.at(p, j), i, nr, dr);
                let r = m.radius(i);
                if r > 0.0 {
                    angular[k] = d_first(|q| self.at(i, q), j, nphi, dphi) / r;
                }
            }
        }
        if m.has_origin() {
            extrapolate_origin(&m, &mut radial);
            extrapolate_origin(&m, &mut angular);
        }
        Gradient { radial, angular }
    }

    /// Hessian with the odd reflection u(r, −φ) = −u(r, φ) supplying ghosts at the flat rows.
    #[must_use]
    pub fn hessian(&self) -> Hessian {
        let m = self.mesh;
        let (nr, nphi, dr, dphi) = (m.nr, m.nphi, m.dr(), m.dphi());
        let reflected = |i: usize, q: isize| -> f64 {
            if q < 0 {
                -self.at(i, (-q) as usize)
            } else if q as usize > nphi {
                -self.at(i, 2 * nphi - q as usize)
            } else {
                self.at(i, q as usize)
            }
        };
        let mut u_phi = vec![0.0; m.len()];
        let mut u_phiphi = vec![0.0; m.len()];
        for i in 0..=nr {
            for j in 0..=nphi {
                let q = j as isize;
                let k = m.index(i, j);
                u_phi[k] = (reflected(i, q + 1) - reflected(i, q - 1)) / (2.0 * dphi);
                u_phiphi[k] = (reflected(i, q + 1) - 2.0 * reflected(i, q) + reflected(i, q - 1)) / (dphi * dphi);
            }
        }
        let mut rr = vec![0.0; m.len()];
        let mut rt = vec![0.0; m.len()];
        let mut tt = vec![0.0; m.len()];
        for i in 0..=nr {
            let r = m.radius(i);
            for j in 0..=nphi {
                let k = m.index(i, j);
                let ur = d_first(|p| self.at(p, j), i, nr, dr);
                rr[k] = d_second(|p| self.at(p, j), i, nr, dr);
                if r > 0.0 {
                    let urphi = d_first(|p| u_phi[m.index(p, j)], i, nr, dr);
                    rt[k] = urphi / r - u_phi[k] / (r * r);
                    tt[k] = u_phiphi[k] / (r * r) + ur / r;
                }
            }
        }
        if m.has_origin() {
            for a in [&mut rr, &mut rt, &mut tt] {
                extrapolate_origin(&m, a);
            }
        }
        Hessian { rr, rt, tt }
    }

    /// ∫ g over the half-annulus {lo ≤ r ≤ hi}, g sampled at the nodes.
    #[must_use]
    pub fn integrate(&self, g: &[f64], lo: f64, hi: f64) -> f64 {
        integrate_nodes(&self.mesh, g, lo, hi)
    }

    /// ∫ |g|^p over {lo ≤ r ≤ hi}, raised to 1/p.
    #[must_use]
    pub fn lp_norm(&self, g: &[f64], p: f64, lo: f64, hi: f64) -> f64 {
        let pow: Vec<f64> = g.iter().map(|v| v.abs().powf(p)).collect();
        self.integrate(&pow, lo, hi).max(0.0).powf(1.0 / p)
    }

    /// ∫ over the two flat segments {φ = 0, π, lo ≤ r ≤ hi} of g sampled on the flat rows.
    #[must_use]
    pub fn integrate_flat(&self, g: &[f64], lo: f64, hi: f64) -> f64 {
        let m = &self.mesh;
        let r = m.radii();
        [0, m.nphi]
            .iter()
            .map(|&j| {
                let row: Vec<f64> = (0..=m.nr).map(|i| g[m.index(i, j)]).collect();
                trapezoid_between(&r, &row, lo, hi)
            })
            .sum()
    }

    /// Values on the full annulus/disk after odd reflection, angles φ_j for j = −nphi..=nphi.
    #[must_use]
    pub fn reflect_odd(&self) -> Vec<Vec<f64>> {
        let m = &self.mesh;
        (0..=m.nr)
            .map(|i| {
                (0..=2 * m.nphi)
                    .map(|q| if q < m.nphi { -self.at(i, m.nphi - q) } else { self.at(i, q - m.nphi) })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Field2D = serde_json::from_str(s)?;
        let mesh = HalfDiskMesh::half_annulus(raw.mesh.inner, raw.mesh.outer, raw.mesh.nr, raw.mesh.nphi)?;
        Self::new(mesh, raw.values)
    }
}

/// ∫ g r dr dφ over {lo ≤ r ≤ hi}: trapezoid in φ, then in r.
pub(crate) fn integrate_nodes(m: &HalfDiskMesh, g: &[f64], lo: f64, hi: f64) -> f64 {
    let r = m.radii();
    let dphi = m.dphi();
    let profile: Vec<f64> = (0..=m.nr)
        .map(|i| {
            let row = &g[m.index(i, 0)..=m.index(i, m.nphi)];
            let s: f64 = row.iter().sum::<f64>() - 0.5 * (row[0] + row[m.nphi]);
            r[i] * s * dphi
        })
        .collect();
    trapezoid_between(&r, &profile, lo, hi)
}

/// Cell index and fractional offset of x on a uniform grid of `cells` cells of width `h`.
fn cell(x: f64, h: f64, cells: usize) -> (usize, f64) {
    let t = (x / h).clamp(0.0, cells as f64);
    let i = (t.floor() as usize).min(cells - 1);
    (i, t - i as f64)
}

/// Second-order first derivative of a sequence on a uniform grid of `last + 1` points.
fn d_first(v: impl Fn(usize) -> f64, i: usize, last: usize, h: f64) -> f64 {
    if i == 0 {
        (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h)
    } else if i == last {
        (3.0 * v(last) - 4.0 * v(last - 1) + v(last - 2)) / (2.0 * h)
    } else {
        (v(i + 1) - v(i - 1)) / (2.0 * h)
    }
}

fn d_second(v: impl Fn(usize) -> f64, i: usize, last: usize, h: f64) -> f64 {
    if i == 0 {
        (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / (h * h)
    } else if i == last {
        (2.0 * v(last) - 5.0 * v(last - 1) + 4.0 * v(last - 2) - v(last - 3)) / (h * h)
    } else {
        (v(i + 1) - 2.0 * v(i) + v(i - 1)) / (h * h)
    }
}

/// Polar-frame quantities are direction dependent at the origin; take the limit along each ray.
fn extrapolate_origin(m: &HalfDiskMesh, a: &mut [f64]) {
    for j in 0..=m.nphi {
        a[m.index(0, j)] = 2.0 * a[m.index(1, j)] - a[m.index(2, j)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mesh() -> HalfDiskMesh {
        HalfDiskMesh::half_disk(1.0, 64, 64).unwrap()
    }

    #[test]
    fn rejects_coarse_meshes() {
        assert!(matches!(HalfDiskMesh::half_disk(1.0, 4, 64), Err(Error::MeshTooCoarse { .. })));
    }

    #[test]
    fn flat_rows_must_vanish() {
        let m = mesh();
        let mut v = vec![0.0; m.len()];
        v[m.index(3, 0)] = 1.0;
        assert!(Field2D::new(m, v).is_err());
    }

    #[test]
    fn area_and_flux_of_simple_integrands() {
        let m = mesh();
        let one = vec![1.0; m.len()];
        let f = Field2D::zeros(m);
        assert!((f.integrate(&one, 0.0, 1.0) - PI / 2.0).abs() < 1e-12);
        assert!((f.integrate(&one, 0.5, 0.75) - PI / 2.0 * (0.75f64.powi(2) - 0.25)).abs() < 1e-12);
        assert!((f.integrate_flat(&one, 0.0, 0.875) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn gradient_and_hessian_of_quadratic() {
        // u = x₁x₂ = r² sin φ cos φ: ∇u = (x₂, x₁), |D²u|² = 2, Δu = 0.
        let f = Field2D::from_fn(mesh(), |r, p| r * r * p.sin() * p.cos()).unwrap();
        let g = f.gradient();
        let h = f.hessian();
        let m = *f.mesh();
        for i in [1, 20, 64] {
            for j in [0, 17, 40, 64] {
                let k = m.index(i, j);
                assert!((g.norm(k) - m.radius(i)).abs() < 1e-2 * m.radius(i), "{i} {j}");
                assert!((h.norm(k) - 2f64.sqrt()).abs() < 5e-3, "{i} {j}: {}", h.norm(k));
                assert!((h.rr[k] + h.tt[k]).abs() < 5e-3);
            }
        }
    }

    #[test]
    fn bilinear_sampling_reproduces_nodes_and_linear_radial_data() {
        let f = Field2D::from_fn(mesh(), |r, p| r * p.sin()).unwrap();
        let m = *f.mesh();
        for (i, j) in [(0, 0), (5, 7), (64, 32), (63, 63)] {
            assert!((f.sample(m.radius(i), m.angle(j)).unwrap() - f.at(i, j)).abs() < 1e-15);
        }
        let phi = m.angle(10);
        assert!((f.sample_radial_slope(0.3337, phi).unwrap() - phi.sin()).abs() < 1e-12);
        assert!(f.sample(1.2, 0.1).is_none());
    }

    /// The 5-point polar Laplacian on the full disk at (i, j) for reflected values.
    fn full_disk_laplacian(m: &HalfDiskMesh, full: &[Vec<f64>], i: usize, q: usize) -> f64 {
        let (dr, dphi) = (m.dr(), m.dphi());
        let r = m.radius(i);
        let (rp, rm) = (r + 0.5 * dr, r - 0.5 * dr);
        let radial = (rp * (full[i + 1][q] - full[i][q]) - rm * (full[i][q] - full[i - 1][q])) / (r * dr * dr);
        let angular = (full[i][q + 1] - 2.0 * full[i][q] + full[i][q - 1]) / (r * r * dphi * dphi);
        radial + angular
    }

    #[test]
    fn odd_reflection_keeps_discrete_laplacian_odd() {
        let m = mesh();
        for g in [|r: f64, p: f64| r * p.sin(), |r: f64, p: f64| r * r * p.sin() * p.cos()] {
            let f = Field2D::from_fn(m, g).unwrap();
            let full = f.reflect_odd();
            for i in 1..m.nr {
                // Flat rows: the reflected stencil gives exactly zero.
                assert_eq!(full_disk_laplacian(&m, &full, i, m.nphi), 0.0);
                for j in [1, 9, 33] {
                    let up = full_disk_laplacian(&m, &full, i, m.nphi + j);
                    let down = full_disk_laplacian(&m, &full, i, m.nphi - j);
                    assert!((up + down).abs() <= 1e-12 * up.abs().max(1.0));
                    assert!(up.abs() < 3e-3 * (1.0 + 1.0 / m.radius(i)), "harmonic input: {up}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = Field2D::from_fn(mesh(), |r, p| r * p.sin()).unwrap();
        let g = Field2D::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, g);
    }
}
