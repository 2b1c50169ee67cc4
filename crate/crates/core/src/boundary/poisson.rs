//! Fast solver for the 5-point polar Laplacian: sine transform in φ, tridiagonal solves in r.
//!
//! Multiplying row i by r_i makes −Δ_h symmetric, so everything here is self-adjoint in
//! ⟨a, b⟩ = Σ r_i a_ij b_ij over the unknown nodes.

use crate::error::{Error, Result};

use super::grid::HalfDiskMesh;

/// Condition imposed on a curved row (i = 0 or i = nr).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialCondition {
    /// Values on the row are data.
    Dirichlet,
    /// Zero normal derivative via the ghost u_{−1} = u_1.
    Neumann,
}

#[derive(Debug, Clone)]
pub struct PolarPoisson {
    mesh: HalfDiskMesh,
    inner: RadialCondition,
    outer: RadialCondition,
    /// sin(m j π / nphi) for m, j = 1..nphi−1.
    sines: Vec<f64>,
    /// Eigenvalues of the negated angular second difference.
    kappa: Vec<f64>,
}

impl PolarPoisson {
    pub fn new(mesh: HalfDiskMesh, inner: RadialCondition, outer: RadialCondition) -> Result<Self> {
        if mesh.has_origin() && inner == RadialCondition::Neumann {
            return Err(Error::InvalidArgument("the origin row cannot carry a Neumann condition".into()));
        }
        let m = mesh.nphi;
        let dphi = mesh.dphi();
        let mut sines = vec![0.0; (m - 1) * (m - 1)];
        for a in 1..m {
            for b in 1..m {
                sines[(a - 1) * (m - 1) + (b - 1)] = ((a * b) as f64 * std::f64::consts::PI / m as f64).sin();
            }
        }
        let kappa = (1..m).map(|a| (2.0 * (0.5 * a as f64 * dphi).sin() / dphi).powi(2)).collect();
        Ok(Self { mesh, inner, outer, sines, kappa })
    }

    /// Dirichlet on every curved row.
    pub fn dirichlet(mesh: HalfDiskMesh) -> Result<Self> {
        Self::new(mesh, RadialCondition::Dirichlet, RadialCondition::Dirichlet)
    }

    #[must_use]
    pub fn mesh(&self) -> &HalfDiskMesh {
        &self.mesh
    }

    /// First and last radial row carrying unknowns.
    #[must_use]
    pub fn unknown_rows(&self) -> (usize, usize) {
        let lo = if self.inner == RadialCondition::Neumann { 0 } else { 1 };
        let hi = if self.outer == RadialCondition::Neumann { self.mesh.nr } else { self.mesh.nr - 1 };
        (lo, hi)
    }

    #[must_use]
    pub fn is_unknown(&self, i: usize, j: usize) -> bool {
        let (lo, hi) = self.unknown_rows();
        (lo..=hi).contains(&i) && j > 0 && j < self.mesh.nphi
    }

    /// Coefficients (lower, diagonal-without-angular, upper) of −Δ_h on row i.
    fn radial_stencil(&self, i: usize) -> (f64, f64, f64) {
        let h = self.mesh.dr();
        let r = self.mesh.radius(i);
        let at_inner = i == 0 && self.inner == RadialCondition::Neumann;
        let at_outer = i == self.mesh.nr && self.outer == RadialCondition::Neumann;
        if at_inner {
            (0.0, 2.0 / (h * h), -2.0 / (h * h))
        } else if at_outer {
            (-2.0 / (h * h), 2.0 / (h * h), 0.0)
        } else {
            let (rm, rp) = (r - 0.5 * h, r + 0.5 * h);
            (-rm / (r * h * h), (rm + rp) / (r * h * h), -rp / (r * h * h))
        }
    }

    /// −Δ_h u at the unknown nodes (zero elsewhere). Dirichlet rows of `u` act as data.
    #[must_use]
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = &self.mesh;
        let mut out = vec![0.0; m.len()];
        let (lo, hi) = self.unknown_rows();
        let dphi2 = m.dphi() * m.dphi();
        for i in lo..=hi {
            let (a, b, c) = self.radial_stencil(i);
            let r = m.radius(i);
            let ang = 1.0 / (r * r * dphi2);
            for j in 1..m.nphi {
                let k = m.index(i, j);
                let below = if i > 0 { u[m.index(i - 1, j)] } else { 0.0 };
                let above = if i < m.nr { u[m.index(i + 1, j)] } else { 0.0 };
                out[k] = a * below + b * u[k] + c * above - ang * (u[k + 1] - 2.0 * u[k] + u[k - 1]);
            }
        }
        out
    }

    /// Solves −Δ_h u = g at the unknown nodes with the Dirichlet rows of `boundary` as data.
    #[must_use]
    pub fn solve(&self, g: &[f64], boundary: &[f64]) -> Vec<f64> {
        let m = &self.mesh;
        let nphi = m.nphi;
        let (lo, hi) = self.unknown_rows();
        let modes = nphi - 1;
        // Right-hand side with Dirichlet neighbours moved across.
        let mut rhs = vec![0.0; (hi - lo + 1) * modes];
        for i in lo..=hi {
            let (a, _, c) = self.radial_stencil(i);
            for j in 1..nphi {
                let mut v = g[m.index(i, j)];
                if i == lo && lo > 0 {
                    v -= a * boundary[m.index(lo - 1, j)];
                }
                if i == hi && hi < m.nr {
                    v -= c * boundary[m.index(hi + 1, j)];
                }
                rhs[(i - lo) * modes + (j - 1)] = v;
            }
        }
        let mut hat = vec![0.0; rhs.len()];
        let scale = 2.0 / nphi as f64;
        for row in 0..=(hi - lo) {
            self.transform(&rhs[row * modes..(row + 1) * modes], &mut hat[row * modes..(row + 1) * modes], scale);
        }
        // Thomas algorithm per mode.
        let rows = hi - lo + 1;
        let mut cp = vec![0.0; rows];
        let mut dp = vec![0.0; rows];
        let mut sol_hat = vec![0.0; rhs.len()];
        for (q, &kap) in self.kappa.iter().enumerate() {
            for row in 0..rows {
                let i = lo + row;
                let (a, b0, c) = self.radial_stencil(i);
                let r = m.radius(i);
                let b = b0 + kap / (r * r);
                let d = hat[row * modes + q];
                if row == 0 {
                    cp[0] = c / b;
                    dp[0] = d / b;
                } else {
                    let den = b - a * cp[row - 1];
                    cp[row] = c / den;
                    dp[row] = (d - a * dp[row - 1]) / den;
                }
            }
            sol_hat[(rows - 1) * modes + q] = dp[rows - 1];
            for row in (0..rows - 1).rev() {
                sol_hat[row * modes + q] = dp[row] - cp[row] * sol_hat[(row + 1) * modes + q];
            }
        }
        let mut u = boundary.to_vec();
        for j in [0, nphi] {
            for i in 0..=m.nr {
                u[m.index(i, j)] = 0.0;
            }
        }
        let mut line = vec![0.0; modes];
        for row in 0..rows {
            self.transform(&sol_hat[row * modes..(row + 1) * modes], &mut line, 1.0);
            let i = lo + row;
            u[m.index(i, 1)..m.index(i, nphi)].copy_from_slice(&line);
        }
        u
    }

    /// out_a = scale · Σ_b sin(abπ/nphi) x_b; the sine transform is its own inverse up to 2/nphi.
    fn transform(&self, x: &[f64], out: &mut [f64], scale: f64) {
        let modes = x.len();
        for (a, o) in out.iter_mut().enumerate() {
            let row = &self.sines[a * modes..(a + 1) * modes];
            *o = scale * row.iter().zip(x).map(|(s, v)| s * v).sum::<f64>();
        }
    }

    /// ⟨a, b⟩ = Σ r_i a_ij b_ij over the unknown nodes.
    #[must_use]
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let m = &self.mesh;
        let (lo, hi) = self.unknown_rows();
        let mut s = 0.0;
        for i in lo..=hi {
            let r = m.radius(i);
            let k0 = m.index(i, 1);
            let k1 = m.index(i, m.nphi);
            s += r * a[k0..k1].iter().zip(&b[k0..k1]).map(|(x, y)| x * y).sum::<f64>();
        }
        s
    }

    /// Zeroes every non-unknown node.
    pub fn mask(&self, v: &mut [f64]) {
        let m = self.mesh;
        for i in 0..=m.nr {
            for j in 0..=m.nphi {
                if !self.is_unknown(i, j) {
                    v[m.index(i, j)] = 0.0;
                }
            }
        }
    }

    /// Preconditioned conjugate gradients for (−Δ_h − V) x = b with −Δ_h⁻¹ as preconditioner.
    ///
    /// `potential` is multiplied pointwise; b must vanish off the unknown nodes. Fails with
    /// `SolverSingular` on non-positive curvature.
    pub fn pcg(&self, potential: &[f64], b: &[f64], rel_tol: f64, max_iter: usize) -> Result<PcgOutcome> {
        let zero = vec![0.0; b.len()];
        let apply_a = |x: &[f64]| -> Vec<f64> {
            let mut y = self.apply(x);
            for (k, v) in y.iter_mut().enumerate() {
                *v -= potential[k] * x[k];
            }
            self.mask(&mut y);
            y
        };
        let precond = |r: &[f64]| -> Vec<f64> { self.solve(r, &zero) };
        let mut x = vec![0.0; b.len()];
        let mut r = b.to_vec();
        self.mask(&mut r);
        let bnorm = self.dot(&r, &r).sqrt();
        if bnorm == 0.0 {
            return Ok(PcgOutcome { solution: x, iterations: 0 });
        }
        let mut z = precond(&r);
        let mut p = z.clone();
        let mut rz = self.dot(&r, &z);
        for it in 1..=max_iter {
            let ap = apply_a(&p);
            let curv = self.dot(&p, &ap);
            if !(curv > 0.0) {
                return Err(Error::SolverSingular(format!("non-positive curvature {curv:e} at iteration {it}")));
            }
            let alpha = rz / curv;
            for k in 0..x.len() {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            if self.dot(&r, &r).sqrt() <= rel_tol * bnorm {
                return Ok(PcgOutcome { solution: x, iterations: it });
            }
            z = precond(&r);
            let rz_new = self.dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..p.len() {
                p[k] = z[k] + beta * p[k];
            }
        }
        Err(Error::SolverSingular(format!("conjugate gradients did not reach {rel_tol:e} in {max_iter} iterations")))
    }
}

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_solve_inverts_the_stencil() {
        let mesh = HalfDiskMesh::half_disk(1.0, 24, 16).unwrap();
        let p = PolarPoisson::dirichlet(mesh).unwrap();
        let mut g = vec![0.0; mesh.len()];
        let mut bdry = vec![0.0; mesh.len()];
        for i in 0..=mesh.nr {
            for j in 1..mesh.nphi {
                let k = mesh.index(i, j);
                g[k] = 1.0 + (i * j) as f64 * 0.01;
                if i == mesh.nr {
                    bdry[k] = (mesh.angle(j)).sin();
                }
            }
        }
        p.mask(&mut g);
        let u = p.solve(&g, &bdry);
        let back = p.apply(&u);
        for k in 0..mesh.len() {
            assert!((back[k] - g[k]).abs() < 1e-9, "{k}: {} vs {}", back[k], g[k]);
        }
        assert_eq!(u[mesh.index(mesh.nr, 5)], bdry[mesh.index(mesh.nr, 5)]);
    }

    #[test]
    fn neumann_rows_are_solved_too() {
        let mesh = HalfDiskMesh::half_annulus(0.5, 1.0, 16, 16).unwrap();
        let p = PolarPoisson::new(mesh, RadialCondition::Neumann, RadialCondition::Neumann).unwrap();
        let mut g = vec![1.0; mesh.len()];
        p.mask(&mut g);
        let u = p.solve(&g, &vec![0.0; mesh.len()]);
        let back = p.apply(&u);
        for k in 0..mesh.len() {
            assert!((back[k] - g[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn weighted_operator_is_symmetric() {
        let mesh = HalfDiskMesh::half_disk(1.0, 12, 10).unwrap();
        let p = PolarPoisson::dirichlet(mesh).unwrap();
        let mut a: Vec<f64> = (0..mesh.len()).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let mut b: Vec<f64> = (0..mesh.len()).map(|k| ((k * 104_729) % 11) as f64 - 5.0).collect();
        p.mask(&mut a);
        p.mask(&mut b);
        let lhs = p.dot(&a, &p.apply(&b));
        let rhs = p.dot(&p.apply(&a), &b);
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs());
    }

    #[test]
    fn pcg_with_zero_potential_converges_at_once() {
        let mesh = HalfDiskMesh::half_disk(1.0, 16, 16).unwrap();
        let p = PolarPoisson::dirichlet(mesh).unwrap();
        let mut b = vec![1.0; mesh.len()];
        p.mask(&mut b);
        let out = p.pcg(&vec![0.0; mesh.len()], &b, 1e-12, 10).unwrap();
        assert!(out.iterations <= 2);
    }
}
