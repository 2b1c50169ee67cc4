//! First Dirichlet eigenvalue of −Δ − V in the radial sector, V = λf′(u).
//!
//! Lumped P1 elements on the radial mesh: natural condition at the inner cutoff, ξ = 0 at the
//! outer radius. The generalized problem (K − VM)ξ = μMξ with diagonal M is symmetrized to a
//! tridiagonal matrix, whose smallest eigenvalue is bracketed by Sturm counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::mesh::{Dimension, RadialMesh};
use crate::nonlinearity::Nonlinearity;
use crate::radial::BifurcationBranch;

/// Stability gate: a solution counts as stable when its first eigenvalue is at least −this.
pub const STABILITY_TOLERANCE: f64 = 1e-6;
pub const MAX_BISECTION_STEPS: usize = 200;
const MIN_EIGEN_NODES: usize = 5;
pub const SECTOR_LABEL: &str = "radial sector";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub first_eigenvalue: f64,
    /// Same potential on the mesh extended down to a tenth of the inner cutoff.
    pub eigenvalue_at_tenth_cutoff: f64,
    pub rayleigh_quotient: f64,
    pub eigenfunction: RadialField,
    pub potential: RadialField,
    pub hardy_margin: Option<f64>,
    pub sector: String,
    pub inner_cutoff: f64,
}

impl StabilityReport {
    #[must_use]
    pub fn is_stable(&self) -> bool {
        self.first_eigenvalue >= -STABILITY_TOLERANCE
    }
}

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples i and i+1.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots of A − x).
    #[must_use]
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / d };
            d = self.diag[i] - x - coupling;
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let m = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < m { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Smallest eigenvalue by bisection on the Sturm count.
    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 4.0 * f64::EPSILON * scale.min(1.0 + lo.abs().max(hi.abs())) || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NotConverged { iterations: MAX_BISECTION_STEPS })
    }

    /// Solves (A − σ)y = b by the Thomas algorithm.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
        let m = self.diag.len();
        let mut c = vec![0.0; m];
        let mut y = vec![0.0; m];
        let mut denom = self.diag[0] - sigma;
        for i in 0..m {
            if i > 0 {
                denom = self.diag[i] - sigma - self.off[i - 1] * c[i - 1];
            }
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::SolverSingular(format!("zero pivot at row {i}")));
            }
            c[i] = if i + 1 < m { self.off[i] / denom } else { 0.0 };
            y[i] = (b[i] - if i > 0 { self.off[i - 1] * y[i - 1] } else { 0.0 }) / denom;
        }
        for i in (0..m.saturating_sub(1)).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        Ok(y)
    }
}

/// Lumped mass ∫φᵢ r^{n−1} dr and cell stiffness weights ∫ r^{n−1} dr / h² (per cell).
fn mass_and_stiffness(nodes: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut mass = vec![0.0; nodes.len()];
    let mut stiff = Vec::with_capacity(nodes.len() - 1);
    for (i, w) in nodes.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        // Moments ∫ r^{n−1}, ∫ r^n over the cell; hat functions split them linearly.
        let m0 = (b.powi(n as i32) - a.powi(n as i32)) / nf;
        let m1 = (b.powi(n as i32 + 1) - a.powi(n as i32 + 1)) / (nf + 1.0);
        mass[i] += (b * m0 - m1) / h;
        mass[i + 1] += (m1 - a * m0) / h;
        stiff.push(m0 / (h * h));
    }
    (mass, stiff)
}

struct Discrete {
    matrix: Tridiagonal,
    mass: Vec<f64>,
    stiff: Vec<f64>,
    potential: Vec<f64>,
}

fn assemble(nodes: &[f64], n: usize, potential: &[f64]) -> Discrete {
    let (mass, stiff) = mass_and_stiffness(nodes, n);
    // Unknowns are nodes 0..N−1; the last node carries ξ = 0.
    let m = nodes.len() - 1;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m.saturating_sub(1)];
    for i in 0..m {
        let k_ii = stiff[i] + if i > 0 { stiff[i - 1] } else { 0.0 };
        diag[i] = k_ii / mass[i] - potential[i];
        if i + 1 < m {
            off[i] = -stiff[i] / (mass[i] * mass[i + 1]).sqrt();
        }
    }
    Discrete { matrix: Tridiagonal { diag, off }, mass, stiff, potential: potential.to_vec() }
}

impl Discrete {
    fn eigenpair(&self) -> Result<(f64, Vec<f64>)> {
        let mu = self.matrix.smallest_eigenvalue()?;
        let m = self.matrix.diag.len();
        let sigma = mu - 1e-9 * mu.abs().max(1.0);
        let mut y = vec![1.0 / (m as f64).sqrt(); m];
        for _ in 0..3 {
            let z = self.matrix.solve_shifted(sigma, &y)?;
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            y = z.into_iter().map(|v| v / norm).collect();
        }
        let mut xi: Vec<f64> = y.iter().zip(&self.mass).map(|(v, mi)| v / mi.sqrt()).collect();
        if xi.iter().sum::<f64>() < 0.0 {
            xi.iter_mut().for_each(|v| *v = -*v);
        }
        xi.push(0.0);
        Ok((mu, xi))
    }

    /// (∫ξ′² r^{n−1} − Σ Vᵢ Mᵢ ξᵢ²) / Σ Mᵢ ξᵢ² on the unsymmetrized form.
    fn rayleigh(&self, xi: &[f64]) -> f64 {
        let grad: f64 = self.stiff.iter().enumerate().map(|(i, k)| k * (xi[i + 1] - xi[i]).powi(2)).sum();
        let m = self.matrix.diag.len();
        let pot: f64 = (0..m).map(|i| self.potential[i] * self.mass[i] * xi[i] * xi[i]).sum();
        let norm: f64 = (0..m).map(|i| self.mass[i] * xi[i] * xi[i]).sum();
        (grad - pot) / norm
    }
}

/// Smallest eigenvalue of the radial form with a sampled potential (no eigenvector).
pub fn smallest_eigenvalue_with_potential(nodes: &[f64], n: usize, potential: &[f64]) -> Result<f64> {
    if nodes.len() < MIN_EIGEN_NODES {
        return Err(Error::MeshTooCoarse { nodes: nodes.len(), required: MIN_EIGEN_NODES });
    }
    assemble(nodes, n, potential).matrix.smallest_eigenvalue()
}

/// Mesh extended geometrically to a tenth of its inner cutoff, potential continued as
/// V(ε₀)(ε₀/r)^k with k the local log-slope clamped to [0, 2].
fn extended_to_tenth(nodes: &[f64], potential: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r0 = nodes[0];
    let ratio = (nodes[1] / r0).clamp(1.0 + 1e-3, 1.25);
    let v0 = potential[0];
    let slope = if v0 > 0.0 && potential[1] > 0.0 {
        -((potential[1] / v0).ln() / (nodes[1] / r0).ln())
    } else {
        0.0
    };
    let k = if slope.is_finite() { slope.clamp(0.0, 2.0) } else { 0.0 };
    let target = r0 / 10.0;
    let mut extra = Vec::new();
    let mut r = r0;
    while r > target * (1.0 + 1e-12) {
        r = (r / ratio).max(target);
        extra.push(r);
    }
    extra.reverse();
    let mut ext_nodes = extra.clone();
    ext_nodes.extend_from_slice(nodes);
    let mut ext_pot: Vec<f64> = extra.iter().map(|&s| v0 * (r0 / s).powf(k)).collect();
    ext_pot.extend_from_slice(potential);
    (ext_nodes, ext_pot)
}

/// Eigenpair for a prescribed potential sampled on the field's mesh.
pub fn eigen_report_for_potential(potential: &RadialField) -> Result<StabilityReport> {
    let nodes = potential.nodes();
    if nodes.len() < MIN_EIGEN_NODES {
        return Err(Error::MeshTooCoarse { nodes: nodes.len(), required: MIN_EIGEN_NODES });
    }
    let n = potential.n();
    let disc = assemble(nodes, n, potential.values());
    let (mu, xi) = disc.eigenpair()?;
    let rq = disc.rayleigh(&xi);
    let (ext_nodes, ext_pot) = extended_to_tenth(nodes, potential.values());
    let mu_tenth = smallest_eigenvalue_with_potential(&ext_nodes, n, &ext_pot)?;
    Ok(StabilityReport {
        first_eigenvalue: mu,
        eigenvalue_at_tenth_cutoff: mu_tenth,
        rayleigh_quotient: rq,
        eigenfunction: potential.with_values(xi)?,
        potential: potential.clone(),
        hardy_margin: None,
        sector: SECTOR_LABEL.into(),
        inner_cutoff: nodes[0],
    })
}

/// First eigenvalue of −Δ − λf′(u) with Dirichlet data at the outer radius.
pub fn first_eigenvalue(field: &RadialField, f: &Nonlinearity, lambda: f64) -> Result<StabilityReport> {
    let potential = field.map(|_, u| lambda * f.fprime(u))?;
    eigen_report_for_potential(&potential)
}

/// (n−2)²/4 − 2(n−2): Hardy constant minus the singular-solution potential coefficient.
pub fn hardy_margin(n: Dimension) -> Result<f64> {
    let n = n.require_at_least(3)?.get() as f64;
    Ok((n - 2.0).powi(2) / 4.0 - 2.0 * (n - 2.0))
}

/// Stability of u = −2 ln r against −Δ − 2(n−2)/r² on a geometric mesh over `[inner, 1]`.
pub fn singular_stability(n: Dimension, inner: f64, nodes: usize) -> Result<StabilityReport> {
    let margin = hardy_margin(n)?;
    let mesh = RadialMesh::geometric(inner, 1.0, nodes)?;
    let c = 2.0 * (n.get() as f64 - 2.0);
    let potential = RadialField::from_fn(mesh, n, |r| c / (r * r))?;
    let mut report = eigen_report_for_potential(&potential)?;
    report.hardy_margin = Some(margin);
    Ok(report)
}

/// Fills `stable` and `first_eigenvalue` on every branch point.
pub fn annotate_stability(branch: &mut BifurcationBranch) -> Result<()> {
    let f = branch.nonlinearity.clone();
    let results: Vec<f64> = branch
        .points
        .par_iter()
        .map(|p| first_eigenvalue(&p.field, &f, p.lambda).map(|r| r.first_eigenvalue))
        .collect::<Result<_>>()?;
    for (p, mu) in branch.points.iter_mut().zip(results) {
        p.first_eigenvalue = Some(mu);
        p.stable = Some(mu >= -STABILITY_TOLERANCE);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn hardy_margin_arithmetic() {
        assert_eq!(hardy_margin(dim(10)).unwrap(), 0.0);
        assert_eq!(hardy_margin(dim(9)).unwrap(), -7.0 / 4.0);
        assert_eq!(hardy_margin(dim(12)).unwrap(), 5.0);
        assert!(matches!(hardy_margin(dim(2)), Err(Error::DimensionTooLow { .. })));
    }

    #[test]
    fn sturm_count_on_diagonal_matrix() {
        let t = Tridiagonal { diag: vec![1.0, 2.0, 3.0], off: vec![0.0, 0.0] };
        assert_eq!(t.count_below(2.5), 2);
        assert!((t.smallest_eigenvalue().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_laplacian_in_three_dimensions_gives_pi_squared() {
        let mesh = RadialMesh::uniform(1e-6, 1.0, 2000).unwrap();
        let zero = RadialField::from_fn(mesh, dim(3), |_| 0.0).unwrap();
        let rep = first_eigenvalue(&zero, &Nonlinearity::linear(1.0), 0.0).unwrap();
        assert!((rep.first_eigenvalue / (PI * PI) - 1.0).abs() < 1e-3, "{}", rep.first_eigenvalue);
        assert!((rep.rayleigh_quotient / rep.first_eigenvalue - 1.0).abs() < 1e-6);
        let ef = rep.eigenfunction.values();
        assert!(ef[..ef.len() - 1].iter().all(|&v| v > 0.0));
        assert_eq!(ef[ef.len() - 1], 0.0);
        assert_eq!(rep.sector, SECTOR_LABEL);
    }

    #[test]
    fn hardy_threshold_separates_nine_and_ten() {
        let nine = singular_stability(dim(9), 1e-4, 4096).unwrap();
        let ten = singular_stability(dim(10), 1e-4, 4096).unwrap();
        assert!(nine.first_eigenvalue < -0.1, "{}", nine.first_eigenvalue);
        assert!(ten.first_eigenvalue >= -1e-3, "{}", ten.first_eigenvalue);
    }
}
