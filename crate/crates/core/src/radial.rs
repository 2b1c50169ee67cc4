//! Radial shooting for −u'' − ((n−1)/r)u' = λf(u), u'(0) = 0, u(1) = 0,
//! branch continuation in the centre value s = u(0), and the explicit singular solution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::mesh::{Dimension, RadialMesh};
use crate::nonlinearity::{Nonlinearity, NonlinearityKind};
use crate::quadrature::{radial_integral, DomainSpec};

/// Absolute bisection tolerance on λ.
pub const LAMBDA_TOL: f64 = 1e-10;
/// Upper end of the admissible λ range.
pub const LAMBDA_MAX: f64 = 1e6;
/// Centre-value cap for exponential nonlinearities.
pub const EXP_S_CAP: f64 = 40.0;
/// Largest ratio r_{k+1}/r_k of a single RK4 step near the centre.
const MAX_STEP_RATIO: f64 = 1.005;
const MAX_SUBSTEPS: usize = 1 << 16;
const MIN_SUBSTEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    pub lambda_tol: f64,
    pub lambda_max: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self { lambda_tol: LAMBDA_TOL, lambda_max: LAMBDA_MAX }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub lambda: f64,
    pub center_value: f64,
    pub field: RadialField,
    pub stable: Option<bool>,
    pub first_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationBranch {
    pub dim: Dimension,
    pub nonlinearity: Nonlinearity,
    pub points: Vec<BranchPoint>,
    pub lambda_star_estimate: f64,
    pub turning_index: usize,
}

impl BifurcationBranch {
    /// Points up to and including the turning index.
    #[must_use]
    pub fn lower_part(&self) -> &[BranchPoint] {
        &self.points[..=self.turning_index]
    }
}

enum Trajectory {
    /// Reached r = R; values at every node, u(R).
    Complete(Vec<f64>),
    /// u dropped below zero before r = R.
    Crossed,
}

struct Ivp<'a> {
    n: usize,
    f: &'a Nonlinearity,
    lambda: f64,
}

impl Ivp<'_> {
    #[inline]
    fn rhs(&self, r: f64, u: f64, w: f64) -> (f64, f64) {
        let rn1 = r.powi(self.n as i32 - 1);
        (w / rn1, -self.lambda * self.f.f(u) * rn1)
    }

    fn rk4(&self, r: f64, h: f64, u: f64, w: f64) -> (f64, f64) {
        let (a1, b1) = self.rhs(r, u, w);
        let (a2, b2) = self.rhs(r + 0.5 * h, u + 0.5 * h * a1, w + 0.5 * h * b1);
        let (a3, b3) = self.rhs(r + 0.5 * h, u + 0.5 * h * a2, w + 0.5 * h * b2);
        let (a4, b4) = self.rhs(r + h, u + h * a3, w + h * b3);
        (u + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4), w + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4))
    }

    /// Series start u = s − a r² + c r⁴ at the first node.
    fn start(&self, s: f64, r0: f64) -> (f64, f64) {
        let nf = self.n as f64;
        let fs = self.f.f(s);
        let a = self.lambda * fs / (2.0 * nf);
        let c = self.lambda * self.lambda * fs * self.f.fprime(s) / (8.0 * nf * (nf + 2.0));
        let u = s - a * r0 * r0 + c * r0.powi(4);
        let du = -2.0 * a * r0 + 4.0 * c * r0.powi(3);
        (u, du * r0.powi(self.n as i32 - 1))
    }

    fn integrate(&self, s: f64, nodes: &[f64], stop_on_cross: bool) -> Result<Trajectory> {
        let (mut u, mut w) = self.start(s, nodes[0]);
        let mut values = Vec::with_capacity(nodes.len());
        values.push(u);
        for win in nodes.windows(2) {
            let (r0, r1) = (win[0], win[1]);
            let ratio = r1 / r0;
            let k = ((ratio.ln() / MAX_STEP_RATIO.ln()).ceil() as usize).max(MIN_SUBSTEPS);
            if k > MAX_SUBSTEPS {
                return Err(Error::StiffFailure { r: r0 });
            }
            let mut r = r0;
            for j in 1..=k {
                let next = if j == k { r1 } else { r0 * ratio.powf(j as f64 / k as f64) };
                let (nu, nw) = self.rk4(r, next - r, u, w);
                u = nu;
                w = nw;
                r = next;
            }
            if !u.is_finite() || !w.is_finite() {
                return Err(Error::StiffFailure { r: r1 });
            }
            if stop_on_cross && u < 0.0 && r1 < nodes[nodes.len() - 1] {
                return Ok(Trajectory::Crossed);
            }
            values.push(u);
        }
        Ok(Trajectory::Complete(values))
    }

    fn end_value(&self, s: f64, nodes: &[f64]) -> Result<f64> {
        Ok(match self.integrate(s, nodes, true)? {
            Trajectory::Complete(v) => v[v.len() - 1],
            Trajectory::Crossed => -1.0,
        })
    }
}

/// Solves for λ such that the IVP u(0) = s, u'(0) = 0 satisfies u(R) = 0 on the given mesh.
pub fn shoot(n: Dimension, f: &Nonlinearity, s: f64, mesh: &RadialMesh) -> Result<(f64, RadialField)> {
    shoot_with(n, f, s, mesh, ShootConfig::default())
}

pub fn shoot_with(
    n: Dimension,
    f: &Nonlinearity,
    s: f64,
    mesh: &RadialMesh,
    cfg: ShootConfig,
) -> Result<(f64, RadialField)> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("centre value must be ≥ 0, got {s}")));
    }
    if let Some(limit) = f.upper_limit() {
        if s >= limit {
            return Err(Error::InvalidArgument(format!("centre value {s} beyond the singularity of f at {limit}")));
        }
    }
    let nodes = mesh.nodes();
    if s == 0.0 {
        return Ok((0.0, RadialField::new(mesh.clone(), vec![0.0; nodes.len()], n)?));
    }
    let end = |lambda: f64| Ivp { n: n.get(), f, lambda }.end_value(s, nodes);
    let (mut lo, mut end_lo) = (0.0, s);
    let mut hi = 1.0;
    let mut end_hi = end(hi)?;
    while end_hi > 0.0 {
        (lo, end_lo) = (hi, end_hi);
        hi *= 2.0;
        if hi > cfg.lambda_max {
            return Err(Error::NoBracket { s, upper: cfg.lambda_max });
        }
        end_hi = end(hi)?;
    }
    while hi - lo > cfg.lambda_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let e = end(mid)?;
        if e > 0.0 {
            (lo, end_lo) = (mid, e);
        } else {
            (hi, end_hi) = (mid, e);
        }
    }
    // One secant step inside the final bracket; u(R) is smooth in λ there.
    let lambda = if end_hi > -1.0 && end_lo > end_hi {
        (lo + end_lo * (hi - lo) / (end_lo - end_hi)).clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    let mut values = match (Ivp { n: n.get(), f, lambda }).integrate(s, nodes, false)? {
        Trajectory::Complete(v) => v,
        Trajectory::Crossed => unreachable!("integration without crossing stop"),
    };
    let last = values.len() - 1;
    values[last] = 0.0;
    Ok((lambda, RadialField::new(mesh.clone(), values, n)?))
}

/// Largest admissible centre value for `f` given a requested cap.
#[must_use]
pub fn capped_center_value(f: &Nonlinearity, s_max: f64) -> f64 {
    let mut s = s_max;
    if matches!(f.kind, NonlinearityKind::Exp { .. } | NonlinearityKind::DoubleExp) {
        s = s.min(EXP_S_CAP);
    }
    if let Some(limit) = f.upper_limit() {
        s = s.min(limit * (1.0 - 1e-3));
    }
    s
}

/// Log-spaced centre values in `[s_max·10⁻³, s_max]`.
#[must_use]
pub fn center_value_grid(s_max: f64, steps: usize) -> Vec<f64> {
    let lo = (s_max * 1e-3).ln();
    let hi = s_max.ln();
    (0..steps).map(|k| (lo + (hi - lo) * k as f64 / (steps - 1) as f64).exp()).collect()
}

/// Continuation on the default smooth-branch mesh (uniform, 1024 nodes).
pub fn continue_branch(n: Dimension, f: &Nonlinearity, s_max: f64, steps: usize) -> Result<BifurcationBranch> {
    continue_branch_on(n, f, s_max, steps, &RadialMesh::unit_uniform(1024)?)
}

/// Samples s on a log grid, shoots at each s, and marks the fold as the max-λ index.
pub fn continue_branch_on(
    n: Dimension,
    f: &Nonlinearity,
    s_max: f64,
    steps: usize,
    mesh: &RadialMesh,
) -> Result<BifurcationBranch> {
    if steps < 8 {
        return Err(Error::InvalidArgument(format!("continuation needs at least 8 steps, got {steps}")));
    }
    let s_max = capped_center_value(f, s_max);
    let grid = center_value_grid(s_max, steps);
    let points = grid
        .par_iter()
        .map(|&s| {
            shoot(n, f, s, mesh)
                .map(|(lambda, field)| BranchPoint {
                    lambda,
                    center_value: s,
                    field,
                    stable: None,
                    first_eigenvalue: None,
                })
                .map_err(|e| e.at_center_value(s))
        })
        .collect::<Result<Vec<_>>>()?;
    let (turning_index, lambda_star_estimate) = points
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.lambda > acc.1 { (i, p.lambda) } else { acc });
    Ok(BifurcationBranch { dim: n, nonlinearity: f.clone(), points, lambda_star_estimate, turning_index })
}

/// Fold value max_s λ(s) on `mesh`: the max-λ sample of a `steps`-point grid, then golden-section
/// search for the maximum between its neighbours down to a width of `s_tol`.
pub fn refine_fold_on(
    n: Dimension,
    f: &Nonlinearity,
    s_max: f64,
    steps: usize,
    mesh: &RadialMesh,
    s_tol: f64,
) -> Result<(f64, f64)> {
    let grid = center_value_grid(capped_center_value(f, s_max), steps);
    let branch = continue_branch_on(n, f, s_max, steps, mesh)?;
    let k = branch.turning_index;
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    // Failed shots count as −∞ so the search moves away from them.
    let neg_lambda = |s: f64| shoot(n, f, s, mesh).map_or(f64::INFINITY, |(l, _)| -l);
    let s_star = crate::stats::golden_section_min(lo, hi, s_tol, neg_lambda);
    let (lambda, _) = shoot(n, f, s_star, mesh)?;
    Ok((s_star, lambda.max(branch.lambda_star_estimate)))
}

/// u = −2 ln r on a geometric mesh over `[10⁻⁶, 1]` with 2000 nodes.
pub fn singular_solution(n: Dimension) -> Result<RadialField> {
    singular_solution_on(n, &RadialMesh::unit_geometric(2000)?)
}

pub fn singular_solution_on(n: Dimension, mesh: &RadialMesh) -> Result<RadialField> {
    n.require_at_least(3)?;
    RadialField::from_fn(mesh.clone(), n, |r| -2.0 * r.ln())
}

/// Nonlinearity 2(n−2)e^u for which −2 ln r is an exact solution with λ = 1.
#[must_use]
pub fn singular_nonlinearity(n: Dimension) -> Nonlinearity {
    Nonlinearity::scaled_exp(2.0 * (n.get() as f64 - 2.0))
}

/// Pointwise residual −Δu − λf(u) at every node (five-point Laplacian).
pub fn pointwise_residual(field: &RadialField, f: &Nonlinearity, lambda: f64) -> Result<Vec<f64>> {
    let lap = field.laplacian_high_order()?;
    Ok(lap.values().iter().zip(field.values()).map(|(l, &u)| -l - lambda * f.f(u)).collect())
}

/// Relative L² residual ‖−Δu − λf(u)‖ / ‖λf(u)‖ on `[a, b]` (dimensional measure).
pub fn relative_residual(field: &RadialField, f: &Nonlinearity, lambda: f64, a: f64, b: f64) -> Result<f64> {
    let res = pointwise_residual(field, f, lambda)?;
    let n = field.n();
    let num: Vec<f64> = res.iter().map(|v| v * v).collect();
    let den: Vec<f64> = field.values().iter().map(|&u| (lambda * f.f(u)).powi(2)).collect();
    let dom = DomainSpec::annulus(a, b);
    let nodes = field.nodes();
    Ok((radial_integral(nodes, &num, n, 0.0, dom)? / radial_integral(nodes, &den, n, 0.0, dom)?).sqrt())
}

/// Both sides of ∫|∇u|² = λ∫f(u)u over the unit ball.
pub fn energy_identity(field: &RadialField, f: &Nonlinearity, lambda: f64) -> Result<(f64, f64)> {
    let du = field.differentiate(1)?;
    let grad2: Vec<f64> = du.values().iter().map(|v| v * v).collect();
    let fu: Vec<f64> = field.values().iter().map(|&u| lambda * f.f(u) * u).collect();
    let dom = DomainSpec::ball(field.mesh().outer());
    let n = field.n();
    Ok((
        radial_integral(field.nodes(), &grad2, n, 0.0, dom)?,
        radial_integral(field.nodes(), &fu, n, 0.0, dom)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn zero_center_value_needs_zero_lambda() {
        let mesh = RadialMesh::unit_uniform(200).unwrap();
        let (l, u) = shoot(dim(3), &Nonlinearity::exp(), 0.0, &mesh).unwrap();
        assert_eq!(l, 0.0);
        assert!(u.values().iter().all(|&v| v == 0.0));
        let (l_small, _) = shoot(dim(3), &Nonlinearity::exp(), 1e-4, &mesh).unwrap();
        assert!(l_small > 0.0 && l_small < 1e-3);
    }

    #[test]
    fn two_dimensional_gelfand_matches_liouville_closed_form() {
        // u = ln(8μ / (λ(1+μr²)²)) with λ = 8μ/(1+μ)² and s = 2 ln(1+μ).
        let mu: f64 = 0.5;
        let lambda_exact = 8.0 * mu / (1.0 + mu).powi(2);
        let s = 2.0 * (1.0 + mu).ln();
        let mesh = RadialMesh::unit_uniform(2048).unwrap();
        let (l, u) = shoot(dim(2), &Nonlinearity::exp(), s, &mesh).unwrap();
        assert!((l - lambda_exact).abs() < 1e-7, "{l} vs {lambda_exact}");
        let r = 0.5;
        let exact = (8.0 * mu / (lambda_exact * (1.0 + mu * r * r).powi(2))).ln();
        assert!((u.interpolate(r) - exact).abs() < 1e-7);
    }

    #[test]
    fn planar_fold_is_two() {
        // λ(μ) = 8μ/(1+μ)² peaks at μ = 1, s = 2 ln 2.
        let mesh = RadialMesh::unit_uniform(1024).unwrap();
        let (s, l) = refine_fold_on(dim(2), &Nonlinearity::exp(), 12.0, 40, &mesh, 1e-4).unwrap();
        assert!((l - 2.0).abs() < 1e-6, "{l}");
        assert!((s - 2.0 * 2f64.ln()).abs() < 1e-2, "{s}");
    }

    #[test]
    fn singular_solution_rejects_low_dimension() {
        assert!(matches!(singular_solution(dim(2)), Err(Error::DimensionTooLow { .. })));
        let u = singular_solution(dim(3)).unwrap();
        assert_eq!(u.values()[u.values().len() - 1], 0.0);
    }

    #[test]
    fn short_continuation_is_rejected() {
        assert!(continue_branch(dim(3), &Nonlinearity::exp(), 12.0, 7).is_err());
    }

    #[test]
    fn no_bracket_for_vanishing_nonlinearity() {
        let f = Nonlinearity::scaled_exp(1e-12);
        let mesh = RadialMesh::unit_uniform(64).unwrap();
        assert!(matches!(shoot(dim(3), &f, 1.0, &mesh), Err(Error::NoBracket { .. })));
    }
}
