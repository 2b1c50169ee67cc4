//! The unbounded two-variable profile ln(−ln r′) placed in ℝⁿ.
//!
//! With w = −1/ln r′ one has r′ ũ′² dr′ = dw, so every integral of ũ′² against a bounded
//! weight over a planar disc becomes a bounded integral in w on [0, −1/ln ρ].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fd_weights, RadialField, MIN_DIFF_NODES};
use crate::mesh::{Dimension, RadialMesh};
use crate::nonlinearity::Nonlinearity;
use crate::special::{ball_volume, composite_gauss};

/// Radii at which the weighted estimate is evaluated.
pub const RHO_GRID: [f64; 6] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
/// Radii at which the growth of sup u is recorded.
pub const GROWTH_RADII: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Residual nodes stay this far from 0 and from 1/e.
pub const RESIDUAL_MARGIN: f64 = 1e-3;

/// ln(−ln r′).
#[must_use]
pub fn profile(r: f64) -> f64 {
    (-r.ln()).ln()
}

/// Default planar mesh: geometric on [5·10⁻⁴, 1/2], 1200 nodes. The overhang past 1/e keeps
/// centred stencils at the outer residual nodes; more nodes lose digits to rounding.
pub fn default_mesh() -> Result<RadialMesh> {
    RadialMesh::geometric(5e-4, 0.5, 1200)
}

/// Planar Laplacian as e^{−2t} u_tt with t = ln r, five-point stencils in t.
///
/// In r the two terms u_rr and u_r/r of this profile cancel to a factor ln r, which costs
/// digits near the origin; in t there is a single term.
fn planar_laplacian_in_log_radius(field: &RadialField) -> Vec<f64> {
    let t: Vec<f64> = field.nodes().iter().map(|r| r.ln()).collect();
    let n = t.len();
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(2).min(n - 5);
            let u_tt: f64 = fd_weights(t[i], &t[start..start + 5], 2)
                .iter()
                .zip(&field.values()[start..start + 5])
                .map(|(w, v)| w * v)
                .sum();
            (-2.0 * t[i]).exp() * u_tt
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedScale {
    pub rho: f64,
    /// ∫_{B_ρ} r^{2−n} u_r² dx.
    pub lhs: f64,
    /// ρ^{2−n} ∫_{B_{3ρ/2}∖B_ρ} |∇u|² dx.
    pub rhs_core: f64,
    pub constant: f64,
    /// ∫_{B²_ρ} |∇ũ|² dx′.
    pub planar_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub rho: f64,
    /// Largest nodal value on ρ/2 ≤ r′ ≤ ρ; a lower bound for sup u over B_ρ, which is infinite.
    pub sup_u: f64,
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixEReport {
    pub n: usize,
    pub max_relative_residual: f64,
    pub residual_nodes: usize,
    pub scales: Vec<WeightedScale>,
    /// max over ρ of the empirical constant.
    pub uniform_constant: f64,
    /// |B^{n−2}_1|: LHS ≤ this · ∫_{B²_ρ}|∇ũ|².
    pub upper_reduction_constant: f64,
    /// RHS ≥ this · ∫_{B²_ρ}|∇ũ|².
    pub lower_reduction_constant: f64,
    /// Both reduction bounds hold at every ρ.
    pub reductions_hold: bool,
    pub growth: Vec<GrowthSample>,
    /// sup u strictly increases as ρ decreases and dominates ln(−ln ρ).
    pub unbounded: bool,
    pub pass: bool,
}

/// ∫_a^b g by Gauss panels halving toward b (integrable kinks at the right end).
fn integrate_toward_right(a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut breaks: Vec<f64> = (0..=40).map(|j| b - (b - a) * 0.5f64.powi(j)).collect();
    breaks.push(b);
    breaks.dedup();
    let (x, w) = composite_gauss(&breaks, 16);
    x.iter().zip(&w).map(|(&t, &wt)| wt * g(t)).sum()
}

/// r′ as a function of w = −1/ln r′.
fn radius_of(w: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else {
        (-1.0 / w).exp()
    }
}

fn w_of(r: f64) -> f64 {
    -1.0 / r.ln()
}

fn half_power(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(k)
    }
}

/// ∫_{B_ρ} r^{2−n} u_r² dx = |B^{n−2}| 2π ∫ (1 − (r′/ρ)²)^{(n−2)/2} dw.
#[must_use]
pub fn weighted_lhs(n: usize, rho: f64) -> f64 {
    let k = (n as f64 - 2.0) / 2.0;
    let core = integrate_toward_right(0.0, w_of(rho), |w| half_power(1.0 - (radius_of(w) / rho).powi(2), k));
    ball_volume(n - 2) * 2.0 * std::f64::consts::PI * core
}

/// ρ^{2−n}∫_{B_{3ρ/2}∖B_ρ}|∇u|² = ρ^{2−n}|B^{n−2}| 2π ∫ [(R² − r′²)₊^{(n−2)/2} − (ρ² − r′²)₊^{(n−2)/2}] dw.
#[must_use]
pub fn weighted_rhs(n: usize, rho: f64) -> f64 {
    let k = (n as f64 - 2.0) / 2.0;
    let big = 1.5 * rho;
    let g = |w: f64| {
        let r2 = radius_of(w).powi(2);
        half_power(big * big - r2, k) - half_power(rho * rho - r2, k)
    };
    let core = integrate_toward_right(0.0, w_of(rho), g) + integrate_toward_right(w_of(rho), w_of(big), g);
    rho.powf(2.0 - n as f64) * ball_volume(n - 2) * 2.0 * std::f64::consts::PI * core
}

/// |B^{n−2}| · min over a ∈ [0, 1] of (9/4 − a²)^{(n−2)/2} − (1 − a²)^{(n−2)/2}.
#[must_use]
pub fn lower_reduction_constant(n: usize) -> f64 {
    let k = (n as f64 - 2.0) / 2.0;
    let m = (0..=10_000)
        .map(|j| {
            let a = j as f64 / 10_000.0;
            (2.25 - a * a).powf(k) - half_power(1.0 - a * a, k)
        })
        .fold(f64::INFINITY, f64::min);
    ball_volume(n - 2) * m
}

/// Residual, weighted-estimate and growth checks for ln(−ln r′) in dimension n ≥ 3.
pub fn appendix_e_counterexample(n: Dimension, mesh: &RadialMesh) -> Result<AppendixEReport> {
    let n = n.require_at_least(3)?.get();
    if mesh.len() < MIN_DIFF_NODES {
        return Err(Error::MeshTooCoarse { nodes: mesh.len(), required: MIN_DIFF_NODES });
    }
    let field = RadialField::from_fn(mesh.clone(), Dimension::new(2)?, profile)?;
    let lap = planar_laplacian_in_log_radius(&field);
    let f = Nonlinearity::double_exp();
    let edge = (-1.0f64).exp() - RESIDUAL_MARGIN;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for ((&r, &u), &l) in field.nodes().iter().zip(field.values()).zip(&lap) {
        if r >= RESIDUAL_MARGIN && r <= edge {
            let rhs = f.f(u);
            worst = worst.max((-l - rhs).abs() / rhs);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::MeshTooCoarse { nodes: mesh.len(), required: 5 });
    }
    if worst > RESIDUAL_TOLERANCE {
        return Err(Error::ResidualTooLarge { residual: worst, tolerance: RESIDUAL_TOLERANCE });
    }

    let upper = ball_volume(n - 2);
    let lower = lower_reduction_constant(n);
    let mut reductions_hold = true;
    let scales: Vec<WeightedScale> = RHO_GRID
        .iter()
        .map(|&rho| {
            let lhs = weighted_lhs(n, rho);
            let rhs = weighted_rhs(n, rho);
            let planar = 2.0 * std::f64::consts::PI * w_of(rho);
            reductions_hold &= lhs <= upper * planar * (1.0 + 1e-12) && rhs >= lower * planar * (1.0 - 1e-12);
            WeightedScale { rho, lhs, rhs_core: rhs, constant: lhs / rhs, planar_energy: planar }
        })
        .collect();
    let uniform = scales.iter().map(|s| s.constant).fold(0.0, f64::max);

    let growth: Vec<GrowthSample> = GROWTH_RADII
        .iter()
        .map(|&rho| {
            let sup_u = field
                .nodes()
                .iter()
                .zip(field.values())
                .filter(|(&r, _)| r >= 0.5 * rho * (1.0 - 1e-12) && r <= rho * (1.0 + 1e-12))
                .map(|(_, &u)| u)
                .fold(f64::NEG_INFINITY, f64::max);
            GrowthSample { rho, sup_u, closed_form: profile(rho) }
        })
        .collect();
    let unbounded = growth.iter().all(|g| g.sup_u >= g.closed_form * (1.0 - 1e-12))
        && growth.windows(2).all(|p| p[1].sup_u > p[0].sup_u);
    let pass = reductions_hold && unbounded && uniform.is_finite() && uniform <= upper / lower;
    Ok(AppendixEReport {
        n,
        max_relative_residual: worst,
        residual_nodes: count,
        scales,
        uniform_constant: uniform,
        upper_reduction_constant: upper,
        lower_reduction_constant: lower,
        reductions_hold,
        growth,
        unbounded,
        pass,
    })
}
