//! Interior estimates evaluated on radial fields, with empirical constants.
//!
//! For radial u the Hessian has eigenvalue u_rr along x/|x| and u_r/r (multiplicity n − 1)
//! on the tangent space, so every Hessian-based quantity below is exact given u_r and u_rr.

pub mod appendix_e;
pub mod holder;
pub mod suite;
pub mod hole_filling;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::nonlinearity::Nonlinearity;
use crate::params;
use crate::quadrature::{radial_integral, radial_node_weights, DomainSpec};
use crate::report::{EstimateReport, MeshMeta};
use crate::special::sphere_measure;
use crate::stability::{first_eigenvalue, STABILITY_TOLERANCE};
use crate::stats::weighted_median;
use crate::testfn::TestFunctionSpec;

pub use holder::{morrey_application, HolderBound};
pub use hole_filling::{hole_filling, hole_filling_with, HoleFillingResult, DEFAULT_HOLE_SCALES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InteriorEstimate {
    #[serde(rename = "weighted_by_gradient")]
    WeightedByGradient,
    #[serde(rename = "stability_identity_2_2")]
    StabilityIdentity,
    #[serde(rename = "sz_stability")]
    SzStability,
    #[serde(rename = "hessian_L1")]
    HessianL1,
    #[serde(rename = "hessian_weighted_L1")]
    HessianWeightedL1,
    #[serde(rename = "hess_by_lapl")]
    HessByLapl,
    #[serde(rename = "w12_by_L1")]
    W12ByL1,
    #[serde(rename = "levelset")]
    Levelset,
    #[serde(rename = "w12gamma")]
    W12Gamma,
    #[serde(rename = "L1_by_radial_annulus")]
    L1ByRadialAnnulus,
    #[serde(rename = "L1_by_radial_ball")]
    L1ByRadialBall,
    #[serde(rename = "calpha")]
    Calpha,
    #[serde(rename = "f_bounded_below_variant")]
    FBoundedBelow,
}

use InteriorEstimate as Id;

/// Hypotheses an estimate places on its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Requirements {
    pub stable: bool,
    pub nonnegative_f: bool,
    pub superharmonic: bool,
    pub min_dim: usize,
    pub max_dim: usize,
}

impl InteriorEstimate {
    pub const ALL: [InteriorEstimate; 13] = [
        Id::WeightedByGradient,
        Id::StabilityIdentity,
        Id::SzStability,
        Id::HessianL1,
        Id::HessianWeightedL1,
        Id::HessByLapl,
        Id::W12ByL1,
        Id::Levelset,
        Id::W12Gamma,
        Id::L1ByRadialAnnulus,
        Id::L1ByRadialBall,
        Id::Calpha,
        Id::FBoundedBelow,
    ];

    #[must_use]
    pub fn id(self) -> &'static str {
        match self {
            Id::WeightedByGradient => "weighted_by_gradient",
            Id::StabilityIdentity => "stability_identity_2_2",
            Id::SzStability => "sz_stability",
            Id::HessianL1 => "hessian_L1",
            Id::HessianWeightedL1 => "hessian_weighted_L1",
            Id::HessByLapl => "hess_by_lapl",
            Id::W12ByL1 => "w12_by_L1",
            Id::Levelset => "levelset",
            Id::W12Gamma => "w12gamma",
            Id::L1ByRadialAnnulus => "L1_by_radial_annulus",
            Id::L1ByRadialBall => "L1_by_radial_ball",
            Id::Calpha => "calpha",
            Id::FBoundedBelow => "f_bounded_below_variant",
        }
    }

    /// Declared budget for the empirical constant.
    #[must_use]
    pub fn budget(self) -> f64 {
        match self {
            Id::StabilityIdentity | Id::SzStability => 1.0,
            Id::HessByLapl => 10.0,
            Id::W12ByL1 => 50.0,
            Id::WeightedByGradient => 20.0,
            Id::HessianL1 => 20.0,
            Id::HessianWeightedL1 => 20.0,
            Id::Levelset => 20.0,
            Id::W12Gamma => 50.0,
            Id::L1ByRadialAnnulus | Id::L1ByRadialBall => 20.0,
            Id::Calpha => 100.0,
            Id::FBoundedBelow => 100.0,
        }
    }

    #[must_use]
    pub fn requirements(self) -> Requirements {
        let base = Requirements { stable: true, nonnegative_f: true, superharmonic: false, min_dim: 2, max_dim: usize::MAX };
        match self {
            Id::WeightedByGradient => Requirements { nonnegative_f: false, min_dim: 3, max_dim: 9, ..base },
            Id::StabilityIdentity | Id::SzStability => Requirements { nonnegative_f: false, ..base },
            Id::L1ByRadialAnnulus | Id::L1ByRadialBall => {
                Requirements { stable: false, nonnegative_f: false, superharmonic: true, ..base }
            }
            Id::Calpha => Requirements { max_dim: 9, ..base },
            Id::FBoundedBelow => Requirements { nonnegative_f: false, max_dim: 9, ..base },
            _ => base,
        }
    }
}

impl fmt::Display for InteriorEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for InteriorEstimate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown interior estimate '{s}'")))
    }
}

/// Optional knobs; unset fields take the per-estimate defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InteriorParams {
    /// Scale for `weighted_by_gradient` (default 1/2).
    pub rho: Option<f64>,
    /// ζ for `stability_identity_2_2`, η for `sz_stability` (default plain cutoff 1/2 → 1).
    pub test_function: Option<TestFunctionSpec>,
    /// K for `f_bounded_below_variant` (default 1).
    pub shift_k: Option<f64>,
    /// `w12_by_L1` or `calpha` for `f_bounded_below_variant` (default `w12_by_L1`).
    pub variant: Option<InteriorEstimate>,
    /// Hölder exponent for `calpha`; hole filling decides when unset.
    pub alpha: Option<f64>,
    pub budget: Option<f64>,
}

/// A field with the equation it solves, when known.
#[derive(Debug, Clone, Copy)]
pub struct InteriorInput<'a> {
    pub field: &'a RadialField,
    /// (f, λ) with −Δu = λ f(u); `None` skips the stability and flag gates.
    pub source: Option<(&'a Nonlinearity, f64)>,
    /// Precomputed first eigenvalue of the linearized operator.
    pub first_eigenvalue: Option<f64>,
}

impl<'a> InteriorInput<'a> {
    #[must_use]
    pub fn bare(field: &'a RadialField) -> Self {
        Self { field, source: None, first_eigenvalue: None }
    }

    #[must_use]
    pub fn solution(field: &'a RadialField, f: &'a Nonlinearity, lambda: f64) -> Self {
        Self { field, source: Some((f, lambda)), first_eigenvalue: None }
    }

    #[must_use]
    pub fn with_eigenvalue(mut self, mu: f64) -> Self {
        self.first_eigenvalue = Some(mu);
        self
    }
}

/// u, u_r, u_rr on the field's nodes.
struct Radial {
    n: usize,
    r: Vec<f64>,
    u: Vec<f64>,
    ur: Vec<f64>,
    urr: Vec<f64>,
}

impl Radial {
    fn new(field: &RadialField) -> Result<Self> {
        let r = field.nodes().to_vec();
        let mut ur = field.differentiate(1)?.values().to_vec();
        let mut urr = field.differentiate(2)?.values().to_vec();
        // Stencil output below the rounding level of the data is zero.
        let noise = 16.0 * f64::EPSILON * field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..r.len() {
            let h = match i {
                0 => r[1] - r[0],
                _ if i + 1 == r.len() => r[i] - r[i - 1],
                _ => (r[i] - r[i - 1]).min(r[i + 1] - r[i]),
            };
            if ur[i].abs() <= noise / h {
                ur[i] = 0.0;
            }
            if urr[i].abs() <= noise / (h * h) {
                urr[i] = 0.0;
            }
        }
        Ok(Self { n: field.n(), r, u: field.values().to_vec(), ur, urr })
    }

    fn tangential(&self, i: usize) -> f64 {
        self.ur[i] / self.r[i]
    }

    fn hessian_norm(&self, i: usize) -> f64 {
        let t = self.tangential(i);
        (self.urr[i].powi(2) + (self.n - 1) as f64 * t * t).sqrt()
    }

    fn laplacian(&self, i: usize) -> f64 {
        self.urr[i] + (self.n - 1) as f64 * self.tangential(i)
    }

    fn curvature(&self, i: usize) -> f64 {
        ((self.n - 1) as f64).sqrt() * self.tangential(i).abs()
    }

    fn integral(&self, g: impl Fn(usize) -> f64, weight: f64, domain: DomainSpec) -> Result<f64> {
        let vals: Vec<f64> = (0..self.r.len()).map(g).collect();
        radial_integral(&self.r, &vals, self.n, weight, domain)
    }

    fn grad_sq(&self, domain: DomainSpec) -> Result<f64> {
        self.integral(|i| self.ur[i] * self.ur[i], 0.0, domain)
    }

    fn l1(&self, domain: DomainSpec) -> Result<f64> {
        self.integral(|i| self.u[i].abs(), 0.0, domain)
    }

    fn sup_abs_within(&self, outer: f64) -> f64 {
        self.r.iter().zip(&self.u).filter(|(&r, _)| r <= outer).map(|(_, u)| u.abs()).fold(0.0, f64::max)
    }
}

/// ∫_{B_ρ} r^{2−n} u_r² dx.
pub fn weighted_radial_energy(field: &RadialField, rho: f64) -> Result<f64> {
    let mesh = field.mesh();
    if rho > mesh.outer() * (1.0 + 1e-12) {
        return Err(Error::DomainOutsideMesh { lo: 0.0, hi: rho, mesh_lo: mesh.inner(), mesh_hi: mesh.outer() });
    }
    let d = Radial::new(field)?;
    d.integral(|i| d.ur[i] * d.ur[i], 2.0 - d.n as f64, DomainSpec::ball(rho))
}

/// Per-node curvature quantity 𝒜 ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureQuantity {
    pub values: Vec<f64>,
}

impl CurvatureQuantity {
    /// 𝒜 = √(n−1)|u_r/r| from the radial formula.
    pub fn radial(field: &RadialField) -> Result<Self> {
        let d = Radial::new(field)?;
        Ok(Self { values: (0..d.r.len()).map(|i| d.curvature(i)).collect() })
    }

    /// 𝒜 from the Cartesian Hessian u_rr e⊗e + (u_r/r)(I − e⊗e) along e = (1, …, 1)/√n.
    pub fn from_hessian(field: &RadialField) -> Result<Self> {
        let d = Radial::new(field)?;
        let n = d.n;
        let e = 1.0 / (n as f64).sqrt();
        let values = (0..d.r.len())
            .map(|i| {
                let (a, b) = (d.urr[i], d.tangential(i));
                let hess: Vec<Vec<f64>> = (0..n)
                    .map(|p| (0..n).map(|q| (a - b) * e * e + if p == q { b } else { 0.0 }).collect())
                    .collect();
                let grad = vec![d.ur[i] * e; n];
                sz_quantity(&hess, &grad)
            })
            .collect();
        Ok(Self { values })
    }
}

/// (Σ u_ij² − Σ_i (Σ_j u_ij u_j/|∇u|)²)^{1/2}, and 0 where ∇u = 0.
#[must_use]
pub fn sz_quantity(hessian: &[Vec<f64>], grad: &[f64]) -> f64 {
    let g = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    if g == 0.0 {
        return 0.0;
    }
    let full: f64 = hessian.iter().flatten().map(|v| v * v).sum();
    let normal: f64 =
        hessian.iter().map(|row| row.iter().zip(grad).map(|(h, gj)| h * gj / g).sum::<f64>().powi(2)).sum();
    (full - normal).max(0.0).sqrt()
}

/// max over node pairs r_i < r_j ≤ `outer` of |u_j − u_i| / (r_j − r_i)^α.
#[must_use]
pub fn holder_seminorm(nodes: &[f64], values: &[f64], outer: f64, alpha: f64) -> f64 {
    let m = nodes.partition_point(|&r| r <= outer * (1.0 + 1e-12));
    let mut best: f64 = 0.0;
    for j in 1..m {
        for i in 0..j {
            let q = (values[j] - values[i]).abs() / (nodes[j] - nodes[i]).powf(alpha);
            best = best.max(q);
        }
    }
    best
}

/// Integrability gain γ = 1 − 3θ with θ = q/(p + q), q = min(3/2, (1 + p/2)/2), p = 2n/(n − 2).
///
/// q stays strictly between 1 and p/2 so θ < 1/3; n = 2 uses p = 6 (the n = 3 exponent).
#[must_use]
pub fn gamma_exponent(n: usize) -> f64 {
    let p = if n <= 2 { 6.0 } else { 2.0 * n as f64 / (n as f64 - 2.0) };
    let q = (1.5f64).min((1.0 + p / 2.0) / 2.0);
    let theta = q / (p + q);
    1.0 - 3.0 * theta
}

/// Checks the hypotheses of `id` on `input`.
fn gate(id: Id, input: &InteriorInput<'_>) -> Result<()> {
    let req = id.requirements();
    let n = input.field.n();
    if n < req.min_dim || n > req.max_dim {
        return Err(Error::DimensionOutOfRange { n, min: req.min_dim, max: req.max_dim });
    }
    let Some((f, lambda)) = input.source else {
        return Ok(());
    };
    if req.nonnegative_f && !f.flags.nonnegative {
        return Err(Error::HypothesisViolated(format!("{} requires f ≥ 0; {} does not carry the flag", id, f.label())));
    }
    if req.stable {
        let mu = match input.first_eigenvalue {
            Some(mu) => mu,
            None => first_eigenvalue(input.field, f, lambda)?.first_eigenvalue,
        };
        if mu < -STABILITY_TOLERANCE {
            return Err(Error::UnstableInput { eigenvalue: mu, tolerance: STABILITY_TOLERANCE });
        }
    }
    Ok(())
}

/// −Δu ≥ −tol at interior nodes r ≤ `outer`, tol relative to the largest |Δu|.
fn require_superharmonic(d: &Radial, shift: f64, outer: f64) -> Result<()> {
    let m = d.r.len();
    let lap: Vec<f64> = (0..m).map(|i| d.laplacian(i) - shift).collect();
    let scale = lap.iter().map(|v| v.abs()).fold(1.0, f64::max);
    for i in 1..m - 1 {
        if d.r[i] <= outer && lap[i] > 1e-4 * scale {
            return Err(Error::NotSuperharmonic { point: vec![d.r[i]], value: -lap[i] });
        }
    }
    Ok(())
}

/// Evaluates both sides of `id` on `input` and records the empirical constant.
pub fn check_interior_estimate(id: InteriorEstimate, input: &InteriorInput<'_>, params: &InteriorParams) -> Result<EstimateReport> {
    gate(id, input)?;
    let d = Radial::new(input.field)?;
    let budget = params.budget.unwrap_or_else(|| id.budget());
    let mesh = MeshMeta::radial(input.field);
    let (lhs, rhs, p) = evaluate(id, &d, input, params)?;
    Ok(EstimateReport::new(id.id(), lhs, rhs, budget, p, mesh))
}

type Sides = (f64, f64, std::collections::BTreeMap<String, serde_json::Value>);

fn evaluate(id: Id, d: &Radial, input: &InteriorInput<'_>, params: &InteriorParams) -> Result<Sides> {
    let n = d.n;
    let nf = n as f64;
    let unit = DomainSpec::ball(1.0);
    match id {
        Id::WeightedByGradient => {
            let rho = params.rho.unwrap_or(0.5);
            if !(rho > 0.0 && rho < 2.0 / 3.0) {
                return Err(Error::InvalidArgument(format!("weighted_by_gradient needs 0 < ρ < 2/3, got {rho}")));
            }
            let lhs = d.integral(|i| d.ur[i] * d.ur[i], 2.0 - nf, DomainSpec::ball(rho))?;
            let rhs = rho.powf(2.0 - nf) * d.grad_sq(DomainSpec::annulus(rho, 1.5 * rho))?;
            Ok((lhs, rhs, params! { "rho" => rho }))
        }
        Id::StabilityIdentity => {
            let spec = params.test_function.unwrap_or_default();
            let z = spec.zeta();
            let dom = DomainSpec::ball(z.support);
            let coef = (nf - 2.0) * (10.0 - nf) / 4.0;
            let lhs = coef * d.integral(|i| d.ur[i].powi(2) * z.value(d.r[i]).powi(2), 2.0 - nf, dom)?;
            let cross = d.integral(|i| d.ur[i].powi(2) * z.value(d.r[i]) * z.derivative(d.r[i]), 3.0 - nf, dom)?;
            let grad = d.integral(|i| d.ur[i].powi(2) * z.derivative(d.r[i]).powi(2), 4.0 - nf, dom)?;
            Ok((lhs, (4.0 - nf) * cross + grad, params! { "test_function" => spec }))
        }
        Id::SzStability => {
            let spec = params.test_function.unwrap_or_default();
            let dom = DomainSpec::ball(spec.zeta().support);
            let lhs = d.integral(|i| d.curvature(i).powi(2) * spec.value(d.r[i]).powi(2), 0.0, dom)?;
            let rhs = d.integral(|i| d.ur[i].powi(2) * spec.derivative(d.r[i]).powi(2), 0.0, dom)?;
            Ok((lhs, rhs, params! { "test_function" => spec }))
        }
        Id::HessianL1 => {
            let lhs = d.integral(|i| d.hessian_norm(i), 0.0, DomainSpec::ball(0.75))?;
            Ok((lhs, d.grad_sq(unit)?.sqrt(), params! {}))
        }
        Id::HessianWeightedL1 => {
            let lhs = d.integral(|i| d.ur[i].abs() * d.hessian_norm(i), 0.0, DomainSpec::ball(0.75))?;
            Ok((lhs, d.grad_sq(unit)?, params! {}))
        }
        Id::HessByLapl => {
            let mut worst = (0.0, 0.0, 0.0, 0.0);
            for i in 0..d.r.len() {
                let excess = (d.hessian_norm(i) - d.laplacian(i).abs()).max(0.0);
                let a = d.curvature(i);
                let c = crate::report::ratio(excess, a);
                if c > worst.0 {
                    worst = (c, excess, a, d.r[i]);
                }
            }
            Ok((worst.1, worst.2, params! { "worst_radius" => worst.3 }))
        }
        Id::W12ByL1 => Ok((d.grad_sq(DomainSpec::ball(0.5))?.sqrt(), d.l1(unit)?, params! {})),
        Id::Levelset => {
            let s = sphere_measure(n);
            let (mut best, mut rt) = (0.0, 0.0);
            for i in 0..d.r.len() {
                if d.r[i] > 0.5 {
                    break;
                }
                let v = s * d.r[i].powi(n as i32 - 1) * d.ur[i].powi(2);
                if v > best {
                    best = v;
                    rt = d.r[i];
                }
            }
            Ok((best, d.grad_sq(unit)?, params! { "level_radius" => rt }))
        }
        Id::W12Gamma => {
            let gamma = gamma_exponent(n);
            let e = 2.0 + gamma;
            let lhs = d.integral(|i| d.ur[i].abs().powf(e), 0.0, DomainSpec::ball(0.5))?.powf(1.0 / e);
            Ok((lhs, d.l1(unit)?, params! { "gamma" => gamma }))
        }
        Id::L1ByRadialAnnulus | Id::L1ByRadialBall => {
            require_superharmonic(d, 0.0, 1.0)?;
            let t = weighted_median(&d.u, &radial_node_weights(&d.r, n, 0.5, 1.0));
            let dom = if id == Id::L1ByRadialAnnulus { DomainSpec::annulus(0.5, 1.0) } else { unit };
            let (lo, hi) = if id == Id::L1ByRadialAnnulus { (0.5, 1.0) } else { (0.0, 1.0) };
            let t_opt = weighted_median(&d.u, &radial_node_weights(&d.r, n, lo, hi));
            let lhs = d.integral(|i| (d.u[i] - t).abs(), 0.0, dom)?;
            let lhs_opt = d.integral(|i| (d.u[i] - t_opt).abs(), 0.0, dom)?;
            let rhs = d.integral(|i| d.ur[i].abs(), 0.0, dom)?;
            Ok((lhs, rhs, params! { "t" => t, "t_l1_optimal" => t_opt, "lhs_at_l1_optimal" => lhs_opt }))
        }
        Id::Calpha => {
            let alpha = match params.alpha {
                Some(a) => a,
                None => hole_filling(input.field, &DEFAULT_HOLE_SCALES)?.alpha,
            };
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidArgument(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
            }
            let semi = holder_seminorm(&d.r, &d.u, 0.5, alpha);
            let sup = d.sup_abs_within(0.5);
            Ok((sup + semi, d.l1(unit)?, params! { "alpha" => alpha, "seminorm" => semi, "sup" => sup }))
        }
        Id::FBoundedBelow => {
            let k = params.shift_k.unwrap_or(1.0);
            let variant = params.variant.unwrap_or(Id::W12ByL1);
            if !matches!(variant, Id::W12ByL1 | Id::Calpha) {
                return Err(Error::NotApplicable {
                    id: id.id().into(),
                    reason: format!("variant must be w12_by_L1 or calpha, got {variant}"),
                });
            }
            if !(k >= 0.0) {
                return Err(Error::InvalidArgument(format!("K must be nonnegative, got {k}")));
            }
            if let Some((f, lambda)) = input.source {
                let bound = if f.flags.nonnegative { 0.0 } else { lambda * f.flags.lower_bound_k };
                if bound > k * (1.0 + 1e-12) {
                    return Err(Error::HypothesisViolated(format!("λf ≥ −{bound} is not covered by K = {k}")));
                }
            }
            // v = u − K r²/(2n) has Δv = Δu + K.
            require_superharmonic(d, k, 1.0)?;
            let (lhs, rhs, mut p) = evaluate(variant, d, input, params)?;
            p.insert("K".into(), k.into());
            p.insert("variant".into(), variant.id().into());
            Ok((lhs, rhs + k, p))
        }
    }
}

/// Runs every `(estimate, input)` pair in parallel; output order follows the input order.
pub fn check_many(
    jobs: &[(InteriorEstimate, InteriorInput<'_>)],
    params: &InteriorParams,
) -> Vec<Result<EstimateReport>> {
    jobs.par_iter().map(|(id, input)| check_interior_estimate(*id, input, params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Dimension, RadialMesh};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn ids_round_trip_through_strings_and_serde() {
        for id in InteriorEstimate::ALL {
            assert_eq!(id.id().parse::<InteriorEstimate>().unwrap(), id);
            assert_eq!(serde_json::to_value(id).unwrap(), id.id());
        }
    }

    #[test]
    fn gamma_exponent_is_two_fifths_in_three_dimensions() {
        assert!((gamma_exponent(3) - 0.4).abs() < 1e-15);
        for n in 2..=20 {
            assert!(gamma_exponent(n) > 0.0);
        }
    }

    #[test]
    fn constant_field_has_zero_curvature_and_zero_sz_constant() {
        let f = RadialField::from_fn(RadialMesh::unit_uniform(257).unwrap(), dim(4), |_| 3.0).unwrap();
        let rep = check_interior_estimate(Id::SzStability, &InteriorInput::bare(&f), &InteriorParams::default()).unwrap();
        assert_eq!((rep.lhs, rep.rhs_core, rep.empirical_constant), (0.0, 0.0, 0.0));
        assert!(rep.pass);
        assert!(weighted_radial_energy(&f, 0.5).unwrap() == 0.0);
    }

    #[test]
    fn dimension_gate_is_typed() {
        let f = RadialField::from_fn(RadialMesh::unit_uniform(257).unwrap(), dim(10), |r| 1.0 - r * r).unwrap();
        let err = check_interior_estimate(Id::WeightedByGradient, &InteriorInput::bare(&f), &InteriorParams::default());
        assert!(matches!(err, Err(Error::DimensionOutOfRange { n: 10, min: 3, max: 9 })));
    }

    #[test]
    fn nonnegativity_flag_is_enforced() {
        let f = RadialField::from_fn(RadialMesh::unit_uniform(257).unwrap(), dim(3), |r| 1.0 - r * r).unwrap();
        let g = Nonlinearity::exp().shifted(2.0);
        let input = InteriorInput::solution(&f, &g, 1.0).with_eigenvalue(1.0);
        let err = check_interior_estimate(Id::W12ByL1, &input, &InteriorParams::default());
        assert!(matches!(err, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn seminorm_of_linear_profile() {
        let r: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        assert!((holder_seminorm(&r, &r, 0.5, 1.0) - 1.0).abs() < 1e-12);
        // |Δr|^{1/2} is largest across the widest pair for α = 1/2: 0.5/√0.5.
        assert!((holder_seminorm(&r, &r, 0.5, 0.5) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sz_quantity_removes_the_normal_direction() {
        let h = vec![vec![2.0, 0.0], vec![0.0, 3.0]];
        assert!((sz_quantity(&h, &[1.0, 0.0]) - 3.0).abs() < 1e-15);
        assert_eq!(sz_quantity(&h, &[0.0, 0.0]), 0.0);
    }
}
