//! Boundary estimates on planar half-disk fields, with empirical constants.
//!
//! Every quantity is integrated on the polar grid. Gradients are second order; Hessians use the
//! odd reflection across the flat part for their angular differences.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interior::{gamma_exponent, hole_filling_with, sz_quantity, DEFAULT_HOLE_SCALES};
use crate::nonlinearity::Nonlinearity;
use crate::params;
use crate::report::EstimateReport;
use crate::stability::STABILITY_TOLERANCE;

use super::grid::{Field2D, Gradient, Hessian};
use super::solver::first_eigenvalue_2d;

/// Every boundary field lives in the plane.
pub const BOUNDARY_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryEstimate {
    #[serde(rename = "bdry_not_weighted")]
    NotWeighted,
    #[serde(rename = "bdry_weighted")]
    Weighted,
    #[serde(rename = "pohozaev_flux")]
    PohozaevFlux,
    #[serde(rename = "bdry_sz")]
    Sz,
    #[serde(rename = "bdry_hessian")]
    Hessian,
    #[serde(rename = "bdry_hessian_weighted")]
    HessianWeighted,
    #[serde(rename = "bdry_w12")]
    W12,
    #[serde(rename = "bdry_w12gamma")]
    W12Gamma,
    #[serde(rename = "bdry_hess_by_L1")]
    HessByL1,
    #[serde(rename = "annulus_grad")]
    AnnulusGrad,
    #[serde(rename = "annulus_hess")]
    AnnulusHess,
    #[serde(rename = "bdry_L1_by_radial")]
    L1ByRadial,
    #[serde(rename = "bdry_L1_strengthened")]
    L1Strengthened,
    #[serde(rename = "bdry_calpha")]
    Calpha,
}

type Id = BoundaryEstimate;

/// Hypotheses each estimate needs from (f, u).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryRequirements {
    pub stable: bool,
    pub nonnegative: bool,
    pub nondecreasing: bool,
    pub convex: bool,
    pub min_dim: usize,
    pub max_dim: usize,
}

impl BoundaryEstimate {
    pub const ALL: [BoundaryEstimate; 14] = [
        Id::NotWeighted,
        Id::Weighted,
        Id::PohozaevFlux,
        Id::Sz,
        Id::Hessian,
        Id::HessianWeighted,
        Id::W12,
        Id::W12Gamma,
        Id::HessByL1,
        Id::AnnulusGrad,
        Id::AnnulusHess,
        Id::L1ByRadial,
        Id::L1Strengthened,
        Id::Calpha,
    ];

    #[must_use]
    pub fn id(self) -> &'static str {
        match self {
            Id::NotWeighted => "bdry_not_weighted",
            Id::Weighted => "bdry_weighted",
            Id::PohozaevFlux => "pohozaev_flux",
            Id::Sz => "bdry_sz",
            Id::Hessian => "bdry_hessian",
            Id::HessianWeighted => "bdry_hessian_weighted",
            Id::W12 => "bdry_w12",
            Id::W12Gamma => "bdry_w12gamma",
            Id::HessByL1 => "bdry_hess_by_L1",
            Id::AnnulusGrad => "annulus_grad",
            Id::AnnulusHess => "annulus_hess",
            Id::L1ByRadial => "bdry_L1_by_radial",
            Id::L1Strengthened => "bdry_L1_strengthened",
            Id::Calpha => "bdry_calpha",
        }
    }

    /// Declared budget for the empirical constant.
    #[must_use]
    pub fn budget(self) -> f64 {
        match self {
            Id::NotWeighted | Id::Weighted => 20.0,
            Id::PohozaevFlux => 10.0,
            Id::Sz => 20.0,
            Id::Hessian | Id::HessianWeighted => 20.0,
            Id::W12 | Id::W12Gamma => 50.0,
            Id::HessByL1 => 50.0,
            Id::AnnulusGrad | Id::AnnulusHess => 50.0,
            Id::L1ByRadial | Id::L1Strengthened => 20.0,
            Id::Calpha => 100.0,
        }
    }

    #[must_use]
    pub fn requirements(self) -> BoundaryRequirements {
        let base = BoundaryRequirements {
            stable: true,
            nonnegative: true,
            nondecreasing: true,
            convex: false,
            min_dim: 1,
            max_dim: usize::MAX,
        };
        match self {
            Id::NotWeighted => BoundaryRequirements { nonnegative: false, nondecreasing: false, min_dim: 3, ..base },
            Id::Weighted => BoundaryRequirements { nonnegative: false, nondecreasing: false, max_dim: 9, ..base },
            Id::L1ByRadial => BoundaryRequirements { convex: true, ..base },
            Id::L1Strengthened => BoundaryRequirements { convex: true, min_dim: 3, ..base },
            Id::Calpha => BoundaryRequirements { convex: true, max_dim: 9, ..base },
            _ => base,
        }
    }
}

impl fmt::Display for BoundaryEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BoundaryEstimate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown boundary estimate '{s}'")))
    }
}

/// Optional knobs; unset fields take the per-estimate defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    /// ρ for `bdry_weighted` (default 3/5).
    pub rho: Option<f64>,
    /// Annulus ratio λ > 1 for `bdry_weighted` (default 4/3).
    pub lambda_annulus: Option<f64>,
    /// ρ₁ < ρ₂ < ρ₃ < ρ₄ ≤ 1 for the half-annulus estimates (default 1/4, 1/2, 3/4, 1).
    pub radii: Option<[f64; 4]>,
    /// Hölder exponent for `bdry_calpha`; hole filling decides when unset.
    pub alpha: Option<f64>,
    pub budget: Option<f64>,
}

/// A half-disk field with the equation it solves, when known.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryInput<'a> {
    pub field: &'a Field2D,
    /// (f, λ) with −Δu = λ f(u); `None` skips the stability and flag gates.
    pub source: Option<(&'a Nonlinearity, f64)>,
    pub first_eigenvalue: Option<f64>,
}

impl<'a> BoundaryInput<'a> {
    #[must_use]
    pub fn bare(field: &'a Field2D) -> Self {
        Self { field, source: None, first_eigenvalue: None }
    }

    #[must_use]
    pub fn solution(field: &'a Field2D, f: &'a Nonlinearity, lambda: f64) -> Self {
        Self { field, source: Some((f, lambda)), first_eigenvalue: None }
    }

    #[must_use]
    pub fn with_eigenvalue(mut self, mu: f64) -> Self {
        self.first_eigenvalue = Some(mu);
        self
    }
}

fn gate(id: Id, input: &BoundaryInput<'_>) -> Result<()> {
    let req = id.requirements();
    if BOUNDARY_DIM < req.min_dim || BOUNDARY_DIM > req.max_dim {
        let range = if req.max_dim == usize::MAX {
            format!("n ≥ {}", req.min_dim)
        } else {
            format!("{} ≤ n ≤ {}", req.min_dim, req.max_dim)
        };
        return Err(Error::NotApplicable { id: id.id().into(), reason: format!("needs {range}; the boundary lab is planar") });
    }
    if req.nonnegative && input.field.min_value() < 0.0 {
        return Err(Error::HypothesisViolated(format!("{id} needs u ≥ 0; min u = {:e}", input.field.min_value())));
    }
    let Some((f, lambda)) = input.source else {
        return Ok(());
    };
    let flags = &f.flags;
    for (needed, present, name) in [
        (req.nonnegative, flags.nonnegative, "nonnegative"),
        (req.nondecreasing, flags.nondecreasing, "nondecreasing"),
        (req.convex, flags.convex, "convex"),
    ] {
        if needed && !present {
            return Err(Error::HypothesisViolated(format!("{id} requires f {name}; {} does not carry the flag", f.label())));
        }
    }
    if req.stable {
        let mu = match input.first_eigenvalue {
            Some(mu) => mu,
            None => first_eigenvalue_2d(input.field, f, lambda)?.first_eigenvalue,
        };
        if mu < -STABILITY_TOLERANCE {
            return Err(Error::UnstableInput { eigenvalue: mu, tolerance: STABILITY_TOLERANCE });
        }
    }
    Ok(())
}

/// Derivative arrays shared by all estimates.
struct Derived<'a> {
    field: &'a Field2D,
    grad: Gradient,
    hess: Hessian,
    grad_norm: Vec<f64>,
    hess_norm: Vec<f64>,
}

impl<'a> Derived<'a> {
    fn new(field: &'a Field2D) -> Self {
        let grad = field.gradient();
        let hess = field.hessian();
        let len = field.mesh().len();
        let grad_norm = (0..len).map(|k| grad.norm(k)).collect();
        let hess_norm = (0..len).map(|k| hess.norm(k)).collect();
        Self { field, grad, hess, grad_norm, hess_norm }
    }

    fn need(&self, hi: f64) -> Result<()> {
        let m = self.field.mesh();
        if hi > m.outer * (1.0 + 1e-12) {
            return Err(Error::DomainOutsideMesh { lo: 0.0, hi, mesh_lo: m.inner, mesh_hi: m.outer });
        }
        Ok(())
    }

    fn lp(&self, g: &[f64], p: f64, lo: f64, hi: f64) -> Result<f64> {
        self.need(hi)?;
        Ok(self.field.lp_norm(g, p, lo, hi))
    }

    fn grad_l2(&self, hi: f64) -> Result<f64> {
        self.lp(&self.grad_norm, 2.0, 0.0, hi)
    }

    fn u_l1(&self, lo: f64, hi: f64) -> Result<f64> {
        self.lp(self.field.values(), 1.0, lo, hi)
    }
}

/// ‖u‖_{C^α} over a fixed probe lattice of B⁺_{1/2}: sup |u| plus the α-seminorm over pairs.
fn holder_norm_half_ball(field: &Field2D, alpha: f64) -> (f64, f64) {
    let (nrad, nang) = (24, 48);
    let mut pts = vec![(0.0, 0.0, field.sample(0.0, 0.0).unwrap_or(0.0))];
    for a in 1..=nrad {
        let r = 0.5 * a as f64 / nrad as f64;
        for b in 0..=nang {
            let phi = std::f64::consts::PI * b as f64 / nang as f64;
            if let Some(v) = field.sample(r, phi) {
                pts.push((r * phi.cos(), r * phi.sin(), v));
            }
        }
    }
    let sup = pts.iter().map(|p| p.2.abs()).fold(0.0, f64::max);
    let mut semi: f64 = 0.0;
    for (k, p) in pts.iter().enumerate() {
        for q in &pts[k + 1..] {
            let d = (p.0 - q.0).hypot(p.1 - q.1);
            if d > 0.0 {
                semi = semi.max((p.2 - q.2).abs() / d.powf(alpha));
            }
        }
    }
    (sup, semi)
}

type Sides = (f64, f64, std::collections::BTreeMap<String, serde_json::Value>);

fn evaluate(id: Id, d: &Derived<'_>, params: &BoundaryParams) -> Result<Sides> {
    let field = d.field;
    let gamma = gamma_exponent(BOUNDARY_DIM);
    let [r1, r2, r3, r4] = params.radii.unwrap_or([0.25, 0.5, 0.75, 1.0]);
    match id {
        Id::NotWeighted | Id::L1Strengthened => unreachable!("gated as not applicable in the plane"),
        Id::Weighted => {
            let rho = params.rho.unwrap_or(0.6);
            let lam = params.lambda_annulus.unwrap_or(4.0 / 3.0);
            if !(lam > 1.0 && rho > 0.0 && rho * lam <= 1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!("bdry_weighted needs λ > 1 and ρ ≤ 1/λ, got λ = {lam}, ρ = {rho}")));
            }
            d.need(lam * rho)?;
            // Weight r^{2−n} is 1 in the plane.
            let ur2: Vec<f64> = d.grad.radial.iter().map(|v| v * v).collect();
            let g2: Vec<f64> = d.grad_norm.iter().map(|v| v * v).collect();
            let lhs = field.integrate(&ur2, 0.0, rho);
            let rhs = field.integrate(&g2, rho, lam * rho);
            Ok((lhs, rhs, params! { "rho" => rho, "lambda_annulus" => lam }))
        }
        Id::PohozaevFlux => {
            d.need(1.0)?;
            let flux: Vec<f64> = d.grad.angular.iter().map(|v| v * v).collect();
            let lhs = field.integrate_flat(&flux, 0.0, 0.875).max(0.0).sqrt();
            Ok((lhs, d.grad_l2(1.0)?, params! { "radius" => 0.875 }))
        }
        Id::Sz => {
            let a: Vec<f64> = (0..field.mesh().len())
                .map(|k| sz_quantity(&d.hess.matrix(k), &[d.grad.radial[k], d.grad.angular[k]]))
                .collect();
            Ok((d.lp(&a, 2.0, 0.0, 0.875)?, d.grad_l2(1.0)?, params! { "radius" => 0.875 }))
        }
        Id::Hessian => Ok((d.lp(&d.hess_norm, 1.0, 0.0, 0.75)?, d.grad_l2(1.0)?, params! { "radius" => 0.75 })),
        Id::HessianWeighted => {
            let w: Vec<f64> = d.hess_norm.iter().zip(&d.grad_norm).map(|(h, g)| h * g).collect();
            Ok((d.lp(&w, 1.0, 0.0, 0.75)?, d.grad_l2(1.0)?.powi(2), params! { "radius" => 0.75 }))
        }
        Id::W12 => Ok((d.grad_l2(0.5)?, d.u_l1(0.0, 1.0)?, params! { "radius" => 0.5 })),
        Id::W12Gamma => {
            let lhs = d.lp(&d.grad_norm, 2.0 + gamma, 0.0, 0.75)?;
            Ok((lhs, d.grad_l2(1.0)?, params! { "gamma" => gamma, "radius" => 0.75 }))
        }
        Id::HessByL1 => Ok((d.lp(&d.hess_norm, 1.0, 0.0, 0.25)?, d.u_l1(0.0, 1.0)?, params! { "radius" => 0.25 })),
        Id::AnnulusGrad | Id::AnnulusHess => {
            if !(0.0 < r1 && r1 < r2 && r2 < r3 && r3 < r4 && r4 <= 1.0) {
                return Err(Error::InvalidArgument(format!("need 0 < ρ₁ < ρ₂ < ρ₃ < ρ₄ ≤ 1, got {:?}", [r1, r2, r3, r4])));
            }
            let lhs = if id == Id::AnnulusGrad {
                d.lp(&d.grad_norm, 2.0 + gamma, r2, r3)?
            } else {
                d.lp(&d.hess_norm, 1.0, r2, r3)?
            };
            Ok((lhs, d.u_l1(r1, r4)?, params! { "gamma" => gamma, "radii" => [r1, r2, r3, r4] }))
        }
        Id::L1ByRadial => {
            let lhs = d.u_l1(0.5, 1.0)?;
            let rhs = d.lp(&d.grad.radial, 1.0, 0.5, 1.0)?;
            let lhs_ball = d.u_l1(0.0, 1.0)?;
            let rhs_ball = d.lp(&d.grad.radial, 1.0, 0.0, 1.0)?;
            let c_ball = crate::report::ratio(lhs_ball, rhs_ball);
            Ok((lhs, rhs, params! { "lhs_ball" => lhs_ball, "rhs_ball" => rhs_ball, "constant_ball" => c_ball }))
        }
        Id::Calpha => {
            let alpha = match params.alpha {
                Some(a) => a,
                None => {
                    let g2: Vec<f64> = d.grad_norm.iter().map(|v| v * v).collect();
                    hole_filling_with(|rho| Ok(field.integrate(&g2, 0.0, rho)), &DEFAULT_HOLE_SCALES)?.alpha
                }
            };
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidArgument(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
            }
            let (sup, semi) = holder_norm_half_ball(field, alpha);
            Ok((sup + semi, d.u_l1(0.0, 1.0)?, params! { "alpha" => alpha, "seminorm" => semi, "sup" => sup }))
        }
    }
}

/// Evaluates both sides of `id` on `input` and records the empirical constant.
pub fn check_boundary_estimate(id: BoundaryEstimate, input: &BoundaryInput<'_>, params: &BoundaryParams) -> Result<EstimateReport> {
    gate(id, input)?;
    let d = Derived::new(input.field);
    let budget = params.budget.unwrap_or_else(|| id.budget());
    let (lhs, rhs, p) = evaluate(id, &d, params)?;
    Ok(EstimateReport::new(id.id(), lhs, rhs, budget, p, input.field.mesh().meta()))
}

/// Runs every `(estimate, input)` pair in parallel; output order follows the input order.
pub fn check_boundary_many(
    jobs: &[(BoundaryEstimate, BoundaryInput<'_>)],
    params: &BoundaryParams,
) -> Vec<Result<EstimateReport>> {
    jobs.par_iter().map(|(id, input)| check_boundary_estimate(*id, input, params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::grid::HalfDiskMesh;

    fn mesh() -> HalfDiskMesh {
        HalfDiskMesh::half_disk(1.0, 64, 64).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in BoundaryEstimate::ALL {
            assert_eq!(id.id().parse::<BoundaryEstimate>().unwrap(), id);
            assert_eq!(serde_json::to_value(id).unwrap(), id.id());
        }
    }

    #[test]
    fn zero_field_passes_the_flux_check() {
        let z = Field2D::zeros(mesh());
        let rep = check_boundary_estimate(Id::PohozaevFlux, &BoundaryInput::bare(&z), &BoundaryParams::default()).unwrap();
        assert_eq!((rep.lhs, rep.rhs_core, rep.empirical_constant), (0.0, 0.0, 0.0));
        assert!(rep.pass);
    }

    #[test]
    fn higher_dimensional_estimates_are_not_applicable() {
        let z = Field2D::zeros(mesh());
        for id in [Id::NotWeighted, Id::L1Strengthened] {
            let e = check_boundary_estimate(id, &BoundaryInput::bare(&z), &BoundaryParams::default()).unwrap_err();
            assert!(matches!(e, Error::NotApplicable { .. }), "{id}");
        }
    }

    #[test]
    fn flag_gates_follow_each_statement() {
        let f = Field2D::from_fn(mesh(), |r, p| r * p.sin() * (1.0 - r * r)).unwrap();
        // Nonnegative, nondecreasing, not convex.
        let concave = Nonlinearity::table(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 2.5]).unwrap();
        assert!(concave.flags.nondecreasing && concave.flags.nonnegative && !concave.flags.convex);
        let input = BoundaryInput::solution(&f, &concave, 1.0).with_eigenvalue(1.0);
        let p = BoundaryParams::default();
        assert!(check_boundary_estimate(Id::W12Gamma, &input, &p).is_ok());
        assert!(matches!(check_boundary_estimate(Id::L1ByRadial, &input, &p), Err(Error::HypothesisViolated(_))));
        let unstable = BoundaryInput::solution(&f, &concave, 1.0).with_eigenvalue(-1.0);
        assert!(matches!(check_boundary_estimate(Id::W12, &unstable, &p), Err(Error::UnstableInput { .. })));
    }

    #[test]
    fn flux_of_the_height_function() {
        // u = x₂: u_ν = −1 on the flat part, so ‖u_ν‖² = 2·7/8; ‖∇u‖² = π/2.
        let f = Field2D::from_fn(mesh(), |r, p| r * p.sin()).unwrap();
        let rep = check_boundary_estimate(Id::PohozaevFlux, &BoundaryInput::bare(&f), &BoundaryParams::default()).unwrap();
        assert!((rep.lhs - 1.75f64.sqrt()).abs() < 2e-3, "{}", rep.lhs);
        assert!((rep.rhs_core - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-3);
        // Hessian of a linear function vanishes up to discretization.
        let h = check_boundary_estimate(Id::Hessian, &BoundaryInput::bare(&f), &BoundaryParams::default()).unwrap();
        assert!(h.lhs < 1e-2, "{}", h.lhs);
    }

    #[test]
    fn holder_norm_of_height_function_is_lipschitz_one() {
        let f = Field2D::from_fn(mesh(), |r, p| r * p.sin()).unwrap();
        let (sup, semi) = holder_norm_half_ball(&f, 1.0);
        assert!((sup - 0.5).abs() < 1e-3);
        assert!((semi - 1.0).abs() < 5e-3, "{semi}");
    }
}
