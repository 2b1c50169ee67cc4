//! The boundary suite: the registry on the minimal solution at a fraction of the measured fold,
//! on a polar grid and its refinement, plus the dilation and Step 1 checks on the coarse field.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::report::EstimateReport;

use super::dilation::{dilation_average_identity, step1_lower_bound, AnnulusCutoff, DilationFamily, DilationReport, Step1Report};
use super::estimates::{check_boundary_estimate, BoundaryEstimate, BoundaryInput, BoundaryParams};
use super::grid::HalfDiskMesh;
use super::solver::{first_eigenvalue_2d, fold_half_disk, solve_half_disk, CurvedBoundary};
use super::torsion::torsion_solve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySuiteConfig {
    pub nonlinearity: Nonlinearity,
    pub nr: usize,
    pub nphi: usize,
    /// λ as a fraction of the measured fold.
    pub fold_fraction: f64,
    pub fold_tolerance: f64,
    /// Also run the dilation identity and Step 1 on the coarse field.
    pub dilation: bool,
}

impl Default for BoundarySuiteConfig {
    fn default() -> Self {
        Self { nonlinearity: Nonlinearity::exp(), nr: 256, nphi: 128, fold_fraction: 0.5, fold_tolerance: 1e-5, dilation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub estimate_id: String,
    pub coarse: Option<EstimateReport>,
    pub refined: Option<EstimateReport>,
    pub drift: Option<f64>,
    /// Reason when the estimate does not apply in the plane.
    pub not_applicable: Option<String>,
    pub error: Option<String>,
}

impl BoundaryCheck {
    /// Skipped checks pass; the rest need both runs within budget and drift below `max_drift`.
    #[must_use]
    pub fn passes(&self, max_drift: f64) -> bool {
        self.not_applicable.is_some()
            || (self.error.is_none()
                && self.coarse.as_ref().is_some_and(|r| r.pass)
                && self.refined.as_ref().is_some_and(|r| r.pass)
                && self.drift.is_some_and(|d| d < max_drift))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySuiteReport {
    pub nonlinearity: String,
    pub fold: f64,
    pub lambda: f64,
    pub coarse_eigenvalue: f64,
    pub refined_eigenvalue: f64,
    pub checks: Vec<BoundaryCheck>,
    pub dilation: Option<DilationReport>,
    pub step1: Option<Step1Report>,
}

impl BoundarySuiteReport {
    #[must_use]
    pub fn all_pass(&self, max_drift: f64) -> bool {
        self.checks.iter().all(|c| c.passes(max_drift))
    }
}

pub fn run_boundary_suite(cfg: &BoundarySuiteConfig, params: &BoundaryParams) -> Result<BoundarySuiteReport> {
    if !(cfg.fold_fraction > 0.0 && cfg.fold_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("fold fraction must lie in (0, 1), got {}", cfg.fold_fraction)));
    }
    let f = &cfg.nonlinearity;
    let mesh = HalfDiskMesh::half_disk(1.0, cfg.nr, cfg.nphi)?;
    let fold = fold_half_disk(f, mesh, cfg.fold_tolerance)?.lambda_star;
    let lambda = cfg.fold_fraction * fold;
    let (coarse, refined) = rayon::join(
        || solve_half_disk(f, lambda, mesh, &CurvedBoundary::Zero),
        || solve_half_disk(f, lambda, mesh.refined(), &CurvedBoundary::Zero),
    );
    let (coarse, refined) = (coarse?, refined?);
    let mu_coarse = first_eigenvalue_2d(&coarse.field, f, lambda)?.first_eigenvalue;
    let mu_fine = first_eigenvalue_2d(&refined.field, f, lambda)?.first_eigenvalue;
    let coarse_in = BoundaryInput::solution(&coarse.field, f, lambda).with_eigenvalue(mu_coarse);
    let fine_in = BoundaryInput::solution(&refined.field, f, lambda).with_eigenvalue(mu_fine);
    let checks = BoundaryEstimate::ALL
        .par_iter()
        .map(|&id| {
            let mut check =
                BoundaryCheck { estimate_id: id.id().into(), coarse: None, refined: None, drift: None, not_applicable: None, error: None };
            match (check_boundary_estimate(id, &coarse_in, params), check_boundary_estimate(id, &fine_in, params)) {
                (Ok(a), Ok(b)) => {
                    check.drift = Some(a.drift(&b));
                    check.coarse = Some(a);
                    check.refined = Some(b);
                }
                (Err(Error::NotApplicable { reason, .. }), _) => check.not_applicable = Some(reason),
                (a, b) => check.error = a.err().or(b.err()).map(|e| e.to_string()),
            }
            check
        })
        .collect();
    let (dilation, step1) = if cfg.dilation {
        let family = DilationFamily::new(coarse.field.clone(), lambda)?;
        let torsion = torsion_solve(4.15, 4.85, 128, 512)?;
        (
            Some(dilation_average_identity(&family, f)?),
            Some(step1_lower_bound(&family, f, &AnnulusCutoff::default(), &torsion)?),
        )
    } else {
        (None, None)
    };
    Ok(BoundarySuiteReport {
        nonlinearity: f.label(),
        fold,
        lambda,
        coarse_eigenvalue: mu_coarse,
        refined_eigenvalue: mu_fine,
        checks,
        dilation,
        step1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_suite_runs_and_skips_the_higher_dimensional_ids() {
        let cfg = BoundarySuiteConfig { nr: 32, nphi: 16, fold_tolerance: 1e-3, dilation: false, ..Default::default() };
        let rep = run_boundary_suite(&cfg, &BoundaryParams::default()).unwrap();
        assert!(rep.lambda > 0.0 && rep.lambda < rep.fold);
        assert!(rep.coarse_eigenvalue > 0.0);
        let skipped: Vec<&str> = rep.checks.iter().filter(|c| c.not_applicable.is_some()).map(|c| c.estimate_id.as_str()).collect();
        assert_eq!(skipped, ["bdry_not_weighted", "bdry_L1_strengthened"]);
        assert!(rep.checks.iter().all(|c| c.error.is_none()), "{:?}", rep.checks);
    }
}
