//! The interior suite: every registry estimate on stable branch points, with refinement drift.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mesh::{Dimension, RadialMesh};
use crate::nonlinearity::Nonlinearity;
use crate::radial::{continue_branch_on, shoot, BranchPoint};
use crate::report::EstimateReport;
use crate::stability::{annotate_stability, first_eigenvalue};

use super::{check_interior_estimate, InteriorEstimate, InteriorInput, InteriorParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub nonlinearities: Vec<Nonlinearity>,
    pub points_per_branch: usize,
    pub nodes: usize,
    pub s_max: f64,
    pub steps: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: (3..=9).collect(),
            nonlinearities: vec![Nonlinearity::exp(), Nonlinearity::power(2.0), Nonlinearity::power(3.0)],
            points_per_branch: 5,
            nodes: 1024,
            s_max: 12.0,
            steps: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub estimate_id: String,
    pub coarse: Option<EstimateReport>,
    pub refined: Option<EstimateReport>,
    pub drift: Option<f64>,
    /// Error text when either run failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub dim: usize,
    pub nonlinearity: String,
    pub center_value: f64,
    pub lambda: f64,
    pub first_eigenvalue: f64,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteEntry {
    /// Every check produced a finite constant, passed its budget, and drifted less than `max_drift`.
    #[must_use]
    pub fn all_pass(&self, max_drift: f64) -> bool {
        self.checks.iter().all(|c| {
            c.error.is_none()
                && c.coarse.as_ref().is_some_and(|r| r.pass)
                && c.refined.as_ref().is_some_and(|r| r.pass)
                && c.drift.is_some_and(|d| d < max_drift)
        })
    }
}

/// `k` stable points of the lower branch, evenly spread and including the last stable one.
#[must_use]
pub fn stable_sample(points: &[BranchPoint], k: usize) -> Vec<&BranchPoint> {
    let stable: Vec<&BranchPoint> = points
        .iter()
        .take_while(|p| p.stable != Some(false))
        .filter(|p| p.stable == Some(true) && p.center_value > 0.0)
        .collect();
    if stable.len() <= k {
        return stable;
    }
    (0..k).map(|j| stable[(stable.len() - 1) - (k - 1 - j) * (stable.len() - 1) / (k - 1).max(1)]).collect()
}

/// Runs the registry on each sampled point at `nodes` and at the refined mesh.
pub fn run_interior_suite(cfg: &SuiteConfig, params: &InteriorParams) -> Result<Vec<SuiteEntry>> {
    let mesh = RadialMesh::unit_uniform(cfg.nodes)?;
    let fine = mesh.refined();
    let mut jobs = Vec::new();
    for &n in &cfg.dims {
        let dim = Dimension::new(n)?;
        for f in &cfg.nonlinearities {
            let mut branch = continue_branch_on(dim, f, cfg.s_max, cfg.steps, &mesh)?;
            annotate_stability(&mut branch)?;
            for p in stable_sample(branch.lower_part(), cfg.points_per_branch) {
                jobs.push((dim, f.clone(), p.clone()));
            }
        }
    }
    jobs.par_iter()
        .map(|(dim, f, p)| {
            let mu = p.first_eigenvalue.unwrap_or(f64::NAN);
            let (lambda_fine, field_fine) = shoot(*dim, f, p.center_value, &fine)?;
            let mu_fine = first_eigenvalue(&field_fine, f, lambda_fine)?.first_eigenvalue;
            let coarse_in = InteriorInput::solution(&p.field, f, p.lambda).with_eigenvalue(mu);
            let fine_in = InteriorInput::solution(&field_fine, f, lambda_fine).with_eigenvalue(mu_fine);
            let checks = InteriorEstimate::ALL
                .iter()
                .map(|&id| {
                    let a = check_interior_estimate(id, &coarse_in, params);
                    let b = check_interior_estimate(id, &fine_in, params);
                    match (a, b) {
                        (Ok(a), Ok(b)) => SuiteCheck {
                            estimate_id: id.id().into(),
                            drift: Some(a.drift(&b)),
                            coarse: Some(a),
                            refined: Some(b),
                            error: None,
                        },
                        (a, b) => SuiteCheck {
                            estimate_id: id.id().into(),
                            error: Some(a.err().or(b.err()).map(|e| e.to_string()).unwrap_or_default()),
                            coarse: None,
                            refined: None,
                            drift: None,
                        },
                    }
                })
                .collect();
            Ok(SuiteEntry {
                dim: dim.get(),
                nonlinearity: f.label(),
                center_value: p.center_value,
                lambda: p.lambda,
                first_eigenvalue: mu,
                checks,
            })
        })
        .collect()
}
