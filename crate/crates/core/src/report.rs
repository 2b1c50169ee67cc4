//! Estimate reports shared by the interior and boundary labs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::field::RadialField;

/// Mesh description echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshMeta {
    pub kind: String,
    pub nodes: usize,
    pub inner: f64,
    pub outer: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_nodes: Option<usize>,
}

impl MeshMeta {
    #[must_use]
    pub fn radial(field: &RadialField) -> Self {
        let mesh = field.mesh();
        Self {
            kind: format!("radial-{}", if matches!(mesh.grading(), crate::mesh::Grading::Uniform) { "uniform" } else { "geometric" }),
            nodes: mesh.len(),
            inner: mesh.inner(),
            outer: mesh.outer(),
            angular_nodes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate_id: String,
    pub lhs: f64,
    pub rhs_core: f64,
    #[serde(rename = "constant")]
    pub empirical_constant: f64,
    pub budget: f64,
    pub pass: bool,
    pub params: BTreeMap<String, Value>,
    pub mesh: MeshMeta,
}

/// lhs / rhs, with 0/0 read as 0 (both sides vanish).
#[must_use]
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

impl EstimateReport {
    /// Builds a report; passes when the constant is finite and within `budget`.
    #[must_use]
    pub fn new(id: &str, lhs: f64, rhs_core: f64, budget: f64, params: BTreeMap<String, Value>, mesh: MeshMeta) -> Self {
        let c = ratio(lhs, rhs_core);
        Self {
            estimate_id: id.into(),
            lhs,
            rhs_core,
            empirical_constant: c,
            budget,
            pass: c.is_finite() && c <= budget,
            params,
            mesh,
        }
    }

    /// Relative change of the empirical constant against a refined run.
    #[must_use]
    pub fn drift(&self, refined: &EstimateReport) -> f64 {
        let (a, b) = (self.empirical_constant, refined.empirical_constant);
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }
}

/// `params` builder: `params! { "rho" => 0.5, "t" => t }`.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = ::std::collections::BTreeMap::<String, ::serde_json::Value>::new();
        $( m.insert($k.to_string(), ::serde_json::json!($v)); )*
        m
    }};
}
