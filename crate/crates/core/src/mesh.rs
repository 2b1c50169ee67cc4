//! Radial meshes and the ambient dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default inner cutoff as a fraction of the outer radius.
pub const DEFAULT_INNER_CUTOFF: f64 = 1e-6;

/// Minimum node density for geometric meshes.
pub const MIN_NODES_PER_DECADE: f64 = 16.0;

/// Ambient dimension n ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooLow { n, min: 1 });
        }
        Ok(Self(n))
    }

    #[must_use]
    pub fn get(self) -> usize {
        self.0
    }

    /// Rejects dimensions outside `min..=max`.
    pub fn require_range(self, min: usize, max: usize) -> Result<Self> {
        if self.0 < min || self.0 > max {
            return Err(Error::DimensionOutOfRange { n: self.0, min, max });
        }
        Ok(self)
    }

    pub fn require_at_least(self, min: usize) -> Result<Self> {
        if self.0 < min {
            return Err(Error::DimensionTooLow { n: self.0, min });
        }
        Ok(self)
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    Geometric,
}

/// Strictly increasing radii `ε₀ = r_0 < … < r_N = R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialMesh {
    nodes: Vec<f64>,
    grading: Grading,
}

impl RadialMesh {
    /// `count` equally spaced nodes on `[inner, outer]`.
    pub fn uniform(inner: f64, outer: f64, count: usize) -> Result<Self> {
        check_range(inner, outer, count)?;
        let h = (outer - inner) / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| inner + h * i as f64).collect();
        nodes[count - 1] = outer;
        Ok(Self { nodes, grading: Grading::Uniform })
    }

    /// `count` nodes with constant ratio `r_{i+1}/r_i` on `[inner, outer]`.
    pub fn geometric(inner: f64, outer: f64, count: usize) -> Result<Self> {
        check_range(inner, outer, count)?;
        let decades = (outer / inner).log10();
        if (count - 1) as f64 / decades < MIN_NODES_PER_DECADE {
            return Err(Error::InvalidMesh(format!(
                "geometric mesh needs at least {MIN_NODES_PER_DECADE} nodes per decade, got {:.2}",
                (count - 1) as f64 / decades
            )));
        }
        let ln_lo = inner.ln();
        let step = (outer.ln() - ln_lo) / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| (ln_lo + step * i as f64).exp()).collect();
        nodes[0] = inner;
        nodes[count - 1] = outer;
        Ok(Self { nodes, grading: Grading::Geometric })
    }

    /// Uniform mesh on `[DEFAULT_INNER_CUTOFF, 1]`.
    pub fn unit_uniform(count: usize) -> Result<Self> {
        Self::uniform(DEFAULT_INNER_CUTOFF, 1.0, count)
    }

    /// Geometric mesh on `[DEFAULT_INNER_CUTOFF, 1]`.
    pub fn unit_geometric(count: usize) -> Result<Self> {
        Self::geometric(DEFAULT_INNER_CUTOFF, 1.0, count)
    }

    /// Arbitrary strictly increasing positive nodes.
    pub fn from_nodes(nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::MeshTooCoarse { nodes: nodes.len(), required: 2 });
        }
        if !(nodes[0] > 0.0) {
            return Err(Error::InvalidMesh("inner cutoff must be positive".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidMesh("nodes must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes, grading })
    }

    /// The same grading with twice as many cells.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(match self.grading {
                Grading::Uniform => 0.5 * (w[0] + w[1]),
                Grading::Geometric => (w[0] * w[1]).sqrt(),
            });
        }
        nodes.push(self.outer());
        Self { nodes, grading: self.grading }
    }

    /// Nodes scaled by `factor` (a dilation of the domain).
    pub fn scaled(&self, factor: f64) -> Self {
        Self { nodes: self.nodes.iter().map(|r| r * factor).collect(), grading: self.grading }
    }

    /// Restriction to nodes `r ≤ outer`, with `outer` appended as the last node if needed.
    pub fn truncated(&self, outer: f64) -> Result<Self> {
        let mut nodes: Vec<f64> = self.nodes.iter().copied().filter(|&r| r < outer * (1.0 - 1e-14)).collect();
        nodes.push(outer);
        Self::from_nodes(nodes, self.grading)
    }

    #[must_use]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[must_use]
    pub fn inner(&self) -> f64 {
        self.nodes[0]
    }

    #[must_use]
    pub fn outer(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    #[must_use]
    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Largest cell width.
    #[must_use]
    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index `i` with `r_i ≤ r < r_{i+1}`, clamped to the valid cell range.
    #[must_use]
    pub fn cell_of(&self, r: f64) -> usize {
        let idx = self.nodes.partition_point(|&x| x <= r);
        idx.saturating_sub(1).min(self.nodes.len() - 2)
    }
}

fn check_range(inner: f64, outer: f64, count: usize) -> Result<()> {
    if count < 2 {
        return Err(Error::MeshTooCoarse { nodes: count, required: 2 });
    }
    if !(inner > 0.0) || !(outer > inner) || !outer.is_finite() {
        return Err(Error::InvalidMesh(format!("need 0 < inner < outer, got [{inner}, {outer}]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_density_is_enforced() {
        assert!(RadialMesh::geometric(1e-6, 1.0, 50).is_err());
        assert!(RadialMesh::geometric(1e-6, 1.0, 97).is_ok());
    }

    #[test]
    fn refinement_keeps_endpoints() {
        let m = RadialMesh::geometric(1e-3, 1.0, 100).unwrap();
        let f = m.refined();
        assert_eq!(f.len(), 199);
        assert_eq!(f.inner(), m.inner());
        assert_eq!(f.outer(), m.outer());
    }

    #[test]
    fn dimension_gate() {
        let d = Dimension::new(2).unwrap();
        assert!(matches!(d.require_range(3, 9), Err(Error::DimensionOutOfRange { .. })));
        assert!(Dimension::new(0).is_err());
    }
}
