//! Radial test functions: cutoffs ζ and weighted cutoffs η = r^a ζ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear cutoff: 1 on `[0, plateau]`, linear down to 0 at `support`, 0 beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub plateau: f64,
    pub support: f64,
}

impl Cutoff {
    pub fn new(plateau: f64, support: f64) -> Result<Self> {
        if !(plateau >= 0.0 && support > plateau) {
            return Err(Error::InvalidArgument(format!("cutoff needs 0 ≤ plateau < support, got ({plateau}, {support})")));
        }
        Ok(Self { plateau, support })
    }

    #[must_use]
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.plateau {
            1.0
        } else if r >= self.support {
            0.0
        } else {
            (self.support - r) / (self.support - self.plateau)
        }
    }

    /// One-sided derivative from the right at the kinks.
    #[must_use]
    pub fn derivative(&self, r: f64) -> f64 {
        if r < self.plateau || r >= self.support {
            0.0
        } else {
            -1.0 / (self.support - self.plateau)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "eta_kind", rename_all = "snake_case")]
pub enum TestFunctionSpec {
    /// η = ζ
    PlainCutoff { zeta: Cutoff },
    /// η = r^a ζ
    PowerCutoff { a: f64, zeta: Cutoff },
}

impl TestFunctionSpec {
    pub fn plain(plateau: f64, support: f64) -> Result<Self> {
        Ok(Self::PlainCutoff { zeta: Cutoff::new(plateau, support)? })
    }

    #[must_use]
    pub fn zeta(&self) -> Cutoff {
        match self {
            Self::PlainCutoff { zeta } | Self::PowerCutoff { zeta, .. } => *zeta,
        }
    }

    #[must_use]
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Self::PlainCutoff { zeta } => zeta.value(r),
            Self::PowerCutoff { a, zeta } => r.powf(*a) * zeta.value(r),
        }
    }

    #[must_use]
    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            Self::PlainCutoff { zeta } => zeta.derivative(r),
            Self::PowerCutoff { a, zeta } => {
                a * r.powf(a - 1.0) * zeta.value(r) + r.powf(*a) * zeta.derivative(r)
            }
        }
    }
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        Self::PlainCutoff { zeta: Cutoff { plateau: 0.5, support: 1.0 } }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_lipschitz_and_bounded() {
        let z = Cutoff::new(0.5, 1.0).unwrap();
        for k in 0..=200 {
            let r = k as f64 / 200.0;
            let v = z.value(r);
            assert!((0.0..=1.0).contains(&v));
        }
        assert_eq!(z.value(1.0), 0.0);
        assert_eq!(z.derivative(0.75), -2.0);
        assert!(Cutoff::new(0.5, 0.5).is_err());
    }
}
