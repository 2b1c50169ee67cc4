//! Numerical laboratory for stable solutions of −Δu = λf(u) in balls and half-balls.

pub mod boundary;
pub mod error;
pub mod inequality;
pub mod report;
pub mod sampler;
pub mod stats;
pub mod field;
pub mod interior;
pub mod mesh;
pub mod nonlinearity;
pub mod quadrature;
pub mod radial;
pub mod special;
pub mod stability;
pub mod testfn;

pub use error::{Error, Result};

/// Crate version, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use field::RadialField;
pub use mesh::{Dimension, Grading, RadialMesh};
pub use nonlinearity::{Nonlinearity, NonlinearityFlags, NonlinearityKind};
pub use quadrature::{quadrature_radial, DomainSpec};
