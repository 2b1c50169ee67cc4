//! Half-disk laboratory in the plane: solver, stability, estimate registry and the torsion,
//! dilation and counterexample checks.

pub mod dilation;
pub mod estimates;
pub mod grid;
pub mod poisson;
pub mod remark;
pub mod solver;
pub mod suite;
pub mod torsion;

pub use grid::{Field2D, HalfDiskMesh};
pub use solver::{first_eigenvalue_2d, fold_half_disk, solve_half_disk, CurvedBoundary, HalfDiskSolution};
pub use suite::{run_boundary_suite, BoundarySuiteConfig, BoundarySuiteReport};
pub use torsion::{torsion_solve, TorsionSolution};
pub use estimates::{check_boundary_estimate, check_boundary_many, BoundaryEstimate, BoundaryInput, BoundaryParams};
