use thiserror::Error;

/// Failure modes shared by every module of the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain [{lo}, {hi}] lies outside the mesh range [{mesh_lo}, {mesh_hi}]")]
    DomainOutsideMesh { lo: f64, hi: f64, mesh_lo: f64, mesh_hi: f64 },

    #[error("non-finite value {value} at node {index}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("mesh too coarse: {nodes} nodes, need at least {required}")]
    MeshTooCoarse { nodes: usize, required: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("dimension {n} too low: requires n >= {min}")]
    DimensionTooLow { n: usize, min: usize },

    #[error("dimension {n} outside the admissible range: requires {min} ≤ n ≤ {max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },

    #[error("no bracket for lambda within [0, {upper}] at s = {s}")]
    NoBracket { s: f64, upper: f64 },

    #[error("integrator step control underflow at r = {r}")]
    StiffFailure { r: f64 },

    #[error("shooting failed at s = {s}: {source}")]
    AtCenterValue { s: f64, source: Box<Error> },

    #[error("eigenvalue bisection did not converge in {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("unstable input: first eigenvalue {eigenvalue} < -{tolerance}")]
    UnstableInput { eigenvalue: f64, tolerance: f64 },

    #[error("ratio {ratio} at scale {scale} is not contractive")]
    RatioNotContractive { scale: f64, ratio: f64 },

    #[error("residual {residual} exceeds tolerance {tolerance}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("Newton/monotone iteration diverged at lambda = {lambda}")]
    NewtonDiverged { lambda: f64 },

    #[error("estimate {id} not applicable: {reason}")]
    NotApplicable { id: String, reason: String },

    #[error("comparison failed: {0}")]
    ComparisonFailed(String),

    #[error("linear solver singular: {0}")]
    SolverSingular(String),

    #[error("quadrature under-resolved: {0}")]
    QuadratureUnderResolved(String),

    #[error("hypothesis failed at ball centre {center:?}, radius {radius}")]
    HypothesisFailedAtBall { center: Vec<f64>, radius: f64 },

    #[error("probe is not superharmonic: -Δu = {value} at {point:?}")]
    NotSuperharmonic { point: Vec<f64>, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_center_value(self, s: f64) -> Self {
        Error::AtCenterValue { s, source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
