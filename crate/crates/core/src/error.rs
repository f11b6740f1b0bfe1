//! Error types for the library surface.

use thiserror::Error;

/// Errors from graph construction and validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph has no agents")]
    NoAgents,
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("source id {0} also listed as an agent")]
    SourceIsAgent(u64),
    #[error("unknown node id {0} in edge list")]
    UnknownNode(u64),
    #[error("self edge on node {0}")]
    SelfEdge(u64),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: u64, to: u64 },
    #[error("edge {from} -> {to} has nonpositive or non-finite weight {weight}")]
    NonpositiveWeight { from: u64, to: u64, weight: f64 },
    #[error("edge into source: {from} -> {to} (the source is input-only)")]
    EdgeIntoSource { from: u64, to: u64 },
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("pinned Laplacian has an eigenvalue with nonpositive real part ({re}); the graph violates source connectivity or the eigensolver failed")]
    NonpositiveRealPart { re: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Errors from the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("QR iteration did not converge after {sweeps} sweeps")]
    QrNonConvergence { sweeps: usize },
    #[error("Lambert W branch {branch} is singular at h = 0")]
    LambertSingular { branch: i32 },
    #[error("Lambert W argument must be finite")]
    LambertNonFinite,
    #[error("Lambert W iteration did not converge on branch {branch}")]
    LambertNonConvergence { branch: i32 },
}

/// Errors from dynamics parameter validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("relative degree r must be at least 1")]
    ZeroRelativeDegree,
    #[error("filter cutoff omega is required for this mode")]
    MissingOmega,
    #[error("step source has no derivative at the jump; tracking mode needs a smooth source")]
    StepSourceInTrackingMode,
}

/// Errors from simulation configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("integration step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("horizon must exceed the integration step")]
    HorizonTooShort,
    #[error("step {step} does not divide the delay {tau} (tau/step = {ratio})")]
    StepNotDividingDelay { step: f64, tau: f64, ratio: f64 },
    #[error("initial state has dimension {got}, expected {expected}")]
    InitialDimension { got: usize, expected: usize },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Errors from cohesion metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("degenerate source: step amplitude is zero, deviation is undefined")]
    DegenerateSource,
    #[error("trajectory never settles within the horizon {horizon} s; rerun with a longer horizon")]
    NeverSettles { horizon: f64 },
    #[error("trajectory diverged at t = {0} s; cohesion metrics are undefined")]
    Diverged(f64),
    #[error("trajectory has no inputs recorded")]
    NoInputs,
}

/// Errors from stability analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("Hayes conditions apply only to real modal pairs; pair {index} has imaginary part {imag}")]
    NonRealPair { index: usize, imag: f64 },
    #[error("root survey produced no usable roots")]
    EmptySurvey,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
