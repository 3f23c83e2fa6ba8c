use thiserror::Error;

/// Errors raised by geometry construction, numerics, audits and the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("potential V must be positive, found minimum {min} at node {node}")]
    NonPositivePotential { min: f64, node: usize },
    #[error("metric is not positive definite at node {node}")]
    DegenerateMetric { node: usize },
    #[error("field is not finite at node {node}")]
    NonFiniteField { node: usize },
    #[error("axis {axis} has {points} points, the stencil needs {needed}")]
    ResolutionTooLow { axis: usize, points: usize, needed: usize },
    #[error("dimension parameter m = {m} is not admissible for n = {n}")]
    InvalidDimensionParameter { m: f64, n: usize },
    #[error("m = n requires a constant weight phi")]
    NonconstantPhiAtEqualDimension,
    #[error("the drift residual is undefined at m = n")]
    EqualDimensionResidualUndefined,
    #[error("the manifold has no boundary")]
    NoBoundary,
    #[error("boundary faces meet at corners")]
    CornerBoundary,
    #[error("the manifold is not closed")]
    NotClosed,
    #[error("refinement study needs at least {needed} levels, got {got}")]
    InsufficientRefinements { needed: usize, got: usize },
    #[error("solver failed: {0}")]
    SolverDivergence(String),
    #[error("incompatible data: relative compatibility defect {defect:e}")]
    IncompatibleData { defect: f64 },
    #[error("negative discriminant {value:e}")]
    NegativeDiscriminant { value: f64 },
    #[error("eigenvalue must be positive, got {0}")]
    NonpositiveEigenvalue(f64),
    #[error("immersion is degenerate at node {node}")]
    DegenerateImmersion { node: usize },
    #[error("dimension {n} is below the minimum {min}")]
    DimensionTooLow { n: usize, min: usize },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
