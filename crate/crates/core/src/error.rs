use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid regular polygon: {0}")]
    InvalidPolygonSpec(String),

    #[error(
        "invalid triangle: alpha = {alpha} must lie in (0, pi/2) and r = {r} must be positive"
    )]
    InvalidTriangle { alpha: f64, r: f64 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("outer polygon is not convex")]
    NotConvex,

    #[error("polygon is not star-shaped about ({x}, {y})")]
    NotStarShaped { x: f64, y: f64 },

    #[error("mesh has no free nodes")]
    NoFreeNodes,

    #[error(
        "factorization failed at pivot {pivot} (value {value:e}); missing Dirichlet constraints?"
    )]
    Factorization { pivot: usize, value: f64 },

    #[error(
        "eigen iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("invalid level range: {0}")]
    InvalidLevels(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
