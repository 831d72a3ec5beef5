use thiserror::Error;

use crate::expr::{EvalError, ParseError};

/// Errors raised by the algebra, geometry and estimator layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} out of range 1..={max}", max = crate::ga::MAX_DIM)]
    DimensionOutOfRange(usize),

    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("expected a pure grade-{expected} element")]
    WrongGrade { expected: u32 },

    #[error("zero vector has no inverse or direction")]
    ZeroVector,

    #[error("degenerate triangle")]
    DegenerateTriangle,

    #[error("mirror vertex {vertex} is not balanced (tau = {tau})")]
    Unbalanced { vertex: char, tau: f64 },

    #[error("relaxed bound exceeded: ratio {ratio} > kappa {kappa}")]
    RelaxedBoundExceeded { ratio: f64, kappa: f64 },

    #[error("point ({x}, {y}) outside the surface domain")]
    DomainViolation { x: f64, y: f64 },

    #[error("zero denominator in bivector quotient")]
    ZeroDenominator,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("quadrature did not converge (best estimate {best}, error estimate {err_est})")]
    QuadratureNotConverged { best: f64, err_est: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
