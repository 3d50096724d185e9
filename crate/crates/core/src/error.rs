use thiserror::Error;

use crate::jet::CoordId;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero expression")]
    DivisionByZero,
    #[error("substitution produced an identically zero denominator")]
    SubstitutionPole,
    #[error("denominator vanishes at the evaluation point")]
    EvaluationPole,
    #[error("coordinate {0} is not bound at the evaluation point")]
    UnboundCoordinate(CoordId),
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid jet specification: {0}")]
    InvalidSpec(String),
    #[error("expression contains coordinate {0} of maximal order; total derivative would leave the jet space")]
    OrderOverflow(CoordId),
    #[error("bracket of generators {0} and {1} is not in their span")]
    NotClosed(usize, usize),
    #[error("system has no parametrization of its solution manifold")]
    MissingParametrization,
    #[error("sampling hit a pole {0} times in a row")]
    PersistentPole(usize),
    #[error("symbolic elimination exceeded the size guard: {0}")]
    Intractable(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("vector field component mentions derivative coordinate {0}")]
    JetCoordinateInBase(CoordId),
    #[error("generators are linearly dependent")]
    DependentGenerators,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
