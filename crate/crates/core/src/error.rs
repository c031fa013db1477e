use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is not in the valuation ring (valuation {0})")]
    NotInLambda0(String),
    #[error("exponent-zero coefficient vanishes")]
    ZeroLeadingCoefficient,
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("index {index} out of range (expected < {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("correction term has non-positive extra exponent {0}")]
    CorrectionNotPositive(String),
    #[error("valuation vector {0} lies outside the polytope")]
    OutsideDomain(String),
    #[error("dimension {0} is not supported (at most {1})")]
    DimensionUnsupported(usize, usize),
    #[error("initial system has a positive-dimensional solution set")]
    PositiveDimensionalInitialLocus,
    #[error("elimination failed: {0}")]
    EliminationFailed(String),
    #[error("initial Jacobian is singular (|det| = {0:e})")]
    SingularInitialJacobian(f64),
    #[error("Newton lift did not converge after {iterations} steps (residual valuation {residual})")]
    NoConvergence { iterations: usize, residual: String },
    #[error("point {0} is not in the interior of the polytope")]
    NotInterior(String),
    #[error("level {0} of the leading term equation is underdetermined")]
    LevelUnderdetermined(usize),
    #[error("adapted basis is not integral: {0}")]
    IntegralityFailure(String),
    #[error("Hessian is singular at a degenerate critical point")]
    SingularHessian,
    #[error("potential is not Morse: {0}")]
    NotMorse(String),
    #[error("multiplicities unresolved at {0} point(s)")]
    UnresolvedMultiplicities(usize),
    #[error("parse error: {0}")]
    Parse(String),
}
