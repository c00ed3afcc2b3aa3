use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected d = {expected}, found d = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent vector has length {found}, expected {expected}")]
    BadExponentLength { expected: usize, found: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("base point is not singular: {derivative} = {value}")]
    NotSingular { derivative: String, value: String },

    #[error("eigenvalue computation did not converge: {0}")]
    NoConvergence(String),

    #[error("quadratic form has cross terms between partition blocks: {0}")]
    CrossTermsPresent(String),

    #[error("non-positive input: {0}")]
    NonPositiveInput(String),

    #[error("normal form invariant violated in `{field}`: {reason}")]
    InvariantViolation { field: String, reason: String },

    #[error("sum of 1/r_i is {sum}, must exceed 1")]
    BbisViolated { sum: String },

    #[error("kappa = {kappa} is not below 1; reduce the slack")]
    SlackTooLarge { kappa: String },

    #[error("weights sum to {sum}, expected exactly 1")]
    WeightsNotNormalized { sum: String },

    #[error("every grid point fell below the denominator threshold {eta}")]
    AllPointsDegenerate { eta: f64 },

    #[error("function is negative ({value}) at s = {at} on the enlarged interval")]
    NegativeInput { at: f64, value: f64 },

    #[error("hessian of Q is degenerate (smallest eigenvalue {0})")]
    HessianDegenerate(f64),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
