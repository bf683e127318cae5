use thiserror::Error;

/// Errors raised by the polynomial algebra and the diagnostics built on it.
///
/// Variant names double as the stable error identifiers printed by the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlatError {
    #[error("EmptyPolynomial: the polynomial has no nonzero coefficient")]
    EmptyPolynomial,

    #[error("GridTooCoarse: grid of size {size} is below the required {required}")]
    GridTooCoarse { size: usize, required: usize },

    #[error("InvalidGrid: grid size {0} is not a power of two")]
    InvalidGrid(usize),

    #[error("DuplicateExponent: exponent {0} appears more than once")]
    DuplicateExponent(i64),

    #[error("InvalidExponent: {0}")]
    InvalidExponent(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("DegenerateHLConstant: the Hardy-Littlewood constant c must be nonzero")]
    DegenerateHLConstant,

    #[error("ZeroNotInsideDisk: zero {re}{im:+}i has modulus >= 1")]
    ZeroNotInsideDisk { re: f64, im: f64 },

    #[error("SecondDerivativeNotBoundedAway: rho = {0} is not positive")]
    SecondDerivativeNotBoundedAway(f64),

    #[error("RootFindingDiverged: no convergence after {sweeps} sweeps (max residual {max_residual:e})")]
    RootFindingDiverged {
        sweeps: usize,
        max_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("NotAnalytic: polynomial has negative exponent {0}")]
    NotAnalytic(i64),

    #[error("FactorizationInconsistent: {0}")]
    FactorizationInconsistent(String),

    #[error("LogSingularOnGrid: |p| = {value:e} at grid index {index}")]
    LogSingularOnGrid { index: usize, value: f64 },

    #[error("ConstantModulus: |P| is identically 1, the Gram sum is undefined")]
    ConstantModulus,

    #[error("GramIdentityViolation: entrywise r = {entrywise}, identity r = {identity}")]
    GramIdentityViolation { entrywise: f64, identity: f64 },

    #[error("NotUnitNorm: L2 norm is {0}, expected 1")]
    NotUnitNorm(f64),

    #[error("ExpansionTooLarge: expansion needs {needed} terms, cap is {cap}")]
    ExpansionTooLarge { needed: usize, cap: usize },

    #[error("NotDissociated: exponent {exponent} reached twice at factor {factor}")]
    NotDissociated { factor: usize, exponent: i64 },

    #[error("StabilizationViolated: coefficient at exponent {0} changed after first touch")]
    StabilizationViolated(i64),

    #[error("InvalidGramSum: r = {r} at position {index} is not positive")]
    InvalidGramSum { index: usize, r: f64 },

    #[error("SeriesLengthMismatch: expected {expected} entries, got {got}")]
    SeriesLengthMismatch { expected: usize, got: usize },
}

impl FlatError {
    /// The bare identifier, e.g. `"GridTooCoarse"`.
    pub fn kind(&self) -> &'static str {
        match self {
            FlatError::EmptyPolynomial => "EmptyPolynomial",
            FlatError::GridTooCoarse { .. } => "GridTooCoarse",
            FlatError::InvalidGrid(_) => "InvalidGrid",
            FlatError::DuplicateExponent(_) => "DuplicateExponent",
            FlatError::InvalidExponent(_) => "InvalidExponent",
            FlatError::InvalidParameter(_) => "InvalidParameter",
            FlatError::DegenerateHLConstant => "DegenerateHLConstant",
            FlatError::ZeroNotInsideDisk { .. } => "ZeroNotInsideDisk",
            FlatError::SecondDerivativeNotBoundedAway(_) => "SecondDerivativeNotBoundedAway",
            FlatError::RootFindingDiverged { .. } => "RootFindingDiverged",
            FlatError::NotAnalytic(_) => "NotAnalytic",
            FlatError::FactorizationInconsistent(_) => "FactorizationInconsistent",
            FlatError::LogSingularOnGrid { .. } => "LogSingularOnGrid",
            FlatError::ConstantModulus => "ConstantModulus",
            FlatError::GramIdentityViolation { .. } => "GramIdentityViolation",
            FlatError::NotUnitNorm(_) => "NotUnitNorm",
            FlatError::ExpansionTooLarge { .. } => "ExpansionTooLarge",
            FlatError::NotDissociated { .. } => "NotDissociated",
            FlatError::StabilizationViolated(_) => "StabilizationViolated",
            FlatError::InvalidGramSum { .. } => "InvalidGramSum",
            FlatError::SeriesLengthMismatch { .. } => "SeriesLengthMismatch",
        }
    }
}

pub type Result<T> = std::result::Result<T, FlatError>;
