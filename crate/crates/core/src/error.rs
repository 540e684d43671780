use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by [`ErrorFamily`] so that frontends can map them to
/// stable exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("operands live in different rings: {0}")]
    VariableMismatch(String),
    #[error("substituted jet {index} has a nonzero constant term")]
    SubstitutionConstantTerm { index: usize },
    #[error("operation needs a nonzero element")]
    ZeroElement,
    #[error("input is a truncated jet, not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("divisor {index} is zero")]
    ZeroDivisor { index: usize },
    #[error("norm certificate unavailable: {0}")]
    NotCertifiable(String),
    #[error("truncation degree too small: {0}")]
    TruncationTooSmall(String),
    #[error("no determinacy degree detected below the truncation degree {0}")]
    NotDetectable(u32),
    #[error("singularity is not isolated below the truncation degree: {0}")]
    NotIsolated(String),
    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("right-hand side is nonzero but all coefficient vectors vanish")]
    RankDeficientInput,
    #[error("input is a unit (nonzero constant term)")]
    UnitInput,
    #[error("input must lie in the square of the maximal ideal")]
    OrderTooLow,
    #[error("not a complete intersection: {0}")]
    NotCompleteIntersection(String),
    #[error("coefficient hook failed: {0}")]
    HookFailure(String),
    #[error("state is not a solution of the stated order: {0}")]
    NotASolution(String),
    #[error("extension oracle failed at degree {degree}: {reason}")]
    OracleFailure { degree: u32, reason: String },
    #[error("determinacy hypothesis violated: {0}")]
    HypothesisFailure(String),
    #[error("not an unfolding: {0}")]
    NotAnUnfolding(String),
    #[error("not a deformation: {0}")]
    NotADeformation(String),
    #[error("lift failed: {0}")]
    LiftFailure(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{name}` at line {line}, column {column}")]
    UnknownVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("coefficient `{0}` is not an element of the field")]
    CoefficientNotInField(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Input,
    Arithmetic,
    Truncation,
    LinearSystem,
    Shape,
    Solver,
}

impl Error {
    pub fn family(&self) -> ErrorFamily {
        use Error::*;
        match self {
            InvalidField(_)
            | SyntaxError { .. }
            | UnknownVariable { .. }
            | CoefficientNotInField(_)
            | InvalidInput(_) => ErrorFamily::Input,
            DivisionByZero
            | VariableMismatch(_)
            | SubstitutionConstantTerm { .. }
            | ZeroElement
            | ZeroDivisor { .. } => ErrorFamily::Arithmetic,
            TruncationTooSmall(_) | NotDetectable(_) | NotIsolated(_) => ErrorFamily::Truncation,
            Inconsistent(_) | RankDeficientInput => ErrorFamily::LinearSystem,
            UnitInput
            | OrderTooLow
            | NotCompleteIntersection(_)
            | NotAnUnfolding(_)
            | NotADeformation(_)
            | NotPolynomial(_) => ErrorFamily::Shape,
            NotCertifiable(_)
            | HookFailure(_)
            | NotASolution(_)
            | OracleFailure { .. }
            | HypothesisFailure(_)
            | LiftFailure(_) => ErrorFamily::Solver,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
