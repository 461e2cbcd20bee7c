use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown generator `{name}` at line {line}, column {col}")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("{0} is not a prime (or exceeds 65536)")]
    InvalidPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("action matrix {0} is singular or not square")]
    SingularAction(usize),
    #[error("enumeration did not close within {max_cosets} cosets")]
    NotClosed { max_cosets: usize },
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("word does not lie in the subgroup")]
    NotInSubgroup,
    #[error("functional at chain step {step} is not invariant under the group action")]
    NonInvariantFunctional { step: usize },
    #[error("degenerate quotient: {0}")]
    DegenerateQuotient(String),
    #[error("cannot certify finiteness of p-quotient tower: {0}")]
    CannotCertify(String),
    #[error("group too large: {0}")]
    GroupTooLarge(String),
    #[error("minimal generating set search gave up: {0}")]
    GeneratorSearchExhausted(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

impl Error {
    /// Process exit code for the command-line tool: 1 for bad input, 2 for
    /// resource exhaustion where an exact answer was demanded, 3 for broken
    /// internal invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotClosed { .. }
            | Error::CannotCertify(_)
            | Error::GroupTooLarge(_)
            | Error::GeneratorSearchExhausted(_) => 2,
            Error::Integrity(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
