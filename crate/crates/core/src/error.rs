use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("field context mismatch: {left} vs {right}")]
    ContextMismatch { left: String, right: String },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("budget exceeded for {what}: needed {needed}, limit {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("equation has no solution: {0}")]
    NoSolution(String),

    #[error("empty support")]
    EmptySupport,

    #[error("support contains the exponent 0")]
    ZeroInSupport,

    #[error("zero series")]
    ZeroSeries,

    #[error("series is a constant")]
    ConstantSeries,

    #[error("operation requires e = 0, got e = {0}")]
    NonzeroValuation(u32),

    #[error("truncation too small: need at least {needed}, have {have}")]
    TruncTooSmall { needed: usize, have: usize },

    #[error("not a coordinate change: {0}")]
    InvalidCoordChange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no elimination shift reaches exponent {target} in {state}")]
    NoEliminationShift { target: usize, state: String },

    #[error("bound violated for {delta:?}: #Lambda = {count} > {bound}")]
    BoundViolation {
        delta: Vec<u64>,
        count: usize,
        bound: u64,
    },

    #[error("Milnor number is infinite (e = {0})")]
    InfiniteMilnor(u32),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("duplicate exponent {0}")]
    DuplicateExponent(usize),

    #[error("unknown symbol '{symbol}' at {pos}")]
    UnknownSymbol { pos: usize, symbol: char },

    #[error("coefficient outside the field: {0}")]
    OutsideField(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command line front end: 2 for budget and
    /// input errors, 1 for mathematical precondition failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. }
            | Error::Parse { .. }
            | Error::DuplicateExponent(_)
            | Error::UnknownSymbol { .. }
            | Error::OutsideField(_)
            | Error::InvalidModulus(_)
            | Error::NotPrime(_) => 2,
            _ => 1,
        }
    }
}
