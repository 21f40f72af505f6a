use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be odd, got {0}")]
    EvenModulus(u64),
    #[error("modulus {0} exceeds 2^31")]
    ModulusTooLarge(u64),
    #[error("residue {0} has no inverse")]
    ZeroInverse(u32),
    #[error("operands live in different fields (p={0} vs p={1})")]
    ContextMismatch(u32, u32),
    #[error("requested {requested} elements but only {available} are available")]
    SpecTooLarge { requested: u64, available: u64 },
    #[error("bad geometric base {base}: {reason}")]
    BadBase { base: u32, reason: &'static str },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("matrix ({0} {1}; {2} {3}) is singular")]
    SingularMatrix(u32, u32, u32, u32),
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("resource limit: {what} needs {needed}, cap is {cap}")]
    ResourceLimit { what: &'static str, needed: u128, cap: u128 },
    #[error("weight function is not normalized: {0}")]
    NotNormalized(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("algorithm {algo} is not available for {op}")]
    UnsupportedAlgorithm { op: &'static str, algo: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
