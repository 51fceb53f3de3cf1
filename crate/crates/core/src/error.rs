use thiserror::Error;

/// Unified error type. Every variant carries a stable machine-readable name
/// (see [`Error::name`]) used by the CLI JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    InvalidPrime(u64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("level too large: {0}")]
    LevelTooLarge(String),
    #[error("tower has no group structure")]
    NoGroupStructure,
    #[error("bad level order: {0} < {1}")]
    BadLevelOrder(u32, u32),
    #[error("bad element: {0}")]
    BadElement(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("scalar or entry not integral")]
    NotIntegral,
    #[error("tower mismatch")]
    TowerMismatch,
    #[error("index mismatch: {0} vs {1}")]
    IndexMismatch(usize, usize),
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("bad lattice: {0}")]
    BadLattice(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("representation is not unitary")]
    NotUnitary,
    #[error("duality check failed: {0}")]
    TheoremCheckFailed(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable identifier for machine consumption.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidPrime(_) => "InvalidPrime",
            Error::PrimeMismatch(_, _) => "PrimeMismatch",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NotAGroup(_) => "NotAGroup",
            Error::LevelTooLarge(_) => "LevelTooLarge",
            Error::NoGroupStructure => "NoGroupStructure",
            Error::BadLevelOrder(_, _) => "BadLevelOrder",
            Error::BadElement(_) => "BadElement",
            Error::LevelMismatch(_, _) => "LevelMismatch",
            Error::NotIntegral => "NotIntegral",
            Error::TowerMismatch => "TowerMismatch",
            Error::IndexMismatch(_, _) => "IndexMismatch",
            Error::NotARepresentation(_) => "NotARepresentation",
            Error::BadLattice(_) => "BadLattice",
            Error::NotASubgroup(_) => "NotASubgroup",
            Error::SingularMatrix => "SingularMatrix",
            Error::NotUnitary => "NotUnitary",
            Error::TheoremCheckFailed(_) => "TheoremCheckFailed",
            Error::ParseError(_) => "ParseError",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
