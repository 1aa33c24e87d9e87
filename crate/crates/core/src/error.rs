use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be an odd prime no larger than {1}")]
    InvalidModulus(u64, u32),
    #[error("coordinate ({x}, {y}) out of range for p = {p}")]
    CoordinateOutOfRange { x: i64, y: i64, p: u32 },
    #[error("zero weight at ({x}, {y}): the support must equal the key set")]
    ZeroWeight { x: u32, y: u32 },
    #[error("zero denominator at ({x}, {y})")]
    ZeroDenominator { x: u32, y: u32 },
    #[error("duplicate entry at ({x}, {y})")]
    DuplicateEntry { x: u32, y: u32 },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("empty support")]
    EmptySupport,
    #[error("equal points define no direction")]
    EqualPoints,
    #[error("singular matrix: determinant is 0 mod {0}")]
    SingularMatrix(u32),
    #[error("no admissible denominator Q <= {0}")]
    NoAdmissibleDenominator(u64),
    #[error("support has {got} points, expected {expected}")]
    WrongSupportSize { got: usize, expected: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("infeasible search: {0}")]
    InfeasibleSearch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
