use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed system description text.
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },

    /// Well-formed text describing an impossible level (p <= 1, empty or duplicated digits).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("level {level} is not admissible: {reason}")]
    NotAdmissible { level: usize, reason: String },

    #[error("level {level} is not defined by this system (it has {available} levels)")]
    LevelOutOfRange { level: usize, available: usize },

    #[error("atoms of mu_{level} collide; the system is ill-posed")]
    AtomCollision { level: usize },

    #[error("spectrum points of level {level} collide; an admissibility assumption is violated")]
    SpectrumCollision { level: usize },

    #[error("cardinality mismatch: #D = {digits}, #L = {companions}")]
    CardinalityMismatch { digits: usize, companions: usize },

    #[error("no exact zero-set description for digit set {0:?}")]
    UnsupportedDigits(Vec<u64>),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
