use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("register width {requested} exceeds the {max}-qubit cap")]
    TooManyQubits { requested: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle misuse: {0}")]
    Oracle(String),

    #[error("width mismatch: {0}")]
    WidthMismatch(String),

    #[error("malformed function table: {0}")]
    MalformedTable(String),

    #[error("adversary issued more than {limit} queries")]
    QueryBudgetExceeded { limit: usize },

    #[error("selective game: guess message {guessed} differs from committed {committed}")]
    SelectiveMismatch { committed: u64, guessed: u64 },

    #[error("game protocol: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, Error>;
