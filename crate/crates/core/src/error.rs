use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: {msg}")]
    Format { file: String, line: usize, msg: String },

    #[error("unknown region attribute {value} on element {element}")]
    Tagging { element: usize, value: i64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("need more eigenpairs: {count} eigenvalues capture psi = {achieved:.6}, threshold {threshold}")]
    NeedMoreEigenpairs {
        count: usize,
        achieved: f64,
        threshold: f64,
    },

    #[error("not computable at this size: {0}")]
    NotComputable(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("all {0} collocation nodes were rejected (non-positive reluctivity)")]
    AllRejected(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(file: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            file: file.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
