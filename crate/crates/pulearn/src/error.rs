use std::path::PathBuf;

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes: configuration and domain errors are
/// usage problems (exit 1), input errors are data problems (exit 2), and
/// numeric or contract errors are computation failures (exit 3).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration value (hyperparameter, grid step, method name).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// I/O failure on a named path.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A cell could not be parsed as a number.
    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    /// Structurally inconsistent input (column count mismatch, empty file).
    #[error("schema error: {0}")]
    Schema(String),

    /// Non-finite values or a diverging computation.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Caller violated an internal contract (mismatched grids, lengths).
    #[error("contract error: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
