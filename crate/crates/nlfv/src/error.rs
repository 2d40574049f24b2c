use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad or inconsistent configuration (unknown keys, out-of-range values).
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was called with arguments violating its preconditions.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The marching formula produced a non-finite value. Usually a CFL
    /// violation or a model whose bounds are wrong.
    #[error("non-finite value at step {step}, cell {cell}")]
    NonFinite { step: u64, cell: usize },
    /// A runtime invariant audit failed (`check` subcommand).
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
