use thiserror::Error;

use crate::frontend::FrontendError;
use crate::syntax::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {0}")]
    UnknownId(String),

    #[error("invalid program:\n{0}")]
    InvalidProgram(ValidationReport),

    #[error("automata are over different alphabets ({0})")]
    AlphabetMismatch(String),

    #[error("{count} primitive tests exceed the limit of {max} ({atoms} atoms); raise it with --max-tests")]
    TooManyTests { count: usize, max: usize, atoms: u128 },

    #[error(transparent)]
    Frontend(#[from] FrontendError),
}
