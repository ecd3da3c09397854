use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("cannot parse label `{0}`")]
    BadLabel(String),
    #[error("state {state} already has a transition on `{label}`")]
    Nondeterministic { state: usize, label: String },
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("invalid execution: {0}")]
    InvalidExecution(String),
    #[error("invalid MSC: {0}")]
    InvalidMsc(String),
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unbound recursion variable `{name}` at {line}:{col}")]
    UnboundVariable { name: String, line: usize, col: usize },
    #[error("self-send `{label}` at {line}:{col}")]
    SelfSend { label: String, line: usize, col: usize },
    #[error("process `{0}` is not in the declared process universe")]
    UnknownProcess(String),
    #[error("MSC is not synchronous: {0}")]
    NotSynchronous(String),
    #[error("global type is not commutation-closed: from state {state}, `{first}` then `{second}` differs from the swapped order")]
    NotCommutationClosed {
        state: usize,
        first: String,
        second: String,
    },
    #[error(
        "global type is not commutation-deterministic: state {state} offers commuting arrows `{first}` and `{second}`"
    )]
    NotCommutationDeterministic {
        state: usize,
        first: String,
        second: String,
    },
    #[error("global type is not realisable with synchronous communication: the projections produce {witness}, which it lacks")]
    NotSynchronouslyRealisable { witness: String },
    #[error("model {model} is not supported here: {reason}")]
    UnsupportedModel { model: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed textual input.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnboundVariable { .. }
                | Error::SelfSend { .. }
                | Error::BadLabel(_)
                | Error::Json(_)
                | Error::InvalidAutomaton(_)
                | Error::InvalidMsc(_)
                | Error::UnknownSymbol(_)
                | Error::Nondeterministic { .. }
                | Error::UnknownProcess(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
