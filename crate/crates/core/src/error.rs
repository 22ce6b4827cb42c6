use thiserror::Error;

/// Errors produced by automaton construction, compilation and file handling.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("incompatible numeration base: {0} vs {1}")]
    IncompatibleBase(u32, u32),

    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u32),

    #[error("incompatible digit order: operands read {0} and {1}")]
    IncompatibleOrder(&'static str, &'static str),

    #[error("operation requires {expected} digit order")]
    WrongOrder { expected: &'static str },

    #[error("track mismatch: {0:?} vs {1:?}")]
    TrackMismatch(Vec<String>, Vec<String>),

    #[error("unknown track `{0}`")]
    UnknownTrack(String),

    #[error("duplicate track `{0}`")]
    DuplicateTrack(String),

    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("padding length {pad} is shorter than the minimal length {minimal}")]
    PadTooSmall { pad: usize, minimal: usize },

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unbound sequence `{0}`")]
    UnboundSequence(String),

    #[error("unbound predicate `{0}`")]
    UnboundPredicate(String),

    #[error("predicate `{name}` expects {expected} arguments, got {got}")]
    PredicateArity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("variable `{0}` is already bound by an enclosing quantifier")]
    Shadowed(String),

    #[error("kernel probe length insufficient: {0}")]
    KernelProbeInsufficient(String),

    #[error("malformed automaton file at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("zero-stability violated: state {state} changes output on digit 0")]
    ZeroStability { state: usize },

    #[error("invalid automaton: {0}")]
    Invalid(String),

    #[error("transition matrix row {row} sums to {sum}, expected {base}")]
    RowSum { row: usize, sum: u64, base: u32 },

    #[error("length slack must be 0, 1 or 2, got {0}")]
    InvalidSlack(u32),

    #[error("cache i/o: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
