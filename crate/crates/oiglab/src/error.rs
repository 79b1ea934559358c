use std::fmt;

/// Errors surfaced by the library.
///
/// The CLI maps these onto process exit codes: `Config` and `Input`/`Parse`
/// exit 2, `Capacity` exits 3, everything else exits 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated an operation's precondition (length mismatch,
    /// out-of-range index, ...).
    Input(String),
    /// A class file could not be parsed; `line` is 1-based.
    Parse { line: usize, msg: String },
    /// The experiment or rule configuration is inconsistent.
    Config(String),
    /// The requested exhaustive computation is too large for this build.
    Capacity(String),
    /// The training labels are not realizable by the hypothesis class.
    Realizability(String),
    /// A rule could not construct an orientation for the queried subset.
    Construction(String),
    /// An internal invariant was violated; this signals a bug, not bad input.
    Internal(String),
    /// An I/O failure, annotated with the path involved.
    Io { path: String, msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::Realizability(msg) => write!(f, "labels not realizable: {msg}"),
            Error::Construction(msg) => write!(f, "orientation construction failed: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
            Error::Io { path, msg } => write!(f, "I/O error on {path}: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
