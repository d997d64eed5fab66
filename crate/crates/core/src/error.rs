use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh carries no pattern (texture) coordinates")]
    PatternMissing,

    #[error("edge ({0}, {1}) has more than two incident faces")]
    NonManifold(usize, usize),

    #[error("face {0} is degenerate in pattern space")]
    DegenerateFace(usize),

    #[error("index {index} out of range for {what} (len {len})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid barycentric coordinates {0:?}")]
    InvalidBarycentric([f64; 3]),

    #[error("edge {0} crosses pattern pieces")]
    SeamEdge(usize),

    #[error("motion data does not match mesh: {0}")]
    MotionMismatch(String),

    #[error("invalid terminal set: {0}")]
    InvalidTerminals(String),

    #[error("terminals lie in disconnected components: {components:?}")]
    DisconnectedTerminals { components: Vec<Vec<usize>> },

    #[error("{terminals} terminals exceed the exact solver cap of {cap}")]
    TerminalCapExceeded { terminals: usize, cap: usize },

    #[error("exact solver table needs {needed} bytes, budget is {budget}")]
    MemoryBudgetExceeded { needed: usize, budget: usize },

    #[error("brute-force oracle limited to {cap} edges, graph has {edges}")]
    OracleTooLarge { edges: usize, cap: usize },

    #[error("no admissible fillet at corner {corner} of the branch")]
    CannotSatisfyCurvature { corner: usize },

    #[error("curve sample ({0}, {1}) lies outside every pattern face")]
    EmbeddingFailure(f64, f64),

    #[error("mesh topology mismatch: {0}")]
    Topology(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors raised by the tree solver or the smoother rather than
    /// by input validation.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::DisconnectedTerminals { .. }
                | Error::TerminalCapExceeded { .. }
                | Error::MemoryBudgetExceeded { .. }
                | Error::OracleTooLarge { .. }
                | Error::CannotSatisfyCurvature { .. }
                | Error::EmbeddingFailure(..)
        )
    }
}
