use std::fmt;

use thiserror::Error;

use crate::structure::Diagnostic;

/// An implementation budget was exceeded. The underlying question is still
/// well-defined; it is just too large to decide here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("entailment over {atoms} atoms exceeds the limit of {limit}")]
    EntailmentAtoms { atoms: usize, limit: usize },
    #[error("goal base with {goals} goals exceeds the limit of {limit}")]
    GoalBase { goals: usize, limit: usize },
    #[error("strategy enumeration exceeded the guard of {guard} profiles")]
    StrategyGuard { guard: u64 },
}

/// A syntax or resolution error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("invalid game structure:\n{}", render_diagnostics(.0))]
    InvalidModel(Vec<Diagnostic>),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("agent `{0}` has no capability assignment")]
    NotBdiAgent(String),
    #[error("agent `{0}` has no goal base in this assignment")]
    NoGoalBase(String),
    #[error("priority semantics requires a priority order for agent `{0}`")]
    MissingPriority(String),
    #[error("conflicting transitions from `{state}` on {joint}")]
    ConflictingTransition { state: String, joint: String },
    #[error("ill-formed formula: {0}")]
    IllFormed(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("index {index} outside trace of length {len}")]
    TraceIndex { index: usize, len: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  - {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}
