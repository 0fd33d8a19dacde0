use std::fmt;

use thiserror::Error;

use crate::model::Cell;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("grid size {0}x{1} outside the supported 2..=8 range")]
    GridSize(usize, usize),
    #[error("cell {0} lies outside the grid")]
    OutOfGrid(Cell),
    #[error("start cell {0} is blocked")]
    BlockedStart(Cell),
    #[error("cell {0} holds more than one element")]
    Overlap(Cell),
    #[error("cells {0} and {1} are not adjacent")]
    NotAdjacent(Cell, Cell),
    #[error("invalid goal: {0}")]
    Goal(String),
    #[error("invalid constraint set: {0}")]
    Constraint(String),
    #[error("repeat count {0} outside 2..=5")]
    RepeatCount(u8),
    #[error("repeat body is empty")]
    EmptyRepeat,
}

/// A syntax error in program text, with 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{line}:{column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(#[from] ModelError),
    #[error("{0}")]
    Schema(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the reason.
        let message = match message.rfind(" at line ") {
            Some(idx) => message[..idx].to_string(),
            None => message,
        };
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CspError {
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("constraint `{name}` refers to unknown variable index {index}")]
    UnknownVariable { name: String, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no start pose keeps the code on a {rows}x{cols} grid")]
    Exhaustion { rows: usize, cols: usize },
    #[error("element placement failed after {0} attempts")]
    Placement(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("minimality search space of {0} programs exceeds the budget")]
    BudgetExceeded(u64),
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("reference code does not solve the reference task")]
    InvalidReference,
    #[error("reference task is malformed: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Value(String),
}
