use super::ast::Sort;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("sort mismatch in `{context}`: expected {expected}, found {found}")]
    SortMismatch {
        context: String,
        expected: Sort,
        found: Sort,
    },
    #[error("duplicate stream name `{0}`")]
    DuplicateStream(String),
    #[error("zero-offset dependency cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("stream `{stream}` references a future offset {offset}")]
    FutureOffset { stream: String, offset: i64 },
    #[error("invalid offset on `{stream}`: {message}")]
    InvalidOffset { stream: String, message: String },
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}
