use thiserror::Error;

/// Errors raised by model evaluation and scenario handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cell index ({ix}, {iy}) outside a {n}x{n} grid")]
    CellOutOfRange { ix: usize, iy: usize, n: usize },

    #[error("negative model input `{name}` = {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("length-to-breadth ratio {0} is below 1")]
    RatioBelowOne(f64),

    #[error("degenerate front: neighbours of vertex {0} coincide")]
    DegenerateFront(usize),

    #[error("vertex count mismatch: {0} vs {1}")]
    VertexCountMismatch(usize, usize),

    #[error("empty action set")]
    EmptyActionSet,

    #[error("invalid planner configuration: {0}")]
    PlannerConfig(String),

    #[error("invalid controller `{0}`")]
    Controller(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
