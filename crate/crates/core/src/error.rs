use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generation {generation} exceeds the supported maximum {max}")]
    GenerationTooLarge { generation: u32, max: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sigma rule {rule} is not compatible with domain family {family}")]
    IncompatibleRule { rule: String, family: String },

    #[error("mesh would need about {projected} vertices; the budget is {budget}")]
    SizeExceeded { projected: usize, budget: usize },

    #[error("triangle {triangle} has an angle of {angle_deg:.4} degrees")]
    NonobtuseViolation { triangle: usize, angle_deg: f64 },

    #[error("point ({x}, {y}) lies outside the mesh")]
    PointOutside { x: f64, y: f64 },

    #[error("Robin parameter must be positive and finite, got {0}")]
    InvalidRobinParameter(f64),

    #[error(
        "{method} did not converge after {iterations} iterations (relative residual {residual:e})"
    )]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("system is not an M-matrix: entry ({row}, {col}) = {value:e}")]
    NotMMatrix { row: usize, col: usize, value: f64 },

    #[error("a trajectory exceeded the cap of {cap} steps")]
    CapExceeded { cap: u64 },

    #[error("insufficient data: need at least {needed}, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
