use thiserror::Error;

/// Errors raised across the certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode {mode} (system has {modes} modes)")]
    InvalidMode { mode: usize, modes: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: {required} windows needed at length {length}, budget {budget} (completed lengths up to {completed})")]
    BudgetExceeded {
        length: usize,
        required: u128,
        budget: u64,
        completed: usize,
    },

    #[error("singular path Gram matrix: word {word:?} has a rank-deficient observability matrix at window {window}")]
    SingularGram { word: Vec<usize>, window: usize },

    #[error("degenerate data pair {index}: prefix window norm {norm:e} is below 1e-14")]
    DegeneratePair { index: usize, norm: f64 },

    #[error("inner solver indeterminate at gamma probe {gamma}: {reason}")]
    Indeterminate { gamma: f64, reason: String },

    #[error("parameters infeasible: {0}")]
    ParameterInfeasible(String),

    #[error("degenerate horizon: T = k leaves no room between start and end windows")]
    DegenerateHorizon,

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
