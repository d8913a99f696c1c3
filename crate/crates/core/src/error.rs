use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid environment spec: {0}")]
    InvalidSpec(String),

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("kappa bracket failed at s = {s} (E[rho^s] = {value})")]
    BracketFailure { s: f64, value: f64 },

    #[error("walk exceeded max_steps after {steps} steps")]
    MaxStepsExceeded { steps: u64 },

    #[error("branching count overflow at x = {x}")]
    Overflow { x: usize },

    #[error("kernel row {i} did not converge before j = {j_max}")]
    TailNotConverged { i: u64, j_max: usize },

    #[error("regime mismatch: operation requires {required}, spec is {found}")]
    Regime { required: &'static str, found: String },

    #[error("no candidate M has a visited level (N_n^1 = 0)")]
    EmptyRange,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
