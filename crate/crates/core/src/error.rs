use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("radius exhausted at {achieved}: distance is at least {lower_bound}")]
    RadiusExhausted { achieved: u32, lower_bound: u32 },

    #[error("ball budget exceeded at radius {radius} ({elements} elements, cap {cap})")]
    BallBudget { radius: u32, elements: usize, cap: usize },

    #[error("support blow-up at convolution order {order}: {size} atoms exceeds cap {cap}")]
    SupportBlowup { order: u32, size: usize, cap: usize },

    #[error("measure is not admissible at horizon {horizon}: {unreachable} is unreachable")]
    NotAdmissible { horizon: u32, unreachable: String },

    #[error("no peripheral structure: {0}")]
    NoPeripherals(String),

    #[error("torsion element: {0}")]
    Torsion(String),

    #[error("element is not loxodromic-like: {0}")]
    NotLoxodromic(String),

    #[error("degenerate boundary ray pair: {0}")]
    DegenerateRays(String),

    #[error("horizon too small: need at least {needed}, got {got}")]
    HorizonTooSmall { needed: u32, got: u32 },

    #[error("point outside working ball: {0}")]
    OutsideBall(String),

    #[error("iteration failed to converge: residual {residual:.3e} after {iterations} steps")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
