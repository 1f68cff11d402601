use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature for f_{m} did not converge within {max_depth} refinements")]
    QuadratureNotConverged { m: usize, max_depth: u32 },

    #[error("separation m = {0} is not supported here")]
    UnsupportedSeparation(usize),

    #[error("pairing enumeration for m = {0} exceeds the complexity cap (m <= 8)")]
    ComplexityCap(usize),

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("chain of {sites} sites exceeds the dense diagonalization budget (N <= {max})")]
    BudgetExceeded { sites: usize, max: usize },

    #[error("derivative range has only {0} interior points (need at least 5)")]
    DegenerateRange(usize),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),

    #[error("at (T = {temperature}, h = {field}, m = {separation}): {source}")]
    AtPoint {
        temperature: f64,
        field: f64,
        separation: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
