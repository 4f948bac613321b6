//! Crate-wide error type.

use crate::lattice::GridSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid functions live on different grids: {left} vs {right}")]
    SpecMismatch { left: GridSpec, right: GridSpec },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("quadratic form is negative beyond tolerance: (Su,u) = {form:e}")]
    NotNonnegative { form: f64 },

    #[error("solver hit the iteration limit after {iterations} iterations, relative residual {residual:e}")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("numerical breakdown in solver at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },

    #[error("power iteration did not converge within {iterations} iterations")]
    PowerIterationStalled { iterations: usize },

    #[error("mode index ({k1},{k2}) out of range for grid with interior {n1}x{n2}")]
    ModeOutOfRange {
        k1: usize,
        k2: usize,
        n1: usize,
        n2: usize,
    },

    #[error("dense check dimension {dim} exceeds cap {cap}")]
    DenseDimensionTooLarge { dim: usize, cap: usize },

    #[error("stability condition violated: quadratic form {form:e} below -{tolerance:e}")]
    StabilityViolation { form: f64, tolerance: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach the time-level index at which a stepping error occurred.
    pub fn at_level(self, level: usize) -> Error {
        Error::AtLevel {
            level,
            source: Box::new(self),
        }
    }

    /// Process exit code for the CLI: 2 config, 3 solver, 4 instability.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::InvalidGrid(_) | Error::InvalidCoefficient(_) => 2,
            Error::IterationLimit { .. }
            | Error::NumericalBreakdown { .. }
            | Error::PowerIterationStalled { .. } => 3,
            Error::StabilityViolation { .. } => 4,
            Error::AtLevel { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
