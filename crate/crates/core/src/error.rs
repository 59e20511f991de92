use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("crossing search resolution too coarse near {near}: refine the grid")]
    Resolution { near: f64 },

    #[error("degenerate crossing at {y}: |delta'| = {slope:.3e}")]
    DegenerateCrossing { y: f64, slope: f64 },

    #[error("both curvatures vanish at crossing {y}")]
    UnsupportedCurvature { y: f64 },

    #[error("operation requires the {expected} regime")]
    Regime { expected: &'static str },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("optimizer restarts disagree: objective spread {spread:.3e}")]
    Optimization { spread: f64 },

    #[error("no training support endpoint on the {side} of {x}")]
    EmptyTail { side: &'static str, x: f64 },

    #[error("tail rule applied at {x} where a density estimate is nonzero")]
    NotInTail { x: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("regression needs at least two distinct abscissae")]
    DegenerateRegression,
}

pub type Result<T> = std::result::Result<T, Error>;
