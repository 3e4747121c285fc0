use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The CLI maps these onto exit codes: input-like errors exit 2, resource
/// caps exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("infeasible cover: point {point} has positive demand but lies in no ball")]
    Infeasible { point: usize },

    #[error(
        "no crossing of threshold inside [{lo}, {hi}]: log-objective - log-threshold is {f_lo} at {lo} and {f_hi} at {hi}"
    )]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("ball B_{n}(x={point}) has zero measure; restrict the computation to the measure's support")]
    DegenerateMeasure { point: usize, n: usize },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("internal consistency violated: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
