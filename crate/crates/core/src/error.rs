use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("empty sample")]
    EmptySample,

    /// The top order statistics are all equal, so the Hill sum vanishes.
    #[error("degenerate tail: top {k} order statistics are identical")]
    DegenerateTail { k: usize },

    #[error("divergent moment: order {order} does not exist for tail index {tail_mu}")]
    DivergentMoment { order: f64, tail_mu: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The relation between Pareto indices only holds for mu_F > 1.
    #[error("outside the theory's validity: {0}")]
    OutOfTheory(String),

    #[error("distribution is not normalizable: {0}")]
    Normalizability(String),

    #[error("{0} has no density")]
    NoDensity(&'static str),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate}, error {error:e} after {evals} evaluations")]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
        evals: usize,
    },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("schema error in {path}: {msg}")]
    Schema { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
