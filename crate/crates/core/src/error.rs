use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, evaluation and parsing routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was handed values that violate its
    /// preconditions (non-finite samples, empty data, out-of-range params).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Phase is undefined because a response sample has zero magnitude.
    #[error("singular sample at {freq_hz} Hz: zero-magnitude response, phase undefined")]
    SingularSample { freq_hz: f64 },

    /// Adjacent samples are too far apart in phase for an unambiguous unwrap.
    #[error("grid too coarse near {freq_hz} Hz: adjacent phase step reaches pi, unwrap ambiguous")]
    UnwrapAmbiguous { freq_hz: f64 },

    /// Degenerate resonance of an uncoupled lossless loop (|C| = 0 with
    /// the loop exactly on resonance at a grid sample).
    #[error("model singularity at {freq_hz} Hz: uncoupled lossless loop is exactly resonant")]
    ModelSingularity { freq_hz: f64 },

    /// A requested value lies outside the span that the data can support.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A scan or search did not find what it was looking for.
    #[error("not found: {0}")]
    NotFound(String),

    /// Quadrature or iterative refinement failed to reach its tolerance.
    #[error("did not converge: requested {requested:e}, achieved {achieved:e}")]
    NoConvergence { requested: f64, achieved: f64 },

    /// A run configuration is internally inconsistent (e.g. a time step that
    /// cannot represent the delay lines of a transient run).
    #[error("configuration error: {0}")]
    Config(String),

    /// Touchstone text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
