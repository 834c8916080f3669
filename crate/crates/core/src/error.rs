use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations (matrix norm {norm:e})")]
    NoConvergence { norm: f64, iterations: usize },

    #[error("singular system: pivot {pivot:e} below threshold {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("evaluation at a live pole (argument {arg})")]
    Pole { arg: f64 },

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("convexity assumption violated at {arg}: second derivative {second:e}")]
    Convexity { arg: f64, second: f64 },

    #[error("no sign change found to the right of {left} (last probe {last_probe:e})")]
    Divergence { left: f64, last_probe: f64 },

    #[error("internal contradiction: {0}")]
    Contradiction(String),

    #[error("pencil M2 is only defined for p = 3 (got p = {0})")]
    UnsupportedExponent(f64),

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("instance generation failed after {rejections} rejections")]
    Generation { rejections: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
