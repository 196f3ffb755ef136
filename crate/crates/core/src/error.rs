use std::fmt;

use num_complex::Complex64;

/// Diagnostics attached to a failed or unverifiable eigensolve.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDiagnostics {
    pub dim: usize,
    pub frobenius_norm: f64,
    pub max_abs_entry: f64,
    /// Worst relative residual `‖Av − λv‖ / ‖A‖` seen, when the solver returned pairs.
    pub worst_residual: Option<f64>,
    pub detail: String,
}

impl fmt::Display for EigenDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim={} ‖A‖_F={:.3e} max|a_ij|={:.3e}", self.dim, self.frobenius_norm, self.max_abs_entry)?;
        if let Some(res) = self.worst_residual {
            write!(f, " worst residual={res:.3e}")?;
        }
        write!(f, " ({})", self.detail)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("constant spectrum")]
    ConstantSpectrum,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("pole: lambda = {lambda} coincides with eigenvalue {mu}")]
    Pole { lambda: Complex64, mu: f64 },

    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(f64),

    #[error("relative compactness not guaranteed: tail exponent {exponent} >= -1")]
    DivergentTail { exponent: f64 },

    #[error("eigensolver failed: {0}")]
    EigenSolve(EigenDiagnostics),

    #[error("singular resolvent solve at lambda = {0}: on spectrum of T_r + B")]
    OnSpectrum(Complex64),

    #[error("zero or pole on contour ({points} points, last segment near {near})")]
    DegenerateContour { points: usize, near: Complex64 },

    #[error("winding not integral: {turns} turns")]
    NonIntegralWinding { turns: f64 },

    #[error("quadrature too coarse: trace {trace} is {distance:.3} away from an integer")]
    QuadratureTooCoarse { trace: f64, distance: f64 },

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("no admissible rectangle at truncation: R = {radius:.3e} (max sampled value {max_value:.3e})")]
    NoAdmissibleRectangle { radius: f64, max_value: f64 },

    #[error("theorem hypothesis violated: gamma = {0} >= 1")]
    HypothesisViolated(f64),

    #[error("sample lambda = {0} lies inside the parabola")]
    InsideParabola(Complex64),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
