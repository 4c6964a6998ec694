use crate::C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, QnlsError>;

#[derive(Debug, Error)]
pub enum QnlsError {
    #[error("nonlocal integrand has nonzero mean {mean} (strict mean policy)")]
    NonzeroMean { mean: C64 },

    #[error("blowup at t={t}: max |sample| = {max_abs}")]
    Blowup { t: f64, max_abs: f64 },

    #[error("under-resolved field at t={t}: spectral tail ratio {tail_ratio:.3e}")]
    Resolution { t: f64, tail_ratio: f64 },

    #[error("Frenet frame degenerate at sample {index}: curvature {kappa:.3e}")]
    FrameDegeneracy { index: usize, kappa: f64 },

    #[error("curve is not unit speed: max | |r_x| - 1 | = {max_dev:.3e}")]
    NonUnitSpeed { max_dev: f64 },

    #[error("degenerate tangent data at sample {index}")]
    DegenerateTangent { index: usize },

    #[error("need at least {need} snapshots, got {got}")]
    TooFewSnapshots { need: usize, got: usize },

    #[error("algebra tag mismatch: {left:?} vs {right:?}")]
    TagMismatch {
        left: crate::AlgebraTag,
        right: crate::AlgebraTag,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl QnlsError {
    /// Errors that come from the numerics rather than from the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QnlsError::NonzeroMean { .. }
                | QnlsError::Blowup { .. }
                | QnlsError::Resolution { .. }
                | QnlsError::FrameDegeneracy { .. }
                | QnlsError::NonUnitSpeed { .. }
                | QnlsError::DegenerateTangent { .. }
        )
    }
}
