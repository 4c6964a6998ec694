use crate::config::ConfigError;
use qnls::QnlsError;
use serde_json::{json, Value};
use std::path::Path;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(QnlsError),
    #[error("{failed} verification check(s) failed")]
    Verify { failed: usize },
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl From<QnlsError> for Failure {
    fn from(e: QnlsError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Other(e.into())
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Verify { .. } | Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        })
    }
}

/// Machine-readable description of a numerical error.
pub fn describe(e: &QnlsError) -> Value {
    let (kind, details) = match e {
        QnlsError::Blowup { t, max_abs } => ("blowup", json!({ "t": t, "max_abs": max_abs })),
        QnlsError::Resolution { t, tail_ratio } => ("resolution", json!({ "t": t, "tail_ratio": tail_ratio })),
        QnlsError::NonzeroMean { mean } => ("nonzero_mean", json!({ "mean": [mean.re, mean.im] })),
        QnlsError::FrameDegeneracy { index, kappa } => {
            ("frame_degeneracy", json!({ "index": index, "kappa": kappa }))
        }
        QnlsError::NonUnitSpeed { max_dev } => ("non_unit_speed", json!({ "max_dev": max_dev })),
        QnlsError::DegenerateTangent { index } => ("degenerate_tangent", json!({ "index": index })),
        _ => ("other", json!({})),
    };
    json!({ "kind": kind, "message": e.to_string(), "details": details })
}

pub fn write_error_json(dir: &Path, e: &QnlsError) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    qnls::io::write_json(&dir.join("error.json"), &describe(e))?;
    Ok(())
}
