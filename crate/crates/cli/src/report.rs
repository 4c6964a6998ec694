//! `qnls report`: re-summarize an output directory.

use crate::failure::Failure;
use crate::simulate::{summarize, RunSummary};
use anyhow::{bail, Context};
use qnls::io;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DirReport {
    Trajectory(RunSummary),
    Sweep { rows: usize, status_counts: BTreeMap<String, usize>, max_hamiltonian_drift: Option<f64> },
}

pub fn report(dir: &Path) -> Result<DirReport, Failure> {
    let rep = if dir.join("meta.json").is_file() && dir.join("monitors.csv").is_file() {
        let (traj, meta) = io::read_trajectory(dir)?;
        DirReport::Trajectory(summarize(&traj, meta.chi.unwrap_or(0.0))?)
    } else if dir.join("summary.csv").is_file() {
        sweep_report(&dir.join("summary.csv"))?
    } else {
        return Err(Failure::Other(anyhow::anyhow!(
            "{} holds neither a trajectory nor a sweep summary",
            dir.display()
        )));
    };
    io::write_json(&dir.join("report.json"), &rep)?;
    Ok(rep)
}

fn sweep_report(path: &Path) -> anyhow::Result<DirReport> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let (Some(status), Some(drift)) = (
        headers.iter().position(|h| h == "status"),
        headers.iter().position(|h| h == "hamiltonian_drift"),
    ) else {
        if headers.is_empty() {
            return Ok(DirReport::Sweep { rows: 0, status_counts: BTreeMap::new(), max_hamiltonian_drift: None });
        }
        bail!("{} is not a sweep summary", path.display());
    };
    let mut counts = BTreeMap::new();
    let mut rows = 0;
    let mut worst: Option<f64> = None;
    for rec in rdr.records() {
        let rec = rec?;
        rows += 1;
        *counts.entry(rec[status].to_string()).or_insert(0) += 1;
        if let Ok(d) = rec[drift].parse::<f64>() {
            worst = Some(worst.map_or(d, |w| w.max(d)));
        }
    }
    Ok(DirReport::Sweep { rows, status_counts: counts, max_hamiltonian_drift: worst })
}
