use crate::config::RunConfig;
use crate::failure::{write_error_json, Failure};
use anyhow::Context;
use qnls::integrator::{conservation_report, evolve, ConservationReport};
use qnls::{io, laxpair, Trajectory};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub system: String,
    pub snapshots: usize,
    pub t_final: f64,
    pub final_max_abs: f64,
    pub conservation: ConservationReport,
    /// Zero-curvature residual over the stored snapshots, when defined.
    pub lax_residual: Option<f64>,
}

pub fn summarize(traj: &Trajectory, chi: f64) -> qnls::Result<RunSummary> {
    let lax_residual = laxpair::zero_curvature_trajectory(traj, chi, None).ok().map(|r| r.residual_l2);
    Ok(RunSummary {
        system: traj.system.name().to_string(),
        snapshots: traj.snapshots.len(),
        t_final: *traj.times.last().unwrap_or(&0.0),
        final_max_abs: traj.final_state().max_abs(),
        conservation: conservation_report(traj)?,
        lax_residual,
    })
}

/// Runs a configuration in memory.
pub fn run(cfg: &RunConfig) -> Result<(Trajectory, RunSummary), Failure> {
    let (grid, spec) = cfg.resolve()?;
    let state = cfg.initial_state(&grid, &spec)?;
    let traj = evolve(&grid, &spec, &state, &cfg.evolution)?;
    let summary = summarize(&traj, cfg.chi)?;
    Ok((traj, summary))
}

pub fn simulate(cfg: &RunConfig) -> Result<RunSummary, Failure> {
    let out = &cfg.out;
    match run(cfg) {
        Ok((traj, summary)) => {
            write_outputs(out, cfg, &traj, &summary).with_context(|| format!("writing {}", out.display()))?;
            Ok(summary)
        }
        Err(Failure::Numerical(e)) => {
            write_error_json(out, &e)?;
            Err(Failure::Numerical(e))
        }
        Err(e) => Err(e),
    }
}

fn write_outputs(out: &Path, cfg: &RunConfig, traj: &Trajectory, summary: &RunSummary) -> anyhow::Result<()> {
    io::write_trajectory(out, traj, Some(cfg.chi))?;
    std::fs::write(out.join("config.toml"), cfg.to_toml())?;
    io::write_json(&out.join("summary.json"), summary)?;
    Ok(())
}
