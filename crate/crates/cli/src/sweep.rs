use crate::config::{SweepConfig, SweepPoint};
use crate::failure::{describe, Failure};
use crate::simulate;
use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub theta: f64,
    pub psi: f64,
    pub chi: f64,
    pub dt: f64,
    pub amplitude: f64,
    pub status: String,
    pub hamiltonian_drift: Option<f64>,
    pub mass_drift: Option<f64>,
    pub v_integral_drift: Option<f64>,
    pub lax_residual: Option<f64>,
    pub message: String,
}

fn run_cell(sweep: &SweepConfig, index: usize, point: SweepPoint) -> SweepRow {
    let mut row = SweepRow {
        index,
        theta: point.theta,
        psi: point.psi,
        chi: point.chi,
        dt: point.dt,
        amplitude: point.amplitude,
        status: "ok".into(),
        hamiltonian_drift: None,
        mass_drift: None,
        v_integral_drift: None,
        lax_residual: None,
        message: String::new(),
    };
    match simulate::run(&sweep.cell(&point)) {
        Ok((_, s)) => {
            row.hamiltonian_drift = Some(s.conservation.hamiltonian_drift);
            row.mass_drift = Some(s.conservation.mass_drift);
            row.v_integral_drift = Some(s.conservation.v_integral_drift);
            row.lax_residual = s.lax_residual;
        }
        Err(Failure::Numerical(e)) => {
            row.status = describe(&e)["kind"].as_str().unwrap_or("numerical").to_string();
            row.message = e.to_string();
        }
        Err(e) => {
            row.status = "error".into();
            row.message = e.to_string();
        }
    }
    row
}

/// Runs every cell and writes `summary.csv`. Succeeds when the grid is
/// empty or at least one cell succeeded.
pub fn sweep(cfg: &SweepConfig, jobs: Option<usize>) -> Result<Vec<SweepRow>, Failure> {
    let points = cfg.points();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().context("building worker pool")?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points.par_iter().enumerate().map(|(i, p)| run_cell(cfg, i, *p)).collect()
    });

    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let path = cfg.out.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    for r in &rows {
        w.serialize(r).context("writing sweep row")?;
    }
    w.flush().context("flushing summary.csv")?;

    if !rows.is_empty() && rows.iter().all(|r| r.status != "ok") {
        return Err(Failure::Other(anyhow::anyhow!("all {} sweep cells failed", rows.len())));
    }
    Ok(rows)
}
