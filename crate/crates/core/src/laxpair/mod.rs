//! Lax pairs of the three systems, zero-curvature residuals measured on
//! snapshot sequences, and the Hamiltonian/symplectic operators.
//!
//! Every pair is written `ψ_x = Uψ`, `ψ_t = Vψ`, so compatibility reads
//! `U_t − V_x − [U, V] = 0`.

mod builders;
mod operators;

pub(crate) use builders::su4_u;

pub use builders::{
    build_lax_nls, build_lax_sys1, build_lax_sys2, compute_aux_sys1, compute_aux_sys2, embed_h,
    embed_m, AuxSys1, AuxSys2,
};
pub use operators::{
    check_hamiltonian_sys1, check_hamiltonian_sys2, gauge_term_sys1, gauge_term_sys2, hop_sys1,
    hop_sys2, jop_sys1, jop_sys2, pairing_sys2, recursion_sys1, recursion_sys2,
};

use crate::algebra::{AlgebraTag, SmallMatrix};
use crate::error::{QnlsError, Result};
use crate::grid::{MeanPolicy, PeriodicGrid};
use crate::integrator::{State, Trajectory};
use crate::C64;
use serde::{Deserialize, Serialize};

/// `U(x)` and `V(x)` sampled on the grid at one instant.
#[derive(Clone, Debug)]
pub struct LaxField {
    pub tag: AlgebraTag,
    pub chi: f64,
    pub u: Vec<SmallMatrix>,
    pub v: Vec<SmallMatrix>,
}

impl LaxField {
    /// Largest violation of the algebra predicate over all samples of `U` and `V`.
    pub fn membership_residual(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .map(|m| m.membership_residual(self.tag))
            .fold(0.0, f64::max)
    }

    fn dim(&self) -> usize {
        self.u.first().map_or(0, SmallMatrix::dim)
    }
}

/// Lax field of one snapshot; the system is read off the state variant.
pub fn build_lax(
    grid: &PeriodicGrid,
    state: &State,
    generator: Option<&crate::SU2Generator>,
    chi: f64,
    policy: MeanPolicy,
) -> Result<LaxField> {
    let need_j = || {
        generator.ok_or_else(|| QnlsError::InvalidInput("SU(2) system without generator".into()))
    };
    match state {
        State::Nls(s) => Ok(build_lax_nls(grid, &s.u, chi)),
        State::Sys1(s) => build_lax_sys1(grid, s, need_j()?, chi, policy),
        State::Sys2(s) => build_lax_sys2(grid, s, need_j()?, chi, policy),
    }
}

/// Scale one entry of `V` before differencing; used to check that the
/// residual detects a broken pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub row: usize,
    pub col: usize,
    pub factor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCurvatureReport {
    /// Largest (over interior snapshots) `L²` norm of the Frobenius residual.
    pub residual_l2: f64,
    /// Largest entry magnitude of the residual.
    pub residual_max: f64,
    /// Snapshot spacing used by the centered time difference.
    pub dt: f64,
    pub order_estimate: Option<f64>,
    pub system: String,
    pub chi: f64,
    pub grid: GridInfo,
}

impl ZeroCurvatureReport {
    /// Attach `log₂(coarse / self)` for a coarse run at twice the spacing.
    pub fn with_order_from(mut self, coarse: &ZeroCurvatureReport) -> Self {
        self.order_estimate = Some(order_estimate(coarse.residual_l2, self.residual_l2, coarse.dt / self.dt));
        self
    }
}

/// Observed order from residuals at two spacings with ratio `ratio > 1`.
pub fn order_estimate(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

fn dx_matrix_field(grid: &PeriodicGrid, f: &[SmallMatrix]) -> Vec<SmallMatrix> {
    let n = f.first().map_or(0, SmallMatrix::dim);
    let mut out: Vec<SmallMatrix> = f.iter().map(|m| SmallMatrix::zeros(n, m.tag())).collect();
    for i in 0..n {
        for j in 0..n {
            let col: Vec<C64> = f.iter().map(|m| m[(i, j)]).collect();
            if col.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            for (o, z) in out.iter_mut().zip(grid.dx(&col)) {
                o[(i, j)] = z;
            }
        }
    }
    out
}

/// Residual `U_t − V_x − [U, V]` with a centered difference in time over
/// equally spaced snapshots and spectral `D_x`.
pub fn zero_curvature_residual(
    grid: &PeriodicGrid,
    fields: &[LaxField],
    dt: f64,
    system: &str,
    corrupt: Option<Corruption>,
) -> Result<ZeroCurvatureReport> {
    if fields.len() < 3 {
        return Err(QnlsError::TooFewSnapshots { need: 3, got: fields.len() });
    }
    if !(dt > 0.0) {
        return Err(QnlsError::InvalidInput(format!("snapshot spacing {dt} must be positive")));
    }
    let dim = fields[0].dim();
    if let Some(c) = corrupt {
        if c.row >= dim || c.col >= dim {
            return Err(QnlsError::InvalidInput(format!(
                "corrupted entry ({}, {}) outside {dim}×{dim}",
                c.row, c.col
            )));
        }
    }
    let mut residual_l2 = 0.0_f64;
    let mut residual_max = 0.0_f64;
    for k in 1..fields.len() - 1 {
        let (prev, cur, next) = (&fields[k - 1], &fields[k], &fields[k + 1]);
        let mut v = cur.v.clone();
        if let Some(c) = corrupt {
            for m in &mut v {
                m[(c.row, c.col)] *= c.factor;
            }
        }
        let vx = dx_matrix_field(grid, &v);
        let mut sum = 0.0;
        for p in 0..grid.n() {
            let ut = (next.u[p] - prev.u[p]).scale_re(0.5 / dt);
            let r = ut - vx[p] - cur.u[p].commutator(&v[p]);
            sum += r.frobenius().powi(2);
            residual_max = residual_max.max(r.max_abs());
        }
        residual_l2 = residual_l2.max((sum * grid.spacing()).sqrt());
    }
    Ok(ZeroCurvatureReport {
        residual_l2,
        residual_max,
        dt,
        order_estimate: None,
        system: system.to_string(),
        chi: fields[0].chi,
        grid: GridInfo { n: grid.n(), length: grid.length() },
    })
}

/// Residual over a stored trajectory; snapshots must be equally spaced.
pub fn zero_curvature_trajectory(
    traj: &Trajectory,
    chi: f64,
    corrupt: Option<Corruption>,
) -> Result<ZeroCurvatureReport> {
    if traj.times.len() < 3 {
        return Err(QnlsError::TooFewSnapshots { need: 3, got: traj.times.len() });
    }
    let dt = traj.times[1] - traj.times[0];
    let uneven = traj.times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0));
    if uneven {
        return Err(QnlsError::InvalidInput("snapshots are not equally spaced".into()));
    }
    let j = traj.generator();
    let policy = traj.config.mean_policy;
    let fields = traj
        .snapshots
        .iter()
        .map(|s| build_lax(&traj.grid, s, j.as_ref(), chi, policy))
        .collect::<Result<Vec<_>>>()?;
    zero_curvature_residual(&traj.grid, &fields, dt, traj.system.name(), corrupt)
}
