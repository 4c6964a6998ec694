use super::normal::{build_normal_structure, structure_from_tangent, NormalCase, NormalComplexStructure};
use super::{column, cross, dealias_field, filament::tangent_tail, rk4_curve, CurveState, UNIT_SPEED_TOL};
use crate::algebra::SU2Generator;
use crate::error::{QnlsError, Result};
use crate::grid::PeriodicGrid;
use crate::integrator::{EvolutionConfig, BLOWUP_THRESHOLD, RESOLUTION_LIMIT};
use nalgebra::DVector;

/// `Ĵ_r(r_xx)` pointwise.
pub fn su2_binormal_rhs(
    grid: &PeriodicGrid,
    c: &CurveState,
    s: &NormalComplexStructure,
) -> Result<Vec<Vec<f64>>> {
    if c.dimension() != s.case.dimension() || s.j_r.len() != c.len() {
        return Err(QnlsError::InvalidInput("structure was built for a different curve".into()));
    }
    let acc = c.curvature_vector(grid);
    let mut v = vec![vec![0.0; c.len()]; c.dimension()];
    for k in 0..c.len() {
        let w = s.apply(k, &column(&acc, k));
        for (d, x) in w.iter().enumerate() {
            v[d][k] = *x;
        }
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct CurveTrajectory {
    pub times: Vec<f64>,
    pub curves: Vec<CurveState>,
    pub speed_deviation: Vec<f64>,
}

impl CurveTrajectory {
    pub fn max_speed_drift(&self) -> f64 {
        self.speed_deviation.iter().fold(0.0, |m, d| m.max(*d))
    }

    /// Unit tangents of every snapshot.
    pub fn tangents(&self, grid: &PeriodicGrid) -> Vec<Vec<Vec<f64>>> {
        self.curves.iter().map(|c| c.tangent(grid)).collect()
    }
}

/// RK4 evolution of `r_t = Ĵ_r(r_xx)`, rebuilding `Ĵ_r` at every stage.
pub fn evolve_su2_binormal(
    grid: &PeriodicGrid,
    c: &CurveState,
    case: NormalCase,
    j: &SU2Generator,
    config: &EvolutionConfig,
) -> Result<CurveTrajectory> {
    config.validate()?;
    if c.dimension() != case.dimension() || c.len() != grid.n() {
        return Err(QnlsError::InvalidInput("curve does not match grid or case".into()));
    }
    c.check_unit_speed(grid, UNIT_SPEED_TOL)?;
    let rhs = |s: &CurveState| {
        let st = build_normal_structure(grid, s, case, j)?;
        Ok(dealias_field(grid, su2_binormal_rhs(grid, s, &st)?, config.dealias))
    };
    let mut out = CurveTrajectory {
        times: vec![0.0],
        curves: vec![c.clone()],
        speed_deviation: vec![c.speed_deviation(grid)],
    };
    let steps = config.steps();
    let mut cur = c.clone();
    for step in 1..=steps {
        cur = rk4_curve(&cur, config.dt, rhs)?;
        let t = step as f64 * config.dt;
        let peak = cur.max_abs();
        if !(peak <= BLOWUP_THRESHOLD) {
            return Err(QnlsError::Blowup { t, max_abs: peak });
        }
        if step % config.snapshot_stride == 0 || step == steps {
            let tail = tangent_tail(grid, &cur);
            if tail > RESOLUTION_LIMIT {
                return Err(QnlsError::Resolution { t, tail_ratio: tail });
            }
            out.times.push(t);
            out.speed_deviation.push(cur.speed_deviation(grid));
            out.curves.push(cur.clone());
        }
    }
    Ok(out)
}

/// Target sphere of a Schrödinger map `γ_t = J_γ(∇_xγ_x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SphereCase {
    /// `J_γ = γ ×`.
    S2,
    /// `J_γ` = `Ĵ_r` of su(4)/sp(2) built along `γ`.
    S4(SU2Generator),
}

/// Largest (over interior snapshots) `L²` norm of `γ_t − J_γ(∇_xγ_x)`, with
/// a centered difference in time over equally spaced snapshots.
pub fn schrodinger_map_residual(
    grid: &PeriodicGrid,
    gamma: &[Vec<Vec<f64>>],
    dt: f64,
    case: SphereCase,
) -> Result<f64> {
    if gamma.len() < 3 {
        return Err(QnlsError::TooFewSnapshots { need: 3, got: gamma.len() });
    }
    let n = grid.n();
    let mut worst = 0.0_f64;
    for s in 1..gamma.len() - 1 {
        let g = &gamma[s];
        let gxx: Vec<Vec<f64>> = g.iter().map(|c| super::dxx_real(grid, c)).collect();
        let structure = match case {
            SphereCase::S2 => None,
            SphereCase::S4(j) => Some(structure_from_tangent(grid, g, NormalCase::Su4Sp2, &j)?),
        };
        let mut sum = 0.0;
        for k in 0..n {
            let gk = DVector::from_vec(column(g, k));
            let a = DVector::from_vec(column(&gxx, k));
            let lap = &a - &gk * gk.dot(&a);
            let flow = match &structure {
                None => DVector::from_column_slice(&cross(gk.as_slice(), lap.as_slice())),
                Some(st) => st.apply(k, lap.as_slice()),
            };
            let gt = DVector::from_fn(g.len(), |d, _| (gamma[s + 1][d][k] - gamma[s - 1][d][k]) / (2.0 * dt));
            sum += (gt - flow).norm_squared();
        }
        worst = worst.max((sum * grid.spacing()).sqrt());
    }
    Ok(worst)
}
