use super::{column, cross, dealias_field, dot, norm, rk4_curve, CurveState, UNIT_SPEED_TOL};
use crate::error::{QnlsError, Result};
use crate::grid::{MeanPolicy, PeriodicGrid};
use crate::integrator::{EvolutionConfig, BLOWUP_THRESHOLD, RESOLUTION_LIMIT};
use crate::systems::NlsParams;
use crate::C64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_KAPPA_MIN: f64 = 1e-8;

fn require_r3(c: &CurveState) -> Result<()> {
    if c.dimension() != 3 {
        return Err(QnlsError::InvalidInput(format!(
            "filament flow needs a curve in R³, got dimension {}",
            c.dimension()
        )));
    }
    Ok(())
}

fn velocity_r3(grid: &PeriodicGrid, c: &CurveState) -> Vec<Vec<f64>> {
    let t = c.tangent(grid);
    let k = c.curvature_vector(grid);
    let mut v = vec![vec![0.0; c.len()]; 3];
    for p in 0..c.len() {
        let w = cross(&column(&t, p), &column(&k, p));
        for d in 0..3 {
            v[d][p] = w[d];
        }
    }
    v
}

/// `r_x × r_xx` with spectral derivatives.
pub fn binormal_rhs_r3(grid: &PeriodicGrid, c: &CurveState) -> Result<Vec<Vec<f64>>> {
    require_r3(c)?;
    c.check_unit_speed(grid, UNIT_SPEED_TOL)?;
    Ok(velocity_r3(grid, c))
}

/// Frenet frame; `N` carries the sign so that `κ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrenetFrame {
    pub t: Vec<[f64; 3]>,
    pub n: Vec<[f64; 3]>,
    pub b: Vec<[f64; 3]>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
}

impl FrenetFrame {
    /// `max |⟨e_i, e_j⟩ − δ_ij|` over the samples.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..self.t.len() {
            let e = [self.t[k], self.n[k], self.b[k]];
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((dot(&e[i], &e[j]) - want).abs());
                }
            }
        }
        worst
    }
}

pub fn frenet_frame(grid: &PeriodicGrid, c: &CurveState, kappa_min: f64) -> Result<FrenetFrame> {
    require_r3(c)?;
    let tan = c.tangent(grid);
    let acc = c.curvature_vector(grid);
    let jerk: Vec<Vec<f64>> = acc.iter().map(|a| grid.dx_real(a)).collect();
    let n = c.len();
    let mut f = FrenetFrame {
        t: Vec::with_capacity(n),
        n: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
        kappa: Vec::with_capacity(n),
        tau: Vec::with_capacity(n),
    };
    for k in 0..n {
        let (t, a, j) = (column(&tan, k), column(&acc, k), column(&jerk, k));
        let kappa = norm(&a);
        if !(kappa >= kappa_min) {
            return Err(QnlsError::FrameDegeneracy { index: k, kappa });
        }
        let tb = cross(&t, &a);
        let nn = [a[0] / kappa, a[1] / kappa, a[2] / kappa];
        f.t.push([t[0], t[1], t[2]]);
        f.b.push(cross(&t, &nn));
        f.n.push(nn);
        f.tau.push(dot(&tb, &j) / (kappa * kappa));
        f.kappa.push(kappa);
    }
    Ok(f)
}

/// `u = κ exp(i∫₀^x τ)`, stored with the mean torsion so that the periodic
/// factor `ũ = u e^{−i⟨τ⟩x}` is available for spectral work.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HasimotoImage {
    pub u: Vec<C64>,
    /// Mean torsion `c`; `u e^{−icx}` is periodic.
    pub carrier: f64,
}

impl HasimotoImage {
    pub fn periodic_part(&self, grid: &PeriodicGrid) -> Vec<C64> {
        self.u
            .iter()
            .zip(grid.points())
            .map(|(u, x)| u * C64::from_polar(1.0, -self.carrier * x))
            .collect()
    }

    /// NLS parameters under which the periodic part evolves:
    /// `ũ_t = i(ũ_xx + 2icũ_x − c²ũ + ½|ũ|²ũ)`.
    pub fn nls_params(&self) -> NlsParams {
        NlsParams { g: 0.5, c1: -2.0 * self.carrier, c2: -self.carrier * self.carrier }
    }

    /// Gauge-invariant observables `(|u|, ∂_x arg u)`.
    pub fn observables(&self, grid: &PeriodicGrid) -> (Vec<f64>, Vec<f64>) {
        observables(grid, &self.periodic_part(grid), self.carrier)
    }
}

/// `(|u|, ∂_x arg u)` for `u = ũ e^{icx}` given the periodic factor `ũ`.
pub fn observables(grid: &PeriodicGrid, periodic: &[C64], carrier: f64) -> (Vec<f64>, Vec<f64>) {
    let ux = grid.dx(periodic);
    let modulus = periodic.iter().map(|z| z.norm()).collect();
    let phase = periodic
        .iter()
        .zip(&ux)
        .map(|(z, zx)| (z.conj() * zx).im / z.norm_sqr() + carrier)
        .collect();
    (modulus, phase)
}

pub fn hasimoto_map(grid: &PeriodicGrid, c: &CurveState, kappa_min: f64) -> Result<HasimotoImage> {
    let f = frenet_frame(grid, c, kappa_min)?;
    let (int, mean) = grid.dx_inv_real(&f.tau, MeanPolicy::Project)?;
    let xs = grid.points();
    let phase0 = int[0] + mean * xs[0];
    let u = f
        .kappa
        .iter()
        .zip(int.iter().zip(&xs))
        .map(|(k, (p, x))| C64::from_polar(*k, p + mean * x - phase0))
        .collect();
    Ok(HasimotoImage { u, carrier: mean })
}

#[derive(Clone, Debug)]
pub struct FilamentTrajectory {
    pub times: Vec<f64>,
    pub curves: Vec<CurveState>,
    /// `None` where the Frenet frame degenerates.
    pub hasimoto: Vec<Option<HasimotoImage>>,
    /// `max |‖r_x‖ − 1|` per snapshot.
    pub speed_deviation: Vec<f64>,
}

impl FilamentTrajectory {
    pub fn max_speed_drift(&self) -> f64 {
        self.speed_deviation.iter().fold(0.0, |m, d| m.max(*d))
    }
}

/// RK4 evolution of `r_t = r_x × r_xx`; the configured scheme is ignored
/// since there is no linear part to integrate exactly.
pub fn evolve_filament(
    grid: &PeriodicGrid,
    c: &CurveState,
    config: &EvolutionConfig,
) -> Result<FilamentTrajectory> {
    require_r3(c)?;
    config.validate()?;
    if c.len() != grid.n() {
        return Err(QnlsError::InvalidInput("curve and grid sizes differ".into()));
    }
    c.check_unit_speed(grid, UNIT_SPEED_TOL)?;
    let mut out = FilamentTrajectory {
        times: Vec::new(),
        curves: Vec::new(),
        hasimoto: Vec::new(),
        speed_deviation: Vec::new(),
    };
    let record = |out: &mut FilamentTrajectory, t: f64, c: &CurveState| {
        out.times.push(t);
        out.hasimoto.push(hasimoto_map(grid, c, DEFAULT_KAPPA_MIN).ok());
        out.speed_deviation.push(c.speed_deviation(grid));
        out.curves.push(c.clone());
    };
    record(&mut out, 0.0, c);
    let steps = config.steps();
    let mut cur = c.clone();
    for step in 1..=steps {
        cur = rk4_curve(&cur, config.dt, |s| Ok(dealias_field(grid, velocity_r3(grid, s), config.dealias)))?;
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
            record(&mut out, t, &cur);
        }
    }
    Ok(out)
}

/// Largest Fourier amplitude of `r_x` above the dealiasing cutoff relative
/// to the largest amplitude over all components.
pub(crate) fn tangent_tail(grid: &PeriodicGrid, c: &CurveState) -> f64 {
    let cut = grid.dealias_cutoff();
    let (mut tail, mut peak) = (0.0_f64, 0.0_f64);
    for t in c.tangent(grid) {
        for (j, z) in grid.fft(&crate::grid::complexify(&t)).iter().enumerate() {
            peak = peak.max(z.norm());
            if grid.mode(j).abs() > cut {
                tail = tail.max(z.norm());
            }
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}
