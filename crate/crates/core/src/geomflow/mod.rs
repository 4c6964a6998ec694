//! Curve flows: the R³ vortex filament `r_t = r_x × r_xx` with its Hasimoto
//! image, and the SU(2) bi-normal flow `r_t = Ĵ_r(r_xx)` in R⁵ and R⁶.
//!
//! Curves are sampled at arclength on a periodic grid. A curve is stored as
//! its samples plus a constant drift `d`, with `r(x) − d x` periodic, so that
//! helices and lines fit the same representation as closed curves.

mod filament;
mod normal;
mod sphere;

pub use filament::{
    binormal_rhs_r3, evolve_filament, frenet_frame, hasimoto_map, FilamentTrajectory,
    observables as filament_observables, FrenetFrame, HasimotoImage, DEFAULT_KAPPA_MIN,
};
pub use normal::{build_normal_structure, structure_from_tangent, NormalCase, NormalComplexStructure, StructureResiduals};
pub use sphere::{
    evolve_su2_binormal, schrodinger_map_residual, su2_binormal_rhs, CurveTrajectory, SphereCase,
};

use crate::error::{QnlsError, Result};
use crate::grid::{complexify, re, PeriodicGrid};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Unit-speed tolerance checked on initial curves.
pub const UNIT_SPEED_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveState {
    /// Component-major samples: `r[d][k]`.
    pub r: Vec<Vec<f64>>,
    /// Constant `d` with `r(x) − d x` periodic.
    pub drift: Vec<f64>,
}

impl CurveState {
    pub fn new(r: Vec<Vec<f64>>, drift: Vec<f64>) -> Result<Self> {
        let n = r.first().map_or(0, Vec::len);
        if r.is_empty() || drift.len() != r.len() || r.iter().any(|c| c.len() != n) {
            return Err(QnlsError::InvalidInput("ragged curve components".into()));
        }
        Ok(CurveState { r, drift })
    }

    pub fn closed(r: Vec<Vec<f64>>) -> Result<Self> {
        let d = vec![0.0; r.len()];
        Self::new(r, d)
    }

    pub fn dimension(&self) -> usize {
        self.r.len()
    }

    pub fn len(&self) -> usize {
        self.r[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_closed(&self) -> bool {
        self.drift.iter().all(|d| *d == 0.0)
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.r.iter().map(|c| c[k]).collect()
    }

    fn periodic_part(&self, grid: &PeriodicGrid) -> Vec<Vec<f64>> {
        let xs = grid.points();
        self.r
            .iter()
            .zip(&self.drift)
            .map(|(c, d)| c.iter().zip(&xs).map(|(r, x)| r - d * x).collect())
            .collect()
    }

    /// `r_x`, component-major.
    pub fn tangent(&self, grid: &PeriodicGrid) -> Vec<Vec<f64>> {
        self.periodic_part(grid)
            .iter()
            .zip(&self.drift)
            .map(|(c, d)| grid.dx_real(c).into_iter().map(|v| v + d).collect())
            .collect()
    }

    /// `r_xx`, component-major.
    pub fn curvature_vector(&self, grid: &PeriodicGrid) -> Vec<Vec<f64>> {
        self.periodic_part(grid).iter().map(|c| dxx_real(grid, c)).collect()
    }

    /// `max |‖r_x‖ − 1|` over the samples.
    pub fn speed_deviation(&self, grid: &PeriodicGrid) -> f64 {
        let t = self.tangent(grid);
        (0..self.len()).map(|k| (norm(&column(&t, k)) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn check_unit_speed(&self, grid: &PeriodicGrid, tol: f64) -> Result<()> {
        let max_dev = self.speed_deviation(grid);
        if max_dev > tol || !max_dev.is_finite() {
            return Err(QnlsError::NonUnitSpeed { max_dev });
        }
        Ok(())
    }

    /// Integrate a periodic tangent field: `r = origin + D⁻¹(T − ⟨T⟩) + ⟨T⟩x`.
    pub fn from_tangent(grid: &PeriodicGrid, t: &[Vec<f64>]) -> Result<Self> {
        let xs = grid.points();
        let mut r = Vec::with_capacity(t.len());
        let mut drift = Vec::with_capacity(t.len());
        for c in t {
            let (p, mean) = grid.dx_inv_real(c, crate::MeanPolicy::Project)?;
            let mean = if mean.abs() < 1e-14 { 0.0 } else { mean };
            r.push(p.iter().zip(&xs).map(|(p, x)| p + mean * x).collect());
            drift.push(mean);
        }
        Self::new(r, drift)
    }

    pub(crate) fn add_scaled(&self, v: &[Vec<f64>], h: f64) -> CurveState {
        let r = self
            .r
            .iter()
            .zip(v)
            .map(|(c, w)| c.iter().zip(w).map(|(a, b)| a + h * b).collect())
            .collect();
        CurveState { r, drift: self.drift.clone() }
    }

    pub(crate) fn max_abs(&self) -> f64 {
        crate::integrator::peak(self.r.iter().flatten().map(|v| v.abs()))
    }
}

pub(crate) fn dxx_real(grid: &PeriodicGrid, f: &[f64]) -> Vec<f64> {
    re(&grid.dxx(&complexify(f)))
}

pub(crate) fn column(f: &[Vec<f64>], k: usize) -> Vec<f64> {
    f.iter().map(|c| c[k]).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Circle of radius `r` in the (0, 1)-plane of R^dim, sampled at arclength.
pub fn circle(dim: usize, n: usize, radius: f64) -> Result<(PeriodicGrid, CurveState)> {
    if dim < 2 {
        return Err(QnlsError::InvalidInput("circle needs dimension ≥ 2".into()));
    }
    let grid = PeriodicGrid::new(n, TAU * radius)?;
    let xs = grid.points();
    let mut r = vec![vec![0.0; n]; dim];
    for (k, x) in xs.iter().enumerate() {
        r[0][k] = radius * (x / radius).cos();
        r[1][k] = radius * (x / radius).sin();
    }
    Ok((grid, CurveState::closed(r)?))
}

/// Helix `(a cos s, a sin s, b s)` with `s = x/c`, `c = √(a²+b²)`, over
/// `turns` full turns.
pub fn helix(n: usize, a: f64, b: f64, turns: usize) -> Result<(PeriodicGrid, CurveState)> {
    let c = a.hypot(b);
    let grid = PeriodicGrid::new(n, TAU * c * turns.max(1) as f64)?;
    let xs = grid.points();
    let r = vec![
        xs.iter().map(|x| a * (x / c).cos()).collect(),
        xs.iter().map(|x| a * (x / c).sin()).collect(),
        xs.iter().map(|x| b * x / c).collect(),
    ];
    Ok((grid, CurveState::new(r, vec![0.0, 0.0, b / c])?))
}

/// Straight line along the first axis.
pub fn line(grid: &PeriodicGrid, dim: usize) -> Result<CurveState> {
    let mut r = vec![vec![0.0; grid.n()]; dim];
    r[0] = grid.points();
    let mut drift = vec![0.0; dim];
    drift[0] = 1.0;
    CurveState::new(r, drift)
}

/// Unit-speed curve whose tangent is the normalized sum of the planar
/// circle tangent and a random band-limited field of size `wobble`.
pub fn random_curve(
    grid: &PeriodicGrid,
    dim: usize,
    rng: &mut impl Rng,
    modes: usize,
    wobble: f64,
) -> Result<CurveState> {
    let kappa = TAU / grid.length();
    let xs = grid.points();
    let mut t = vec![vec![0.0; grid.n()]; dim];
    for (d, comp) in t.iter_mut().enumerate() {
        let coeffs: Vec<(f64, f64)> = (0..=modes)
            .map(|_| (rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        for (k, x) in xs.iter().enumerate() {
            let base = match d {
                0 => -(kappa * x).sin(),
                1 => (kappa * x).cos(),
                _ => 0.0,
            };
            let noise: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(m, (a, b))| {
                    let ph = m as f64 * kappa * x;
                    (a * ph.cos() + b * ph.sin()) / (1.0 + (m * m) as f64)
                })
                .sum();
            comp[k] = base + wobble * noise;
        }
    }
    for k in 0..grid.n() {
        let s = norm(&column(&t, k));
        if s < 1e-3 {
            return Err(QnlsError::DegenerateTangent { index: k });
        }
        t.iter_mut().for_each(|c| c[k] /= s);
    }
    CurveState::from_tangent(grid, &t)
}

/// RK4 step of `r_t = f(r)` with a periodic velocity.
pub(crate) fn rk4_curve(
    c: &CurveState,
    h: f64,
    f: impl Fn(&CurveState) -> Result<Vec<Vec<f64>>>,
) -> Result<CurveState> {
    let k1 = f(c)?;
    let k2 = f(&c.add_scaled(&k1, 0.5 * h))?;
    let k3 = f(&c.add_scaled(&k2, 0.5 * h))?;
    let k4 = f(&c.add_scaled(&k3, h))?;
    let mut out = c.clone();
    for d in 0..c.dimension() {
        for k in 0..c.len() {
            out.r[d][k] += h / 6.0 * (k1[d][k] + 2.0 * k2[d][k] + 2.0 * k3[d][k] + k4[d][k]);
        }
    }
    Ok(out)
}

pub(crate) fn dealias_field(grid: &PeriodicGrid, v: Vec<Vec<f64>>, on: bool) -> Vec<Vec<f64>> {
    if on {
        v.iter().map(|c| grid.dealias_real(c)).collect()
    } else {
        v
    }
}
