use super::{EvalOptions, Evaluated};
use crate::grid::PeriodicGrid;
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StateNls {
    pub u: Vec<C64>,
}

/// `u_t = i(u_xx + g|u|²u) + c1 u_x + i c2 u`. The default is the
/// integrable baseline `g = ½`, `c1 = c2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlsParams {
    pub g: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
}

impl Default for NlsParams {
    fn default() -> Self {
        NlsParams { g: 0.5, c1: 0.0, c2: 0.0 }
    }
}

impl NlsParams {
    pub fn with_coupling(g: f64) -> Self {
        NlsParams { g, ..Default::default() }
    }

    /// Fourier symbol of the linear part at angular wavenumber `k`.
    pub fn linear_symbol(&self, k: f64) -> C64 {
        C64::new(0.0, -k * k + self.c2) + C64::new(0.0, self.c1 * k)
    }
}

/// Nonlinear part `i g |u|²u` (dealiased per `opts`).
pub fn nonlinear_nls(grid: &PeriodicGrid, u: &[C64], p: &NlsParams, opts: EvalOptions) -> Vec<C64> {
    let cubic: Vec<C64> = u.iter().map(|z| C64::new(0.0, p.g * z.norm_sqr()) * z).collect();
    if opts.dealias {
        grid.dealias(&cubic)
    } else {
        cubic
    }
}

pub fn rhs_nls(
    grid: &PeriodicGrid,
    s: &StateNls,
    p: &NlsParams,
    opts: EvalOptions,
) -> Evaluated<Vec<C64>> {
    let uxx = grid.dxx(&s.u);
    let ux = grid.dx(&s.u);
    let rate = nonlinear_nls(grid, &s.u, p, opts)
        .into_iter()
        .zip(uxx.iter().zip(ux.iter().zip(&s.u)))
        .map(|(nl, (a, (b, u)))| nl + C64::i() * a + b * p.c1 + C64::new(0.0, p.c2) * u)
        .collect();
    Evaluated { rate, removed_mean: 0.0 }
}

/// `∫ Im(ū_x u) dx`.
pub fn hamiltonian_nls(grid: &PeriodicGrid, s: &StateNls) -> f64 {
    let ux = grid.dx(&s.u);
    let d: Vec<f64> = ux.iter().zip(&s.u).map(|(a, b)| (a.conj() * b).im).collect();
    grid.integrate_real(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn plane(grid: &PeriodicGrid, a: C64, m: f64) -> StateNls {
        let k = TAU * m / grid.length();
        StateNls { u: grid.points().iter().map(|x| a * C64::from_polar(1.0, k * x)).collect() }
    }

    #[test]
    fn zero_state() {
        let g = PeriodicGrid::new(32, 5.0).unwrap();
        let r = rhs_nls(&g, &StateNls { u: vec![C64::new(0.0, 0.0); 32] }, &NlsParams::default(), EvalOptions::default());
        assert!(r.rate.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn plane_wave_is_phase_rotation() {
        let g = PeriodicGrid::new(64, TAU).unwrap();
        let a = C64::new(0.8, 0.3);
        let s = plane(&g, a, 3.0);
        let k = 3.0;
        let r = rhs_nls(&g, &s, &NlsParams::default(), EvalOptions::default());
        let factor = C64::new(0.0, 0.5 * a.norm_sqr() - k * k);
        for (rt, u) in r.rate.iter().zip(&s.u) {
            assert!((rt - factor * u).norm() < 1e-11);
        }
    }

    #[test]
    fn constant_state() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let a = C64::new(-0.4, 1.1);
        let s = StateNls { u: vec![a; 16] };
        let r = rhs_nls(&g, &s, &NlsParams::default(), EvalOptions::default());
        let want = C64::new(0.0, 0.5 * a.norm_sqr()) * a;
        assert!(r.rate.iter().all(|z| (z - want).norm() < 1e-14));
    }

    #[test]
    fn hamiltonian_of_plane_wave() {
        let g = PeriodicGrid::new(64, 4.0).unwrap();
        let a = C64::new(0.5, -0.5);
        let s = plane(&g, a, 2.0);
        let k = TAU * 2.0 / 4.0;
        // Independent closed form: ū_x u = (−ik) ā e^{-ikx} a e^{ikx} = −ik|a|².
        assert!((hamiltonian_nls(&g, &s) + k * a.norm_sqr() * 4.0).abs() < 1e-12);
    }

    #[test]
    fn real_field_has_zero_hamiltonian() {
        let g = PeriodicGrid::new(32, 2.0).unwrap();
        let s = StateNls { u: g.points().iter().map(|x| C64::new((TAU * x / 2.0).cos() + 0.2, 0.0)).collect() };
        assert!(hamiltonian_nls(&g, &s).abs() < 1e-14);
    }
}
