//! Seeded initial-condition families.

use crate::algebra::{SU2Generator, Spinor};
use crate::grid::{PeriodicGrid, SpinorField};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spatial symmetry imposed on random fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    #[default]
    None,
    /// `f(−x) = f(x)`.
    Even,
    /// `f(−x) = −f(x)`.
    Odd,
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Random complex field `Σ_{|m|≤modes} c_m e^{imκx}/(1+m²)` rescaled to the
/// given peak magnitude.
pub fn random_complex(
    grid: &PeriodicGrid,
    rng: &mut impl Rng,
    amplitude: f64,
    modes: usize,
    parity: Parity,
) -> Vec<C64> {
    let kappa = TAU / grid.length();
    let m = modes as i64;
    let coeffs: Vec<(i64, C64)> = match parity {
        Parity::None => (-m..=m).map(|k| (k, C64::new(normal(rng), normal(rng)))).collect(),
        Parity::Even | Parity::Odd => {
            let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
            let mut out = Vec::new();
            for k in 0..=m {
                let c = C64::new(normal(rng), normal(rng));
                if k == 0 {
                    if parity == Parity::Even {
                        out.push((0, c));
                    }
                } else {
                    out.push((k, c));
                    out.push((-k, c * sign));
                }
            }
            out
        }
    };
    let f: Vec<C64> = grid
        .points()
        .iter()
        .map(|&x| {
            coeffs
                .iter()
                .map(|&(k, c)| c * C64::from_polar(1.0, k as f64 * kappa * x) / (1.0 + (k * k) as f64))
                .sum()
        })
        .collect();
    rescale(f, amplitude)
}

fn rescale(f: Vec<C64>, amplitude: f64) -> Vec<C64> {
    let peak = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return f;
    }
    f.into_iter().map(|z| z * (amplitude / peak)).collect()
}

/// Random real field, same spectrum shape as [`random_complex`].
pub fn random_real(
    grid: &PeriodicGrid,
    rng: &mut impl Rng,
    amplitude: f64,
    modes: usize,
    parity: Parity,
) -> Vec<f64> {
    let kappa = TAU / grid.length();
    let m = modes as i64;
    let mut terms: Vec<(i64, f64, f64)> = Vec::new();
    for k in 0..=m {
        let (a, b) = (normal(rng), normal(rng));
        let (a, b) = match parity {
            Parity::None => (a, b),
            Parity::Even => (a, 0.0),
            Parity::Odd => (0.0, b),
        };
        terms.push((k, a, if k == 0 { 0.0 } else { b }));
    }
    let f: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| {
            terms
                .iter()
                .map(|&(k, a, b)| {
                    let ph = k as f64 * kappa * x;
                    (a * ph.cos() + b * ph.sin()) / (1.0 + (k * k) as f64)
                })
                .sum()
        })
        .collect();
    let peak = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        f
    } else {
        f.into_iter().map(|v| v * amplitude / peak).collect()
    }
}

/// Random spinor field whose pointwise magnitude `|u|` peaks at `amplitude`.
pub fn random_spinor(
    grid: &PeriodicGrid,
    rng: &mut impl Rng,
    amplitude: f64,
    modes: usize,
    parity: Parity,
) -> SpinorField {
    let u1 = random_complex(grid, rng, 1.0, modes, parity);
    let u2 = random_complex(grid, rng, 1.0, modes, parity);
    let u = SpinorField { u1, u2 };
    let peak = u.iter().map(Spinor::norm).fold(0.0, f64::max);
    if peak == 0.0 {
        u
    } else {
        u.scale_re(amplitude / peak)
    }
}

pub fn plane_wave(grid: &PeriodicGrid, amplitude: C64, mode: i64) -> Vec<C64> {
    let k = TAU * mode as f64 / grid.length();
    grid.points().iter().map(|&x| amplitude * C64::from_polar(1.0, k * x)).collect()
}

/// Periodized Gaussian bump `a·exp(−(x−L/2)²/w²)` carried by the spinor
/// `(1, 0)·exp(φ(x)Ĵ)` with `φ = twist·sin(2πx/L)`.
pub fn gaussian_rotation(
    grid: &PeriodicGrid,
    amplitude: f64,
    width: f64,
    twist: f64,
    j: &SU2Generator,
) -> SpinorField {
    let l = grid.length();
    let base = Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    grid.points()
        .iter()
        .map(|&x| {
            let bump: f64 = (-2..=2)
                .map(|p| {
                    let d = x - 0.5 * l + p as f64 * l;
                    (-(d * d) / (width * width)).exp()
                })
                .sum();
            let phi = twist * (TAU * x / l).sin();
            (base * j.exp(phi)).scale_re(amplitude * bump)
        })
        .collect()
}

/// Embed a scalar field as `(u1, 0)`.
pub fn scalar_embedding(u1: Vec<C64>) -> SpinorField {
    let n = u1.len();
    SpinorField { u1, u2: vec![C64::new(0.0, 0.0); n] }
}
