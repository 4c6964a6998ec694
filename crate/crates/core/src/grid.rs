//! Periodic 1-D Fourier grid: spectral derivatives, zero-mean antiderivative,
//! quadrature and dealiasing.

use crate::algebra::{Mat2, Spinor};
use crate::error::{QnlsError, Result};
use crate::C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

const ZERO: C64 = C64::new(0.0, 0.0);

/// How [`PeriodicGrid::dx_inv`] treats the mean of its argument.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanPolicy {
    /// Subtract the mean and report it.
    #[default]
    Project,
    /// Fail when `|mean| > rel_tol · rms(f)`.
    Strict { rel_tol: f64 },
}

impl MeanPolicy {
    pub fn strict() -> Self {
        MeanPolicy::Strict { rel_tol: 1e-10 }
    }
}

/// `N` equispaced points on `[0, L)`, `N` a power of two, `N ≥ 8`.
#[derive(Clone)]
pub struct PeriodicGrid {
    n: usize,
    length: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.length == o.length
    }
}

impl PeriodicGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(QnlsError::InvalidGrid(format!(
                "N = {n} must be a power of two and at least 8"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(QnlsError::InvalidGrid(format!("L = {length} must be positive")));
        }
        let mut planner = FftPlanner::new();
        Ok(PeriodicGrid {
            n,
            length,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        k as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// Signed mode index of FFT bin `j`; the Nyquist bin maps to `+N/2`.
    pub fn mode(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Angular wavenumber of bin `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        TAU / self.length * self.mode(j) as f64
    }

    pub fn fft(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.fft_in_place(&mut buf);
        buf
    }

    pub fn fft_in_place(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process(buf);
    }

    /// Normalized inverse transform.
    pub fn ifft(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.ifft_in_place(&mut buf);
        buf
    }

    pub fn ifft_in_place(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inv.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    fn spectral(&self, f: &[C64], symbol: impl Fn(usize) -> C64) -> Vec<C64> {
        let mut hat = self.fft(f);
        hat.iter_mut().enumerate().for_each(|(j, z)| *z *= symbol(j));
        self.ifft_in_place(&mut hat);
        hat
    }

    /// Spectral `D_x`; the Nyquist mode is dropped.
    pub fn dx(&self, f: &[C64]) -> Vec<C64> {
        let nyq = self.n / 2;
        self.spectral(f, |j| {
            if j == nyq {
                ZERO
            } else {
                C64::new(0.0, self.wavenumber(j))
            }
        })
    }

    pub fn dx_real(&self, f: &[f64]) -> Vec<f64> {
        re(&self.dx(&complexify(f)))
    }

    /// Spectral `D_x²` (Nyquist mode kept).
    pub fn dxx(&self, f: &[C64]) -> Vec<C64> {
        self.spectral(f, |j| {
            let k = self.wavenumber(j);
            C64::new(-k * k, 0.0)
        })
    }

    pub fn mean(&self, f: &[C64]) -> C64 {
        f.iter().sum::<C64>() / self.n as f64
    }

    /// Zero-mean periodic antiderivative of `f − mean f`. Returns the
    /// antiderivative and the removed mean.
    pub fn dx_inv(&self, f: &[C64], policy: MeanPolicy) -> Result<(Vec<C64>, C64)> {
        let mut hat = self.fft(f);
        let mean = hat[0] / self.n as f64;
        if let MeanPolicy::Strict { rel_tol } = policy {
            let rms = (f.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.n as f64).sqrt();
            if mean.norm() > rel_tol * rms {
                return Err(QnlsError::NonzeroMean { mean });
            }
        }
        let nyq = self.n / 2;
        hat.iter_mut().enumerate().for_each(|(j, z)| {
            *z = if j == 0 || j == nyq {
                ZERO
            } else {
                *z / C64::new(0.0, self.wavenumber(j))
            };
        });
        self.ifft_in_place(&mut hat);
        Ok((hat, mean))
    }

    pub fn dx_inv_real(&self, f: &[f64], policy: MeanPolicy) -> Result<(Vec<f64>, f64)> {
        let (g, m) = self.dx_inv(&complexify(f), policy)?;
        Ok((re(&g), m.re))
    }

    /// `(L/N) Σ f_k`, exact for band-limited integrands.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        f.iter().sum::<C64>() * self.spacing()
    }

    pub fn integrate_real(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.spacing()
    }

    /// Highest retained mode index under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Zero every mode with `|m| > N/3`.
    pub fn dealias(&self, f: &[C64]) -> Vec<C64> {
        let cut = self.dealias_cutoff();
        self.spectral(f, |j| if self.mode(j).abs() > cut { ZERO } else { C64::new(1.0, 0.0) })
    }

    pub fn dealias_real(&self, f: &[f64]) -> Vec<f64> {
        re(&self.dealias(&complexify(f)))
    }

    pub fn dealias_hat(&self, hat: &mut [C64]) {
        let cut = self.dealias_cutoff();
        for (j, z) in hat.iter_mut().enumerate() {
            if self.mode(j).abs() > cut {
                *z = ZERO;
            }
        }
    }

    /// Largest Fourier amplitude above the dealiasing cutoff relative to the
    /// largest amplitude overall (0 for the zero field).
    pub fn tail_ratio(&self, f: &[C64]) -> f64 {
        let hat = self.fft(f);
        let cut = self.dealias_cutoff();
        let peak = hat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let tail = hat
            .iter()
            .enumerate()
            .filter(|(j, _)| self.mode(*j).abs() > cut)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        tail / peak
    }

    /// Trigonometric interpolation onto a grid `factor` times finer.
    pub fn refine(&self, f: &[C64], factor: usize) -> Vec<C64> {
        let m = self.n * factor;
        let hat = self.fft(f);
        let mut big = vec![ZERO; m];
        let half = self.n / 2;
        for (j, z) in hat.iter().enumerate() {
            if j < half {
                big[j] = *z;
            } else if j > half {
                big[m - (self.n - j)] = *z;
            } else {
                big[half] = *z * 0.5;
                big[m - half] = *z * 0.5;
            }
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(m).process(&mut big);
        let s = 1.0 / self.n as f64;
        big.iter_mut().for_each(|z| *z *= s);
        big
    }

    /// Entrywise `dx_inv` of a 2×2 matrix field.
    pub fn dx_inv_mat2(&self, f: &[Mat2], policy: MeanPolicy) -> Result<(Vec<Mat2>, Mat2)> {
        let mut out = vec![Mat2::ZERO; self.n];
        let mut mean = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let entry: Vec<C64> = f.iter().map(|m| m.0[i][j]).collect();
                let (g, m) = self.dx_inv(&entry, policy)?;
                for (o, z) in out.iter_mut().zip(g) {
                    o.0[i][j] = z;
                }
                mean.0[i][j] = m;
            }
        }
        Ok((out, mean))
    }

    pub fn dx_mat2(&self, f: &[Mat2]) -> Vec<Mat2> {
        let mut out = vec![Mat2::ZERO; self.n];
        for i in 0..2 {
            for j in 0..2 {
                let entry: Vec<C64> = f.iter().map(|m| m.0[i][j]).collect();
                for (o, z) in out.iter_mut().zip(self.dx(&entry)) {
                    o.0[i][j] = z;
                }
            }
        }
        out
    }

    pub fn dx_spinor(&self, u: &SpinorField) -> SpinorField {
        SpinorField { u1: self.dx(&u.u1), u2: self.dx(&u.u2) }
    }

    pub fn dxx_spinor(&self, u: &SpinorField) -> SpinorField {
        SpinorField { u1: self.dxx(&u.u1), u2: self.dxx(&u.u2) }
    }

    pub fn dealias_spinor(&self, u: &SpinorField) -> SpinorField {
        SpinorField { u1: self.dealias(&u.u1), u2: self.dealias(&u.u2) }
    }

    /// Real `L²` pairing `Re ∫ f̄ g dx` summed over components.
    pub fn pairing(&self, f: &SpinorField, g: &SpinorField) -> f64 {
        let s: f64 = f.iter().zip(g.iter()).map(|(a, b)| a.cdot(b).re).sum();
        s * self.spacing()
    }
}

pub fn complexify(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&x| C64::new(x, 0.0)).collect()
}

pub fn re(f: &[C64]) -> Vec<f64> {
    f.iter().map(|z| z.re).collect()
}

/// Samples of a spinor field stored by component.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpinorField {
    pub u1: Vec<C64>,
    pub u2: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(n: usize) -> Self {
        SpinorField { u1: vec![ZERO; n], u2: vec![ZERO; n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> Spinor) -> Self {
        (0..n).map(f).collect()
    }

    pub fn len(&self) -> usize {
        self.u1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u1.is_empty()
    }

    pub fn at(&self, k: usize) -> Spinor {
        Spinor::new(self.u1[k], self.u2[k])
    }

    pub fn set(&mut self, k: usize, s: Spinor) {
        self.u1[k] = s.u1;
        self.u2[k] = s.u2;
    }

    pub fn iter(&self) -> impl Iterator<Item = Spinor> + '_ {
        self.u1.iter().zip(&self.u2).map(|(&a, &b)| Spinor::new(a, b))
    }

    pub fn map(&self, f: impl Fn(Spinor) -> Spinor) -> Self {
        self.iter().map(f).collect()
    }

    pub fn zip_map(&self, o: &Self, f: impl Fn(Spinor, Spinor) -> Spinor) -> Self {
        self.iter().zip(o.iter()).map(|(a, b)| f(a, b)).collect()
    }

    /// Pointwise right multiplication by a constant matrix.
    pub fn mul_mat(&self, m: Mat2) -> Self {
        self.map(|s| s * m)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|u| u.scale_re(s))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().map(|s| s.max_abs()).fold(0.0, f64::max)
    }

    /// Root-mean-square magnitude.
    pub fn rms(&self) -> f64 {
        (self.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.len().max(1) as f64).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|s| s.u1.is_finite() && s.u2.is_finite())
    }
}

impl FromIterator<Spinor> for SpinorField {
    fn from_iter<I: IntoIterator<Item = Spinor>>(it: I) -> Self {
        let (u1, u2) = it.into_iter().map(|s| (s.u1, s.u2)).unzip();
        SpinorField { u1, u2 }
    }
}

impl std::ops::Add for &SpinorField {
    type Output = SpinorField;
    fn add(self, o: &SpinorField) -> SpinorField {
        self.zip_map(o, |a, b| a + b)
    }
}

impl std::ops::Sub for &SpinorField {
    type Output = SpinorField;
    fn sub(self, o: &SpinorField) -> SpinorField {
        self.zip_map(o, |a, b| a - b)
    }
}
