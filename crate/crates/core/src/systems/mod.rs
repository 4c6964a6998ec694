//! Right-hand sides of the scalar NLS baseline and the two SU(2) systems,
//! in spinor and quaternion encodings, with their first Hamiltonians.
//!
//! Nonlocal terms use the zero-mean antiderivative. Where an integrand is a
//! total derivative plus a remainder, the total-derivative part is integrated
//! locally and only the remainder goes through `D⁻¹`; this is what makes the
//! scalar reduction exact on a periodic box.

mod nls;
mod sys1;
mod sys2;

pub use nls::{hamiltonian_nls, nonlinear_nls, rhs_nls, NlsParams, StateNls};
pub use sys1::{
    alt_form_offset_sys1, hamiltonian_sys1, nonlinear_sys1, rhs_sys1, rhs_sys1_alt,
    rhs_sys1_quaternion, StateSys1,
};
pub(crate) use sys2::nonlocal_v;
pub use sys2::{
    alt_form_offset_sys2, hamiltonian_sys2, nonlinear_sys2, rhs_sys2, rhs_sys2_alt,
    rhs_sys2_quaternion, StateSys2,
};

use crate::algebra::{Mat2, Quaternion, SU2Generator, Spinor};
use crate::error::Result;
use crate::grid::{MeanPolicy, PeriodicGrid, SpinorField};
use crate::C64;

/// Mean handling and dealiasing applied by every evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub policy: MeanPolicy,
    /// Project nonlinear products onto the 2/3-rule band.
    pub dealias: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { policy: MeanPolicy::Project, dealias: true }
    }
}

impl EvalOptions {
    pub fn strict() -> Self {
        EvalOptions { policy: MeanPolicy::strict(), dealias: true }
    }

    pub fn raw(policy: MeanPolicy) -> Self {
        EvalOptions { policy, dealias: false }
    }
}

/// A rate together with the largest nonlocal mean that was projected out.
#[derive(Clone, Debug)]
pub struct Evaluated<T> {
    pub rate: T,
    pub removed_mean: f64,
}

/// Which rewriting of the nonlocal term to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NonlocalForm {
    Main,
    Alt1,
    Alt2,
    Alt3,
}

impl NonlocalForm {
    pub const ALTERNATES: [NonlocalForm; 3] =
        [NonlocalForm::Alt1, NonlocalForm::Alt2, NonlocalForm::Alt3];

    pub fn alternate(k: u8) -> Option<Self> {
        match k {
            1 => Some(NonlocalForm::Alt1),
            2 => Some(NonlocalForm::Alt2),
            3 => Some(NonlocalForm::Alt3),
            _ => None,
        }
    }
}

/// Integration constants of the zero-curvature derivation. The canonical
/// choice is `c1 = C1 = 0`, `CC1 = 0`, `CC2 = −χ²Ĵ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeConstants {
    pub c1: f64,
    pub big_c1: f64,
    /// Antisymmetric (so(2,C)).
    pub cc1: Mat2,
    /// su(2).
    pub cc2: Mat2,
}

impl GaugeConstants {
    pub fn canonical(chi: f64, j: &SU2Generator) -> Self {
        GaugeConstants {
            c1: 0.0,
            big_c1: 0.0,
            cc1: Mat2::ZERO,
            cc2: j.matrix().scale_re(-chi * chi),
        }
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        (self.cc1 + self.cc1.transpose()).max_abs() <= tol
            && (self.cc2 + self.cc2.adjoint()).max_abs() <= tol
            && self.cc2.trace().norm() <= tol
    }
}

/// Spatial derivatives shared by the spinor evaluators.
pub(crate) struct Jet {
    pub ux: SpinorField,
    pub uxx: SpinorField,
}

impl Jet {
    pub fn new(grid: &PeriodicGrid, u: &SpinorField) -> Self {
        Jet { ux: grid.dx_spinor(u), uxx: grid.dxx_spinor(u) }
    }
}

/// `ū ᵗ w`: entry (i, j) = conj(u_i) w_j.
pub(crate) fn bar_outer(u: Spinor, w: Spinor) -> Mat2 {
    Mat2::outer(u.conj(), w)
}

/// Entrywise zero-mean `D⁻¹` of an su(2)-valued field, re-projected onto
/// su(2). Returns the Frobenius norm of the removed mean.
pub(crate) fn dx_inv_su2(
    grid: &PeriodicGrid,
    f: &[Mat2],
    policy: MeanPolicy,
) -> Result<(Vec<Mat2>, f64)> {
    let (g, mean) = grid.dx_inv_mat2(f, policy)?;
    Ok((g.iter().map(Mat2::proj_su).collect(), mean.frobenius()))
}

/// Zero-mean `D⁻¹[ūᵗu_x − ū_xᵗu, Ĵ]`.
pub(crate) fn nonlocal_c(
    grid: &PeriodicGrid,
    u: &SpinorField,
    ux: &SpinorField,
    j: Mat2,
    policy: MeanPolicy,
) -> Result<(Vec<Mat2>, f64)> {
    let comm: Vec<Mat2> = u
        .iter()
        .zip(ux.iter())
        .map(|(a, ax)| (bar_outer(a, ax) - bar_outer(ax, a)).commutator(&j))
        .collect();
    dx_inv_su2(grid, &comm, policy)
}

/// Local part plus zero-mean nonlocal part of `D⁻¹(ū ᵗu_xĴ + Ĵū_x ᵗu)₀`:
/// `½ tf{ūᵗu, Ĵ} + ½ D⁻¹[ūᵗu_x − ū_xᵗu, Ĵ]`.
pub(crate) fn nonlocal_x(
    grid: &PeriodicGrid,
    u: &SpinorField,
    ux: &SpinorField,
    j: Mat2,
    policy: MeanPolicy,
) -> Result<(Vec<Mat2>, f64)> {
    let (int, mean) = nonlocal_c(grid, u, ux, j, policy)?;
    let out = u
        .iter()
        .zip(int)
        .map(|(a, d)| {
            let local = bar_outer(a, a).anticommutator(&j).trace_free();
            (local + d).scale_re(0.5)
        })
        .collect();
    Ok((out, mean))
}

/// Zero-mean `D⁻¹` of `[ūᵗu_x, Ĵ]` or `[ū_xᵗu, Ĵ]`.
pub(crate) fn nonlocal_one_sided(
    grid: &PeriodicGrid,
    u: &SpinorField,
    ux: &SpinorField,
    j: Mat2,
    derivative_on_right: bool,
    policy: MeanPolicy,
) -> Result<(Vec<Mat2>, f64)> {
    let comm: Vec<Mat2> = u
        .iter()
        .zip(ux.iter())
        .map(|(a, ax)| {
            let m = if derivative_on_right { bar_outer(a, ax) } else { bar_outer(ax, a) };
            m.commutator(&j)
        })
        .collect();
    // Not su(2)-valued on its own, so no re-projection.
    let (g, mean) = grid.dx_inv_mat2(&comm, policy)?;
    Ok((g, mean.frobenius()))
}

/// Period mean of `[ūᵗu, Ĵ]`.
pub(crate) fn mean_commutator(u: &SpinorField, j: Mat2) -> Mat2 {
    let n = u.len().max(1) as f64;
    u.iter()
        .fold(Mat2::ZERO, |acc, a| acc + bar_outer(a, a).commutator(&j))
        .scale_re(1.0 / n)
}

pub(crate) fn finish(grid: &PeriodicGrid, f: SpinorField, opts: EvalOptions) -> SpinorField {
    if opts.dealias {
        grid.dealias_spinor(&f)
    } else {
        f
    }
}

/// `∫ |u|² dx`.
pub fn mass(grid: &PeriodicGrid, u: &SpinorField) -> f64 {
    grid.integrate_real(&u.iter().map(Spinor::norm_sqr).collect::<Vec<_>>())
}

/// Componentwise zero-mean `D⁻¹` of a quaternion field.
pub(crate) fn dx_inv_quat(
    grid: &PeriodicGrid,
    f: &[Quaternion],
    policy: MeanPolicy,
) -> Result<(Vec<Quaternion>, f64)> {
    let lo: Vec<C64> = f.iter().map(|q| C64::new(q.w, q.x)).collect();
    let hi: Vec<C64> = f.iter().map(|q| C64::new(q.y, q.z)).collect();
    let (a, ma) = grid.dx_inv(&lo, policy)?;
    let (b, mb) = grid.dx_inv(&hi, policy)?;
    let out = a.iter().zip(&b).map(|(p, r)| Quaternion::new(p.re, p.im, r.re, r.im)).collect();
    Ok((out, (ma.norm_sqr() + mb.norm_sqr()).sqrt()))
}

pub(crate) fn to_quaternions(u: &SpinorField) -> Vec<Quaternion> {
    u.iter().map(Quaternion::from_spinor).collect()
}

pub(crate) fn from_quaternions(q: &[Quaternion]) -> SpinorField {
    q.iter().map(|p| p.to_spinor()).collect()
}
