use super::{
    dx_inv_quat, finish, from_quaternions, mean_commutator, nonlocal_c,
    nonlocal_one_sided, nonlocal_x, to_quaternions, EvalOptions, Evaluated, Jet, NonlocalForm,
};
use crate::algebra::{Mat2, Quaternion, SU2Generator};
use crate::error::Result;
use crate::grid::{PeriodicGrid, SpinorField};

/// First SU(2) system, `u_t = u_xxĴ + |u|²uĴ + 2uD⁻¹(ūᵗu_xĴ + Ĵū_xᵗu)₀`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StateSys1 {
    pub u: SpinorField,
}

/// Potential `M(x)` with `u_t = u_xxĴ + u M` for the requested form.
fn potential(
    grid: &PeriodicGrid,
    u: &SpinorField,
    ux: &SpinorField,
    j: Mat2,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<(Vec<Mat2>, f64)> {
    let n2: Vec<f64> = u.iter().map(|s| s.norm_sqr()).collect();
    let im_t: Vec<f64> = u.iter().map(|s| s.cdot(s * j).im).collect();
    let i_id = Mat2::i_identity();
    let (m, mean) = match form {
        NonlocalForm::Main => {
            let (nl, mean) = nonlocal_x(grid, u, ux, j, opts.policy)?;
            let m = nl.iter().zip(&n2).map(|(d, &r)| j.scale_re(r) + d.scale_re(2.0)).collect();
            (m, mean)
        }
        NonlocalForm::Alt1 => {
            let (d, mean) = nonlocal_one_sided(grid, u, ux, j, true, opts.policy)?;
            let m = d
                .iter()
                .zip(n2.iter().zip(&im_t))
                .map(|(d, (&r, &t))| j.scale_re(r) + i_id.scale_re(t) + d.scale_re(2.0))
                .collect();
            (m, mean)
        }
        NonlocalForm::Alt2 => {
            let (d, mean) = nonlocal_one_sided(grid, u, ux, j, false, opts.policy)?;
            let m = d
                .iter()
                .zip(n2.iter().zip(&im_t))
                .map(|(d, (&r, &t))| j.scale_re(3.0 * r) - i_id.scale_re(t) - d.scale_re(2.0))
                .collect();
            (m, mean)
        }
        NonlocalForm::Alt3 => {
            let (d, mean) = nonlocal_c(grid, u, ux, j, opts.policy)?;
            let m = d.iter().zip(&n2).map(|(d, &r)| j.scale_re(2.0 * r) + *d).collect();
            (m, mean)
        }
    };
    Ok((m, mean))
}

/// Everything except the linear term `u_xxĴ`.
pub fn nonlinear_sys1(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<Evaluated<SpinorField>> {
    let ux = grid.dx_spinor(&s.u);
    let (m, removed_mean) = potential(grid, &s.u, &ux, j.matrix(), form, opts)?;
    let raw = s.u.iter().zip(&m).map(|(a, m)| a * *m).collect();
    Ok(Evaluated { rate: finish(grid, raw, opts), removed_mean })
}

fn assemble(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<Evaluated<SpinorField>> {
    let nl = nonlinear_sys1(grid, s, j, form, opts)?;
    let lin = grid.dxx_spinor(&s.u).mul_mat(j.matrix());
    Ok(Evaluated { rate: &lin + &nl.rate, removed_mean: nl.removed_mean })
}

pub fn rhs_sys1(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    opts: EvalOptions,
) -> Result<Evaluated<SpinorField>> {
    assemble(grid, s, j, NonlocalForm::Main, opts)
}

/// One of the rewritten nonlocal forms. They differ from [`rhs_sys1`] by
/// `u K` with `K` the constant from [`alt_form_offset_sys1`].
pub fn rhs_sys1_alt(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<Evaluated<SpinorField>> {
    assemble(grid, s, j, form, opts)
}

/// Constant `K` with `rhs_alt − rhs = u K`. It comes from the period mean
/// that the zero-mean `D⁻¹` drops from a total derivative.
pub fn alt_form_offset_sys1(u: &SpinorField, j: &SU2Generator, form: NonlocalForm) -> Mat2 {
    let k = mean_commutator(u, j.matrix());
    match form {
        NonlocalForm::Main | NonlocalForm::Alt3 => Mat2::ZERO,
        NonlocalForm::Alt1 => -k,
        NonlocalForm::Alt2 => k,
    }
}

/// Quaternion evaluation
/// `ů_t = ů_xx q + 2|ů|²ů q + ů D⁻¹[Im(ū̊ ů_x), q]`, mapped back to spinors.
pub fn rhs_sys1_quaternion(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    opts: EvalOptions,
) -> Result<Evaluated<SpinorField>> {
    let q = j.to_quaternion();
    let Jet { ux, uxx } = Jet::new(grid, &s.u);
    let (u, ux, uxx) = (to_quaternions(&s.u), to_quaternions(&ux), to_quaternions(&uxx));
    let comm: Vec<Quaternion> =
        u.iter().zip(&ux).map(|(a, ax)| (a.conj() * *ax).im().commutator(q)).collect();
    let (d, removed_mean) = dx_inv_quat(grid, &comm, opts.policy)?;
    let nl: Vec<Quaternion> =
        u.iter().zip(&d).map(|(a, d)| *a * q * (2.0 * a.norm_sqr()) + *a * *d).collect();
    let nl = finish(grid, from_quaternions(&nl), opts);
    let lin = from_quaternions(&uxx.iter().map(|a| *a * q).collect::<Vec<_>>());
    Ok(Evaluated { rate: &lin + &nl, removed_mean })
}

/// `∫ Re(ū·(u_xĴ)) dx`.
pub fn hamiltonian_sys1(grid: &PeriodicGrid, s: &StateSys1, j: &SU2Generator) -> f64 {
    let ux = grid.dx_spinor(&s.u);
    let jm = j.matrix();
    let d: Vec<f64> = s.u.iter().zip(ux.iter()).map(|(a, ax)| a.cdot(ax * jm).re).collect();
    grid.integrate_real(&d)
}
