use super::{
    bar_outer, dx_inv_quat, dx_inv_su2, finish, from_quaternions, mean_commutator, nonlocal_c,
    nonlocal_one_sided, nonlocal_x, to_quaternions, EvalOptions, Evaluated, Jet, NonlocalForm,
};
use crate::algebra::{Mat2, Quaternion, SU2Generator};
use crate::error::Result;
use crate::grid::{PeriodicGrid, SpinorField};
use crate::C64;

/// Second SU(2) system: real `v` coupled to the spinor `u`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StateSys2 {
    pub v: Vec<f64>,
    pub u: SpinorField,
}

/// `D⁻¹(v · i[Ĵ, ūᵗu])`.
pub(crate) fn nonlocal_v(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: Mat2,
    opts: EvalOptions,
) -> Result<(Vec<Mat2>, f64)> {
    let f: Vec<Mat2> = s
        .u
        .iter()
        .zip(&s.v)
        .map(|(a, &v)| j.commutator(&bar_outer(a, a)).scale(C64::new(0.0, v)))
        .collect();
    dx_inv_su2(grid, &f, opts.policy)
}

fn potential(
    grid: &PeriodicGrid,
    s: &StateSys2,
    ux: &SpinorField,
    j: Mat2,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<(Vec<Mat2>, f64)> {
    let u = &s.u;
    let vx = grid.dx_real(&s.v);
    let i_id = Mat2::i_identity();
    let (nl2, mean2) = nonlocal_v(grid, s, j, opts)?;
    let (form_part, mean1): (Vec<Mat2>, f64) = match form {
        NonlocalForm::Main => {
            let (nl1, mean) = nonlocal_x(grid, u, ux, j, opts.policy)?;
            let m = u
                .iter()
                .zip(nl1)
                .map(|(a, d)| i_id.scale_re(0.5 * a.cdot(a * j).im) + d)
                .collect();
            (m, mean)
        }
        NonlocalForm::Alt1 => {
            let (d, mean) = nonlocal_one_sided(grid, u, ux, j, true, opts.policy)?;
            let m = u.iter().zip(d).map(|(a, d)| i_id.scale_re(a.cdot(a * j).im) + d).collect();
            (m, mean)
        }
        NonlocalForm::Alt2 => {
            let (d, mean) = nonlocal_one_sided(grid, u, ux, j, false, opts.policy)?;
            let m = u.iter().zip(d).map(|(a, d)| j.scale_re(a.norm_sqr()) - d).collect();
            (m, mean)
        }
        NonlocalForm::Alt3 => {
            let (d, mean) = nonlocal_c(grid, u, ux, j, opts.policy)?;
            let m = u
                .iter()
                .zip(d)
                .map(|(a, d)| {
                    (j.scale_re(a.norm_sqr()) + i_id.scale_re(a.cdot(a * j).im) + d).scale_re(0.5)
                })
                .collect();
            (m, mean)
        }
    };
    let m = form_part
        .into_iter()
        .zip(nl2)
        .zip(s.v.iter().zip(&vx))
        .map(|((f, n2), (&v, &vx))| j.scale(C64::new(v * v, -vx)) + f + n2)
        .collect();
    Ok((m, mean1.max(mean2)))
}

fn v_rate(grid: &PeriodicGrid, s: &StateSys2, ux: &SpinorField, j: Mat2, opts: EvalOptions) -> Vec<f64> {
    let raw: Vec<f64> =
        s.u.iter().zip(ux.iter()).map(|(a, ax)| 2.0 * ax.cdot(a * j).im).collect();
    if opts.dealias {
        grid.dealias_real(&raw)
    } else {
        raw
    }
}

/// Everything except `u_xxĴ`; the `v` rate is entirely nonlinear.
pub fn nonlinear_sys2(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<Evaluated<StateSys2>> {
    let jm = j.matrix();
    let ux = grid.dx_spinor(&s.u);
    let (m, removed_mean) = potential(grid, s, &ux, jm, form, opts)?;
    let raw = s.u.iter().zip(&m).map(|(a, m)| a * *m).collect();
    let rate = StateSys2 { v: v_rate(grid, s, &ux, jm, opts), u: finish(grid, raw, opts) };
    Ok(Evaluated { rate, removed_mean })
}

fn assemble(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<Evaluated<StateSys2>> {
    let mut nl = nonlinear_sys2(grid, s, j, form, opts)?;
    let lin = grid.dxx_spinor(&s.u).mul_mat(j.matrix());
    nl.rate.u = &lin + &nl.rate.u;
    Ok(nl)
}

pub fn rhs_sys2(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    opts: EvalOptions,
) -> Result<Evaluated<StateSys2>> {
    assemble(grid, s, j, NonlocalForm::Main, opts)
}

pub fn rhs_sys2_alt(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    form: NonlocalForm,
    opts: EvalOptions,
) -> Result<Evaluated<StateSys2>> {
    assemble(grid, s, j, form, opts)
}

/// Constant `K` with `u_t(alt) − u_t(main) = u K`.
pub fn alt_form_offset_sys2(u: &SpinorField, j: &SU2Generator, form: NonlocalForm) -> Mat2 {
    let k = mean_commutator(u, j.matrix()).scale_re(0.5);
    match form {
        NonlocalForm::Main | NonlocalForm::Alt3 => Mat2::ZERO,
        NonlocalForm::Alt1 => -k,
        NonlocalForm::Alt2 => k,
    }
}

/// Quaternion evaluation. With `i` acting by left multiplication:
/// `v_t = −2 Re(ū̊_x i ů q)` and
/// `ů_t = ů_xx q − v_x iůq + v²ůq − ¼ i{q, ū̊iů}ů
///        + ½ů(|ů|²q + D⁻¹[Im(ū̊ů_x), q]) + ½ů D⁻¹(v[q, ū̊iů])`.
pub fn rhs_sys2_quaternion(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    opts: EvalOptions,
) -> Result<Evaluated<StateSys2>> {
    let q = j.to_quaternion();
    let i = Quaternion::I;
    let Jet { ux, uxx } = Jet::new(grid, &s.u);
    let (u, ux, uxx) = (to_quaternions(&s.u), to_quaternions(&ux), to_quaternions(&uxx));
    let vx = grid.dx_real(&s.v);

    let comm_x: Vec<Quaternion> =
        u.iter().zip(&ux).map(|(a, ax)| (a.conj() * *ax).im().commutator(q)).collect();
    let (d1, m1) = dx_inv_quat(grid, &comm_x, opts.policy)?;
    let comm_v: Vec<Quaternion> = u
        .iter()
        .zip(&s.v)
        .map(|(a, &v)| q.commutator(a.conj() * i * *a) * v)
        .collect();
    let (d2, m2) = dx_inv_quat(grid, &comm_v, opts.policy)?;

    let nl: Vec<Quaternion> = (0..u.len())
        .map(|k| {
            let a = u[k];
            let (v, vx) = (s.v[k], vx[k]);
            let iaq = i * a * q;
            let aq = a * q;
            let local = i * q.anticommutator(a.conj() * i * a) * a * 0.25;
            iaq * (-vx) + aq * (v * v) - local
                + a * (q * a.norm_sqr() + d1[k]) * 0.5
                + a * d2[k] * 0.5
        })
        .collect();
    let lin = from_quaternions(&uxx.iter().map(|a| *a * q).collect::<Vec<_>>());
    let u_rate = &lin + &finish(grid, from_quaternions(&nl), opts);

    let v_raw: Vec<f64> =
        u.iter().zip(&ux).map(|(a, ax)| -2.0 * (ax.conj() * i * *a * q).re()).collect();
    let v_rate = if opts.dealias { grid.dealias_real(&v_raw) } else { v_raw };
    Ok(Evaluated { rate: StateSys2 { v: v_rate, u: u_rate }, removed_mean: m1.max(m2) })
}

/// `∫ (Re(ū·(u_xĴ)) + v Im(ū·(uĴ))) dx`.
pub fn hamiltonian_sys2(grid: &PeriodicGrid, s: &StateSys2, j: &SU2Generator) -> f64 {
    let ux = grid.dx_spinor(&s.u);
    let jm = j.matrix();
    let d: Vec<f64> = s
        .u
        .iter()
        .zip(ux.iter())
        .zip(&s.v)
        .map(|((a, ax), &v)| a.cdot(ax * jm).re + v * a.cdot(a * jm).im)
        .collect();
    grid.integrate_real(&d)
}
