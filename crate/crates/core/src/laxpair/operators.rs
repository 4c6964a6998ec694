//! Hamiltonian (`Hop`) and symplectic (`Jop`) operators of the two SU(2)
//! systems and the finite-difference check `Hop(δℋ/δū) = rhs + G`.
//!
//! Covectors pair with vectors through `∫ f g + Re(f̄_u·g_u)`; for complex
//! components the gradient is the Wirtinger one, half the real `L²` gradient.

use crate::algebra::{Mat2, SU2Generator};
use crate::error::Result;
use crate::grid::{MeanPolicy, PeriodicGrid, SpinorField};
use crate::systems::{
    hamiltonian_sys1, hamiltonian_sys2, rhs_sys1, rhs_sys2, EvalOptions, StateSys1, StateSys2,
};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

fn dx_inv_r(grid: &PeriodicGrid, f: Vec<f64>) -> Result<Vec<f64>> {
    Ok(grid.dx_inv_real(&f, MeanPolicy::Project)?.0)
}

fn dx_inv_m(grid: &PeriodicGrid, f: Vec<Mat2>) -> Result<Vec<Mat2>> {
    Ok(grid.dx_inv_mat2(&f, MeanPolicy::Project)?.0)
}

/// `f ↦ D_x f + 2i u D⁻¹Im(ū·f) + 4u D⁻¹P_su(ūᵗf) + 4ū D⁻¹P_so(uᵗf)`.
pub fn hop_sys1(grid: &PeriodicGrid, u: &SpinorField, f: &SpinorField) -> Result<SpinorField> {
    let fx = grid.dx_spinor(f);
    let im = dx_inv_r(grid, u.iter().zip(f.iter()).map(|(a, b)| a.cdot(b).im).collect())?;
    let su = dx_inv_m(
        grid,
        u.iter().zip(f.iter()).map(|(a, b)| Mat2::outer(a.conj(), b).proj_su()).collect(),
    )?;
    let so = dx_inv_m(
        grid,
        u.iter().zip(f.iter()).map(|(a, b)| Mat2::outer(a, b).proj_so()).collect(),
    )?;
    Ok((0..u.len())
        .map(|k| {
            let a = u.at(k);
            fx.at(k)
                + a.scale(I * (2.0 * im[k]))
                + (a * su[k]).scale_re(4.0)
                + (a.conj() * so[k]).scale_re(4.0)
        })
        .collect())
}

/// `f ↦ D_x f − 4u D⁻¹Re(ū·f)`.
pub fn jop_sys1(grid: &PeriodicGrid, u: &SpinorField, f: &SpinorField) -> Result<SpinorField> {
    let fx = grid.dx_spinor(f);
    let r = dx_inv_r(grid, u.iter().zip(f.iter()).map(|(a, b)| a.cdot(b).re).collect())?;
    Ok((0..u.len()).map(|k| fx.at(k) - u.at(k).scale_re(4.0 * r[k])).collect())
}

pub fn recursion_sys1(grid: &PeriodicGrid, u: &SpinorField, f: &SpinorField) -> Result<SpinorField> {
    hop_sys1(grid, u, &jop_sys1(grid, u, f)?)
}

/// Block operator acting on `(f_v, f_u)`:
/// `(D_x f_v + Im(ū·f_u), −iu f_v + D_x f_u + iv f_u + 2iu D⁻¹Im(ū·f_u) + 2u D⁻¹P_su(ūᵗf_u))`.
pub fn hop_sys2(grid: &PeriodicGrid, s: &StateSys2, f: &StateSys2) -> Result<StateSys2> {
    let u = &s.u;
    let fvx = grid.dx_real(&f.v);
    let fux = grid.dx_spinor(&f.u);
    let im: Vec<f64> = u.iter().zip(f.u.iter()).map(|(a, b)| a.cdot(b).im).collect();
    let im_int = dx_inv_r(grid, im.clone())?;
    let su = dx_inv_m(
        grid,
        u.iter().zip(f.u.iter()).map(|(a, b)| Mat2::outer(a.conj(), b).proj_su()).collect(),
    )?;
    let v = fvx.iter().zip(&im).map(|(a, b)| a + b).collect();
    let fu = (0..u.len())
        .map(|k| {
            let a = u.at(k);
            a.scale(-I * f.v[k])
                + fux.at(k)
                + f.u.at(k).scale(I * s.v[k])
                + a.scale(I * (2.0 * im_int[k]))
                + (a * su[k]).scale_re(2.0)
        })
        .collect();
    Ok(StateSys2 { v, u: fu })
}

/// Block operator acting on `(f_v, f_u)`:
/// `(¼D_x f_v + vD⁻¹(v f_v) + ½Im(ū·f_u) + vD⁻¹Re(ū·f_u),
///   −½iu f_v + uD⁻¹(v f_v) + D_x f_u − iv f_u + uD⁻¹Re(ū·f_u))`.
pub fn jop_sys2(grid: &PeriodicGrid, s: &StateSys2, f: &StateSys2) -> Result<StateSys2> {
    let u = &s.u;
    let fvx = grid.dx_real(&f.v);
    let fux = grid.dx_spinor(&f.u);
    let vf = dx_inv_r(grid, s.v.iter().zip(&f.v).map(|(a, b)| a * b).collect())?;
    let re_int = dx_inv_r(grid, u.iter().zip(f.u.iter()).map(|(a, b)| a.cdot(b).re).collect())?;
    let v = (0..u.len())
        .map(|k| {
            0.25 * fvx[k]
                + s.v[k] * vf[k]
                + 0.5 * u.at(k).cdot(f.u.at(k)).im
                + s.v[k] * re_int[k]
        })
        .collect();
    let fu = (0..u.len())
        .map(|k| {
            let a = u.at(k);
            a.scale(-0.5 * I * f.v[k]) + a.scale_re(vf[k]) + fux.at(k) - f.u.at(k).scale(I * s.v[k])
                + a.scale_re(re_int[k])
        })
        .collect();
    Ok(StateSys2 { v, u: fu })
}

pub fn recursion_sys2(grid: &PeriodicGrid, s: &StateSys2, f: &StateSys2) -> Result<StateSys2> {
    hop_sys2(grid, s, &jop_sys2(grid, s, f)?)
}

/// `∫ f_v g_v + Re(f̄_u·g_u)`.
pub fn pairing_sys2(grid: &PeriodicGrid, f: &StateSys2, g: &StateSys2) -> f64 {
    let vv: Vec<f64> = f.v.iter().zip(&g.v).map(|(a, b)| a * b).collect();
    grid.integrate_real(&vv) + grid.pairing(&f.u, &g.u)
}

fn mean<T: Copy + std::ops::Add<Output = T>>(xs: impl Iterator<Item = T>, zero: T) -> (T, usize) {
    let mut n = 0;
    let s = xs.fold(zero, |acc, x| {
        n += 1;
        acc + x
    });
    (s, n)
}

/// Integration-constant term `G = −u⟨{ūᵗu, Ĵ}⟩ − ū⟨uᵗ(uĴ) − (uĴ)ᵗu⟩`.
pub fn gauge_term_sys1(u: &SpinorField, j: &SU2Generator) -> SpinorField {
    let jm = j.matrix();
    let (a, n) = mean(u.iter().map(|s| Mat2::outer(s.conj(), s).anticommutator(&jm)), Mat2::ZERO);
    let (b, _) = mean(
        u.iter().map(|s| {
            let sj = s * jm;
            Mat2::outer(s, sj) - Mat2::outer(sj, s)
        }),
        Mat2::ZERO,
    );
    let inv = 1.0 / n.max(1) as f64;
    let (a, b) = (a.scale_re(inv), b.scale_re(inv));
    u.map(|s| -(s * a) - (s.conj() * b))
}

/// Integration-constant term `G = −iu⟨Im(ū·uĴ)⟩ − ½u⟨tf{ūᵗu, Ĵ}⟩` (u-component).
pub fn gauge_term_sys2(u: &SpinorField, j: &SU2Generator) -> SpinorField {
    let jm = j.matrix();
    let (t, n) = mean(u.iter().map(|s| s.cdot(s * jm).im), 0.0);
    let (a, _) = mean(
        u.iter().map(|s| Mat2::outer(s.conj(), s).anticommutator(&jm).trace_free()),
        Mat2::ZERO,
    );
    let inv = 1.0 / n.max(1) as f64;
    let (t, a) = (t * inv, a.scale_re(inv));
    u.map(|s| -s.scale(I * t) - (s * a).scale_re(0.5))
}

/// Central-difference real `L²` gradient of `h` with respect to every real
/// degree of freedom in `x`, divided by the grid spacing.
fn fd_gradient(grid: &PeriodicGrid, x: &mut [f64], step: f64, h: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let x0 = x[k];
            x[k] = x0 + step;
            let hp = h(x);
            x[k] = x0 - step;
            let hm = h(x);
            x[k] = x0;
            (hp - hm) / (2.0 * step * grid.spacing())
        })
        .collect()
}

fn pack_spinor(u: &SpinorField, out: &mut Vec<f64>) {
    for c in [&u.u1, &u.u2] {
        out.extend(c.iter().map(|z| z.re));
        out.extend(c.iter().map(|z| z.im));
    }
}

fn unpack_spinor(x: &[f64], n: usize) -> SpinorField {
    let comp = |o: usize| (0..n).map(|k| C64::new(x[o + k], x[o + n + k])).collect::<Vec<_>>();
    SpinorField { u1: comp(0), u2: comp(2 * n) }
}

/// Wirtinger half of a packed real gradient.
fn wirtinger(g: &[f64], n: usize) -> SpinorField {
    unpack_spinor(&g.iter().map(|x| 0.5 * x).collect::<Vec<_>>(), n)
}

fn rel_sup(a: &SpinorField, b: &SpinorField) -> f64 {
    let diff = (a - b).max_abs();
    let scale = b.max_abs();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Relative sup-norm mismatch between `Hop(δℋ/δū)` with a finite-difference
/// gradient and `rhs + G`. Zero state returns 0.
pub fn check_hamiltonian_sys1(grid: &PeriodicGrid, s: &StateSys1, j: &SU2Generator) -> Result<f64> {
    let amp = s.u.max_abs();
    if amp == 0.0 {
        return Ok(0.0);
    }
    let n = s.u.len();
    let mut x = Vec::with_capacity(4 * n);
    pack_spinor(&s.u, &mut x);
    let g = fd_gradient(grid, &mut x, 1e-6 * amp, |y| {
        hamiltonian_sys1(grid, &StateSys1 { u: unpack_spinor(y, n) }, j)
    });
    let lhs = hop_sys1(grid, &s.u, &wirtinger(&g, n))?;
    let flow = rhs_sys1(grid, s, j, EvalOptions::raw(MeanPolicy::Project))?.rate;
    let target = &flow + &gauge_term_sys1(&s.u, j);
    Ok(rel_sup(&lhs, &target))
}

/// As [`check_hamiltonian_sys1`]; `Hop` acts on `(½δℋ/δv, δℋ/δū)`.
pub fn check_hamiltonian_sys2(grid: &PeriodicGrid, s: &StateSys2, j: &SU2Generator) -> Result<f64> {
    let amp = s.u.max_abs().max(s.v.iter().fold(0.0, |m, v| m.max(v.abs())));
    if amp == 0.0 {
        return Ok(0.0);
    }
    let n = s.u.len();
    let mut x = s.v.clone();
    pack_spinor(&s.u, &mut x);
    let g = fd_gradient(grid, &mut x, 1e-6 * amp, |y| {
        let st = StateSys2 { v: y[..n].to_vec(), u: unpack_spinor(&y[n..], n) };
        hamiltonian_sys2(grid, &st, j)
    });
    let cov = StateSys2 {
        v: g[..n].iter().map(|x| 0.5 * x).collect(),
        u: wirtinger(&g[n..], n),
    };
    let lhs = hop_sys2(grid, s, &cov)?;
    let flow = rhs_sys2(grid, s, j, EvalOptions::raw(MeanPolicy::Project))?.rate;
    let target_u = &flow.u + &gauge_term_sys2(&s.u, j);
    let v_scale = flow.v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let v_diff = lhs.v.iter().zip(&flow.v).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    let u_rel = rel_sup(&lhs.u, &target_u);
    let scale = target_u.max_abs().max(v_scale);
    Ok(if scale == 0.0 { u_rel.max(v_diff) } else { u_rel.max(v_diff / scale) })
}
