use super::LaxField;
use crate::algebra::{AlgebraTag, Mat2, SU2Generator, SmallMatrix, Spinor};
use crate::error::Result;
use crate::grid::{MeanPolicy, PeriodicGrid, SpinorField};
use crate::systems::{nonlocal_v, nonlocal_x, GaugeConstants, StateSys1, StateSys2};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Integrated quantities inside the su(4) `V`, with the ¼ scaling of the
/// zero-curvature derivation: `V` carries four times each of them.
#[derive(Clone, Debug)]
pub struct AuxSys1 {
    pub h_par: f64,
    /// `¼ u_xĴ + c1 u`.
    pub w: SpinorField,
    /// `¼ Im(ū·uĴ) + C1`.
    pub big_w_par: Vec<f64>,
    /// `¼ (uᵗ(uĴ) − (uĴ)ᵗu) + CC1`.
    pub ww_par: Vec<Mat2>,
    /// `½ D⁻¹(ūᵗu_xĴ + Ĵū_xᵗu)₀ + CC2`.
    pub w_par: Vec<Mat2>,
    pub removed_mean: f64,
}

impl AuxSys1 {
    /// Complex entry `W₂∥` of `𝕎∥ = [[0, conj W₂∥], [−conj W₂∥, 0]]`.
    pub fn w2_par(&self) -> Vec<C64> {
        self.ww_par.iter().map(|m| m.0[0][1].conj()).collect()
    }
}

pub fn compute_aux_sys1(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    gauge: &GaugeConstants,
    policy: MeanPolicy,
) -> Result<AuxSys1> {
    let jm = j.matrix();
    let u = &s.u;
    let ux = grid.dx_spinor(u);
    let (nl, removed_mean) = nonlocal_x(grid, u, &ux, jm, policy)?;
    Ok(AuxSys1 {
        h_par: gauge.c1,
        w: u.zip_map(&ux, |a, ax| (ax * jm).scale_re(0.25) + a.scale_re(gauge.c1)),
        big_w_par: u.iter().map(|a| 0.25 * a.cdot(a * jm).im + gauge.big_c1).collect(),
        ww_par: u
            .iter()
            .map(|a| {
                let aj = a * jm;
                (Mat2::outer(a, aj) - Mat2::outer(aj, a)).scale_re(0.25) + gauge.cc1
            })
            .collect(),
        w_par: nl.iter().map(|m| m.scale_re(0.5) + gauge.cc2).collect(),
        removed_mean,
    })
}

/// Integrated quantities inside the so(6) `V`.
#[derive(Clone, Debug)]
pub struct AuxSys2 {
    pub h_par: f64,
    /// `½ Im(ū·uĴ) + c1 v`.
    pub big_w: Vec<f64>,
    /// `u_xĴ − i v uĴ + c1 u`.
    pub w: SpinorField,
    /// `Im(ū·uĴ) + C1`.
    pub big_w_par: Vec<f64>,
    /// `D⁻¹(ūᵗu_xĴ + Ĵū_xᵗu)₀ + i D⁻¹(v[Ĵ, ūᵗu]) + CC2`.
    pub w_par: Vec<Mat2>,
    pub h_perp: Vec<f64>,
    pub removed_mean: f64,
}

pub fn compute_aux_sys2(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    gauge: &GaugeConstants,
    policy: MeanPolicy,
) -> Result<AuxSys2> {
    let jm = j.matrix();
    let u = &s.u;
    let ux = grid.dx_spinor(u);
    let opts = crate::systems::EvalOptions::raw(policy);
    let (nl1, m1) = nonlocal_x(grid, u, &ux, jm, policy)?;
    let (nl2, m2) = nonlocal_v(grid, s, jm, opts)?;
    let w = (0..u.len())
        .map(|k| {
            let a = u.at(k);
            (ux.at(k) * jm) - (a * jm).scale(C64::new(0.0, s.v[k])) + a.scale_re(gauge.c1)
        })
        .collect();
    Ok(AuxSys2 {
        h_par: gauge.c1,
        big_w: u.iter().zip(&s.v).map(|(a, &v)| 0.5 * a.cdot(a * jm).im + gauge.c1 * v).collect(),
        w,
        big_w_par: u.iter().map(|a| a.cdot(a * jm).im + gauge.big_c1).collect(),
        w_par: nl1.iter().zip(&nl2).map(|(a, b)| *a + *b + gauge.cc2).collect(),
        h_perp: vec![0.0; u.len()],
        removed_mean: m1.max(m2),
    })
}

/// so(4) pair of the scalar NLS `u_t = i(u_xx + ½|u|²u)`.
pub fn build_lax_nls(grid: &PeriodicGrid, u: &[C64], chi: f64) -> LaxField {
    let ux = grid.dx(u);
    let mut uu = Vec::with_capacity(u.len());
    let mut vv = Vec::with_capacity(u.len());
    for (z, zx) in u.iter().zip(&ux) {
        let mut a = SmallMatrix::zeros(4, AlgebraTag::So4);
        let r = |x: f64| C64::new(x, 0.0);
        a[(0, 1)] = r(chi);
        a[(1, 0)] = r(-chi);
        a[(1, 2)] = r(z.re);
        a[(1, 3)] = r(z.im);
        a[(2, 1)] = r(-z.re);
        a[(3, 1)] = r(-z.im);
        uu.push(a);

        let m = 0.5 * z.norm_sqr() - chi * chi;
        let mut b = SmallMatrix::zeros(4, AlgebraTag::So4);
        b[(0, 2)] = r(chi * z.im);
        b[(0, 3)] = r(-chi * z.re);
        b[(1, 2)] = r(-zx.im);
        b[(1, 3)] = r(zx.re);
        b[(2, 0)] = r(-chi * z.im);
        b[(2, 1)] = r(zx.im);
        b[(2, 3)] = r(m);
        b[(3, 0)] = r(chi * z.re);
        b[(3, 1)] = r(-zx.re);
        b[(3, 2)] = r(-m);
        vv.push(b);
    }
    LaxField { tag: AlgebraTag::So4, chi, u: uu, v: vv }
}

pub(crate) fn su4_u(a: Spinor, chi: f64) -> SmallMatrix {
    let (u1, u2) = (a.u1, a.u2);
    let ic = C64::new(0.0, chi);
    let rows = [
        [ic, u1, ZERO, u2.conj()],
        [-u1.conj(), -ic, u2.conj(), ZERO],
        [ZERO, -u2, ic, u1.conj()],
        [-u2, ZERO, -u1, -ic],
    ];
    SmallMatrix::from_fn(4, AlgebraTag::Su4, |i, j| rows[i][j])
}

/// su(4) pair of the first SU(2) system, built from the canonical-gauge
/// auxiliary potentials.
pub fn build_lax_sys1(
    grid: &PeriodicGrid,
    s: &StateSys1,
    j: &SU2Generator,
    chi: f64,
    policy: MeanPolicy,
) -> Result<LaxField> {
    let aux = compute_aux_sys1(grid, s, j, &GaugeConstants::canonical(chi, j), policy)?;
    let jm = j.matrix();
    let ic2 = C64::new(0.0, 2.0 * chi);
    let mut uu = Vec::with_capacity(s.u.len());
    let mut vv = Vec::with_capacity(s.u.len());
    for k in 0..s.u.len() {
        let a = s.u.at(k);
        uu.push(su4_u(a, chi));

        let uj = a * jm;
        let uxj = aux.w.at(k).scale_re(4.0);
        let (ujb, uxjb) = (uj.conj(), uxj.conj());
        let wpar = aux.w_par[k].scale_re(4.0);
        let w1 = (C64::i() * wpar.0[0][0]).re;
        let w2 = wpar.0[1][0];
        let big_w2 = aux.ww_par[k].0[0][1].conj() * 4.0;
        let d = C64::new(0.0, 4.0 * aux.big_w_par[k]);
        let iw1 = C64::new(0.0, w1);
        let rows = [
            [iw1, -ic2 * uj.u1 + uxj.u1, w2, -ic2 * ujb.u2 + uxjb.u2],
            [-ic2 * ujb.u1 - uxjb.u1, d, ic2 * ujb.u2 + uxjb.u2, big_w2],
            [-w2.conj(), ic2 * uj.u2 - uxj.u2, -iw1, -ic2 * ujb.u1 + uxjb.u1],
            [-ic2 * uj.u2 - uxj.u2, -big_w2.conj(), -ic2 * uj.u1 - uxj.u1, -d],
        ];
        vv.push(SmallMatrix::from_fn(4, AlgebraTag::Su4, |i, j| rows[i][j]));
    }
    Ok(LaxField { tag: AlgebraTag::Su4, chi, u: uu, v: vv })
}

/// `A ↦ [[Re A, Im A], [Im A, −Re A]]` for complex antisymmetric `A`.
pub fn embed_m(a: &[[C64; 3]; 3]) -> SmallMatrix {
    SmallMatrix::from_real(6, AlgebraTag::So6, |i, j| {
        let z = a[i % 3][j % 3];
        match (i < 3, j < 3) {
            (true, true) => z.re,
            (true, false) | (false, true) => z.im,
            (false, false) => -z.re,
        }
    })
}

/// `B ↦ [[Re B, Im B], [−Im B, Re B]]` for anti-Hermitian `B`.
pub fn embed_h(b: &[[C64; 3]; 3]) -> SmallMatrix {
    SmallMatrix::from_real(6, AlgebraTag::So6, |i, j| {
        let z = b[i % 3][j % 3];
        match (i < 3, j < 3) {
            (true, true) | (false, false) => z.re,
            (true, false) => z.im,
            (false, true) => -z.im,
        }
    })
}

/// Cartan direction `E₀₁ − E₁₀` of so(3, C).
pub(crate) fn cartan_3() -> [[C64; 3]; 3] {
    let one = C64::new(1.0, 0.0);
    [[ZERO, one, ZERO], [-one, ZERO, ZERO], [ZERO, ZERO, ZERO]]
}

/// so(6) pair of the second SU(2) system.
pub fn build_lax_sys2(
    grid: &PeriodicGrid,
    s: &StateSys2,
    j: &SU2Generator,
    chi: f64,
    policy: MeanPolicy,
) -> Result<LaxField> {
    let aux = compute_aux_sys2(grid, s, j, &GaugeConstants::canonical(chi, j), policy)?;
    let jm = j.matrix();
    let e = embed_m(&cartan_3()).scale_re(chi);
    let mut uu = Vec::with_capacity(s.u.len());
    let mut vv = Vec::with_capacity(s.u.len());
    for k in 0..s.u.len() {
        let a = s.u.at(k);
        let iv = C64::new(0.0, s.v[k]);
        let big_u = [
            [iv, ZERO, a.u1],
            [ZERO, iv, a.u2],
            [-a.u1.conj(), -a.u2.conj(), ZERO],
        ];
        uu.push(e + embed_h(&big_u));

        let uj = a * jm;
        let mut h = [[ZERO; 3]; 3];
        h[0][2] = -uj.u2;
        h[1][2] = uj.u1;
        h[2][0] = uj.u2;
        h[2][1] = -uj.u1;

        let wk = aux.w.at(k);
        let wp = aux.w_par[k].conj();
        let iw = C64::new(0.0, aux.big_w[k]);
        let mut ww = [[ZERO; 3]; 3];
        for r in 0..2 {
            for c in 0..2 {
                ww[r][c] = wp.0[r][c] + if r == c { iw } else { ZERO };
            }
        }
        ww[0][2] = wk.u1;
        ww[1][2] = wk.u2;
        ww[2][0] = -wk.u1.conj();
        ww[2][1] = -wk.u2.conj();
        ww[2][2] = C64::new(0.0, aux.big_w_par[k]);
        vv.push(embed_m(&h).scale_re(chi) + embed_h(&ww));
    }
    Ok(LaxField { tag: AlgebraTag::So6, chi, u: uu, v: vv })
}
