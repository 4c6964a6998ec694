//! Complex structures `Ĵ_r` on the normal spaces of curves in the tangent
//! spaces `m` of su(4)/sp(2) (R⁵) and so(6)/u(3) (R⁶).
//!
//! At the reference point, where `r_x` is the unit Cartan direction, `Ĵ_r` is
//! the ad-action of the isotropy generator on `m`. Along the curve it is
//! carried by the parallel-transport frame of the tangent: `F_x = A F` with
//! `A T = T_x` and `A` minimal (in R⁶, `A` is also complex-linear so the
//! Hermitian element keeps commuting). For closed tangent fields the base
//! value is moved onto the rotation axis of the holonomy within the 2-sphere
//! of isotropy structures, which makes `Ĵ_r` periodic.

use super::column;
use crate::algebra::{AlgebraTag, SU2Generator, SmallMatrix, Spinor};
use crate::error::{QnlsError, Result};
use crate::grid::PeriodicGrid;
use crate::laxpair::{embed_h, embed_m, su4_u};
use crate::C64;
use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalCase {
    /// su(4)/sp(2), `m ≅ R⁵`.
    Su4Sp2,
    /// so(6)/u(3), `m ≅ R⁶ ≅ C³`.
    So6U3,
}

impl NormalCase {
    pub fn dimension(self) -> usize {
        match self {
            NormalCase::Su4Sp2 => 5,
            NormalCase::So6U3 => 6,
        }
    }

    pub fn tag(self) -> AlgebraTag {
        match self {
            NormalCase::Su4Sp2 => AlgebraTag::Su4,
            NormalCase::So6U3 => AlgebraTag::So6,
        }
    }

    /// Element of `m` with coordinates `r`; coordinate 0 is the Cartan
    /// direction. The coordinates are orthonormal up to a common factor.
    pub fn embed(self, r: &[f64]) -> SmallMatrix {
        let c = |a: f64, b: f64| C64::new(a, b);
        match self {
            NormalCase::Su4Sp2 => {
                let mut m = su4_u(Spinor::new(c(r[1], r[2]), c(r[3], r[4])), 0.0);
                for k in 0..4 {
                    m[(k, k)] = c(0.0, if k % 2 == 0 { r[0] } else { -r[0] });
                }
                m
            }
            NormalCase::So6U3 => {
                let mut a = [[ZERO; 3]; 3];
                for (i, j, z) in [(0, 1, c(r[0], r[1])), (0, 2, c(r[2], r[3])), (1, 2, c(r[4], r[5]))] {
                    a[i][j] = z;
                    a[j][i] = -z;
                }
                embed_m(&a)
            }
        }
    }

    pub fn coords(self, m: &SmallMatrix) -> Vec<f64> {
        match self {
            NormalCase::Su4Sp2 => {
                let (x01, x03) = (m[(0, 1)], m[(0, 3)]);
                vec![m[(0, 0)].im, x01.re, x01.im, x03.re, -x03.im]
            }
            NormalCase::So6U3 => [(0, 1), (0, 4), (0, 2), (0, 5), (1, 2), (1, 5)]
                .iter()
                .map(|&(i, j)| m[(i, j)].re)
                .collect(),
        }
    }

    /// Isotropy element whose ad-action realizes `u ↦ uĴ` on the normal space
    /// of the Cartan direction.
    pub fn isotropy(self, j: &SU2Generator) -> SmallMatrix {
        let jm = j.matrix();
        match self {
            NormalCase::Su4Sp2 => {
                let mut y = SmallMatrix::zeros(4, AlgebraTag::Su4);
                y[(0, 0)] = jm.0[0][0];
                y[(0, 2)] = jm.0[0][1].conj();
                y[(2, 0)] = jm.0[1][0].conj();
                y[(2, 2)] = jm.0[1][1];
                y
            }
            NormalCase::So6U3 => {
                let mut b = [[ZERO; 3]; 3];
                for r in 0..2 {
                    for c in 0..2 {
                        b[r][c] = jm.0[r][c];
                    }
                }
                embed_h(&b)
            }
        }
    }

    /// Central u(3) element generating the complex structure of R⁶ ≅ C³.
    pub fn hermitian_element(self) -> Option<SmallMatrix> {
        match self {
            NormalCase::Su4Sp2 => None,
            NormalCase::So6U3 => {
                let i = C64::new(0.0, 1.0);
                let b = [[i, ZERO, ZERO], [ZERO, i, ZERO], [ZERO, ZERO, i]];
                Some(embed_h(&b).scale_re(-0.5))
            }
        }
    }

    /// Matrix of `X ↦ [Y, X]` on `m` in the coordinates of [`Self::embed`].
    pub fn ad_matrix(self, y: &SmallMatrix) -> DMatrix<f64> {
        let n = self.dimension();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.coords(&y.commutator(&self.embed(&e)));
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Unit Cartan direction in coordinates.
    pub fn cartan_direction(self) -> DVector<f64> {
        DVector::from_fn(self.dimension(), |i, _| if i == 0 { 1.0 } else { 0.0 })
    }

    /// `ad(𝐉)`, squaring to `−I` on R⁶.
    fn complex_unit(self) -> Option<DMatrix<f64>> {
        self.hermitian_element().map(|h| self.ad_matrix(&h))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalComplexStructure {
    pub case: NormalCase,
    /// One real `dim × dim` matrix per sample.
    pub j_r: Vec<DMatrix<f64>>,
    pub sign_choice: i8,
    /// Unit tangent used in the construction.
    pub tangent: Vec<DVector<f64>>,
    /// `max ‖FᵀF − I‖` of the transported frames.
    pub frame_defect: f64,
}

/// Largest violations of the defining properties over all samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    pub annihilation: f64,
    pub square: f64,
    /// `‖Ĵ_r(ad(𝐉)r_x)‖`; zero in the R⁵ case.
    pub hermitian: f64,
    pub skew: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        self.annihilation.max(self.square).max(self.hermitian).max(self.skew)
    }
}

impl NormalComplexStructure {
    pub fn apply(&self, k: usize, v: &[f64]) -> DVector<f64> {
        &self.j_r[k] * DVector::from_column_slice(v)
    }

    /// The structure of opposite sign.
    pub fn flipped(&self) -> Self {
        let mut s = self.clone();
        s.j_r.iter_mut().for_each(|m| *m *= -1.0);
        s.sign_choice = -s.sign_choice;
        s
    }

    pub fn residuals(&self) -> StructureResiduals {
        let n = self.case.dimension();
        let jc = self.case.complex_unit();
        let mut r = StructureResiduals { annihilation: 0.0, square: 0.0, hermitian: 0.0, skew: 0.0 };
        for (jr, t) in self.j_r.iter().zip(&self.tangent) {
            r.annihilation = r.annihilation.max((jr * t).amax());
            let mut perp = DMatrix::identity(n, n) - t * t.transpose();
            if let Some(jc) = &jc {
                let it = jc * t;
                r.hermitian = r.hermitian.max((jr * &it).amax());
                perp -= &it * it.transpose();
            }
            r.square = r.square.max((jr * jr + perp).amax());
            r.skew = r.skew.max((jr + jr.transpose()).amax());
        }
        r
    }
}

/// Band-limited interpolant of a periodic vector field and its derivative.
struct Interpolant {
    coeffs: Vec<Vec<(f64, C64)>>,
}

impl Interpolant {
    fn new(grid: &PeriodicGrid, f: &[Vec<f64>]) -> Self {
        let n = grid.n();
        let coeffs = f
            .iter()
            .map(|c| {
                let hat = grid.fft(&crate::grid::complexify(c));
                hat.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != n / 2)
                    .map(|(j, z)| (grid.wavenumber(j), z / n as f64))
                    .collect()
            })
            .collect();
        Interpolant { coeffs }
    }

    fn eval(&self, x: f64) -> (DVector<f64>, DVector<f64>) {
        let d = self.coeffs.len();
        let mut v = DVector::zeros(d);
        let mut vx = DVector::zeros(d);
        for (i, c) in self.coeffs.iter().enumerate() {
            let (mut s, mut sx) = (ZERO, ZERO);
            for &(k, z) in c {
                let e = z * C64::from_polar(1.0, k * x);
                s += e;
                sx += e * C64::new(0.0, k);
            }
            v[i] = s.re;
            vx[i] = sx.re;
        }
        (v, vx)
    }
}

/// Real operator `z ↦ a h(b, z)` for the Hermitian form
/// `h(b, z) = b·z + i (J b)·z` with `i` acting as `J`.
fn complex_outer(a: &DVector<f64>, b: &DVector<f64>, jc: &DMatrix<f64>) -> DMatrix<f64> {
    a * b.transpose() + (jc * a) * (jc * b).transpose()
}

/// Transport generator with `A t = t_x`; complex-linear when `jc` is given.
fn generator(t: &DVector<f64>, tx: &DVector<f64>, jc: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    match jc {
        None => tx * t.transpose() - t * tx.transpose(),
        Some(jc) => {
            let omega = (jc * t).dot(tx);
            complex_outer(tx, t, jc) - complex_outer(t, tx, jc) - jc * complex_outer(t, t, jc) * omega
        }
    }
}

/// Rotation taking unit `a` to unit `b`, acting trivially off their span
/// (off their complex span when `jc` is given).
fn minimal_rotation(a: &DVector<f64>, b: &DVector<f64>, jc: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    let n = a.len();
    let id = DMatrix::identity(n, n);
    match jc {
        None => {
            let c = a.dot(b);
            if c < -0.5 {
                let m = orthogonal_to(&[a, b], None);
                return minimal_rotation(&m, b, None) * minimal_rotation(a, &m, None);
            }
            let k = b * a.transpose() - a * b.transpose();
            &id + &k + &k * &k / (1.0 + c)
        }
        Some(jc) => {
            let h = C64::new(a.dot(b), (jc * a).dot(b));
            let phi = if h.norm() > 1e-300 { h.arg() } else { 0.0 };
            let bt = b * phi.cos() - (jc * b) * phi.sin();
            let k = complex_outer(&bt, a, jc) - complex_outer(a, &bt, jc);
            let rot = &id + &k + &k * &k / (1.0 + h.norm());
            let phase = (&id * (phi.cos() - 1.0) + jc * phi.sin()) * complex_outer(&bt, &bt, jc);
            (id + phase) * rot
        }
    }
}

/// A unit vector orthogonal to all of `vs` (and their `J`-images).
fn orthogonal_to(vs: &[&DVector<f64>], jc: Option<&DMatrix<f64>>) -> DVector<f64> {
    let n = vs[0].len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        basis.push((*v).clone());
        if let Some(jc) = jc {
            basis.push(jc * *v);
        }
    }
    let mut best = DVector::zeros(n);
    for i in 0..n {
        let mut e = DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for b in &basis {
                let bn = b.norm_squared();
                if bn > 0.0 {
                    e -= b * (b.dot(&e) / bn);
                }
            }
        }
        if e.norm() > best.norm() {
            best = e;
        }
    }
    best.normalize()
}

fn unit_tangents(tangent: &[Vec<f64>]) -> Result<Vec<DVector<f64>>> {
    let n = tangent[0].len();
    (0..n)
        .map(|k| {
            let v = DVector::from_vec(column(tangent, k));
            let s = v.norm();
            if !(s > 0.5) || !s.is_finite() {
                return Err(QnlsError::DegenerateTangent { index: k });
            }
            Ok(v / s)
        })
        .collect()
}

/// `Ĵ_r` for a curve; see [`structure_from_tangent`].
pub fn build_normal_structure(
    grid: &PeriodicGrid,
    c: &super::CurveState,
    case: NormalCase,
    j: &SU2Generator,
) -> Result<NormalComplexStructure> {
    structure_from_tangent(grid, &c.tangent(grid), case, j)
}

/// `Ĵ_r` along a periodic tangent field (component-major, `dim` rows).
pub fn structure_from_tangent(
    grid: &PeriodicGrid,
    tangent: &[Vec<f64>],
    case: NormalCase,
    j: &SU2Generator,
) -> Result<NormalComplexStructure> {
    let dim = case.dimension();
    if tangent.len() != dim || tangent.iter().any(|c| c.len() != grid.n()) {
        return Err(QnlsError::InvalidInput(format!(
            "{case:?} needs a {dim}-component tangent on {} samples",
            grid.n()
        )));
    }
    let ts = unit_tangents(tangent)?;
    let jc = case.complex_unit();
    let jc = jc.as_ref();
    let interp = Interpolant::new(grid, tangent);
    let e = case.cartan_direction();

    let n = grid.n();
    let h = grid.spacing();
    let g = 3f64.sqrt() / 6.0;
    let mut frames = Vec::with_capacity(n + 1);
    frames.push(minimal_rotation(&e, &ts[0], jc));
    for k in 0..n {
        let x = grid.point(k);
        let gen = |s: f64| {
            let (t, tx) = interp.eval(x + s * h);
            generator(&t, &tx, jc)
        };
        let (a1, a2) = (gen(0.5 - g), gen(0.5 + g));
        let omega = (&a1 + &a2) * (0.5 * h) + (&a2 * &a1 - &a1 * &a2) * (3f64.sqrt() * h * h / 12.0);
        let mut f = omega.exp() * &frames[k];
        let target = &ts[(k + 1) % n];
        let carried = (&f * &e).normalize();
        f = minimal_rotation(&carried, target, jc) * f;
        frames.push(f);
    }
    let holonomy = frames[0].transpose() * &frames[n];

    let quaternion_units = [(0.0, 0.0), (FRAC_PI_2, 0.0), (FRAC_PI_2, FRAC_PI_2)];
    let omegas: Vec<DMatrix<f64>> = quaternion_units
        .iter()
        .map(|&(th, ps)| case.ad_matrix(&case.isotropy(&SU2Generator::new(th, ps))))
        .collect();
    let q = j.to_quaternion();
    let weights = [q.x, q.y, q.z];
    let base = holonomy_axis(&omegas, &holonomy, weights);

    let frame_defect = frames
        .iter()
        .map(|f| (f.transpose() * f - DMatrix::identity(dim, dim)).amax())
        .fold(0.0, f64::max);
    let j_r = frames[..n].iter().map(|f| f * &base * f.transpose()).collect();
    Ok(NormalComplexStructure { case, j_r, sign_choice: 1, tangent: ts, frame_defect })
}

/// Base structure `Σ a_i ω_i` commuting with the holonomy. When the holonomy
/// acts trivially the requested structure `Σ w_i ω_i` is returned unchanged.
fn holonomy_axis(omegas: &[DMatrix<f64>], hol: &DMatrix<f64>, w: [f64; 3]) -> DMatrix<f64> {
    let inner = |a: &DMatrix<f64>, b: &DMatrix<f64>| a.component_mul(b).sum();
    let gram = inner(&omegas[0], &omegas[0]);
    let m = Matrix3::from_fn(|i, k| inner(&omegas[i], &(hol * &omegas[k] * hol.transpose())) / gram);
    let combine = |a: [f64; 3]| {
        omegas.iter().zip(a).fold(DMatrix::zeros(hol.nrows(), hol.ncols()), |acc, (o, c)| acc + o * c)
    };
    if (m - Matrix3::identity()).amax() < 1e-12 {
        return combine(w);
    }
    let eig = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let top = eig.eigenvalues.imax();
    let mut axis = eig.eigenvectors.column(top).into_owned();
    let wv = nalgebra::Vector3::from(w);
    if axis.dot(&wv) < 0.0 {
        axis = -axis;
    }
    combine([axis[0], axis[1], axis[2]])
}
