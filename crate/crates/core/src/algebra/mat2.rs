use crate::C64;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Row 2-vector `u = (u1, u2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Spinor {
    pub u1: C64,
    pub u2: C64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor { u1: ZERO, u2: ZERO };

    pub const fn new(u1: C64, u2: C64) -> Self {
        Spinor { u1, u2 }
    }

    pub fn conj(self) -> Self {
        Spinor::new(self.u1.conj(), self.u2.conj())
    }

    /// `|u|² = |u1|² + |u2|²`.
    pub fn norm_sqr(self) -> f64 {
        self.u1.norm_sqr() + self.u2.norm_sqr()
    }

    /// `ū·w = Σ conj(u_k) w_k`.
    pub fn cdot(self, w: Spinor) -> C64 {
        self.u1.conj() * w.u1 + self.u2.conj() * w.u2
    }

    /// Bilinear `a·b = Σ a_k b_k` (no conjugation).
    pub fn dot(self, w: Spinor) -> C64 {
        self.u1 * w.u1 + self.u2 * w.u2
    }

    pub fn scale(self, s: C64) -> Self {
        Spinor::new(self.u1 * s, self.u2 * s)
    }

    pub fn scale_re(self, s: f64) -> Self {
        Spinor::new(self.u1 * s, self.u2 * s)
    }

    pub fn get(self, k: usize) -> C64 {
        match k {
            0 => self.u1,
            _ => self.u2,
        }
    }

    pub fn max_abs(self) -> f64 {
        self.u1.norm().max(self.u2.norm())
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, o: Spinor) -> Spinor {
        Spinor::new(self.u1 + o.u1, self.u2 + o.u2)
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, o: Spinor) {
        self.u1 += o.u1;
        self.u2 += o.u2;
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, o: Spinor) -> Spinor {
        Spinor::new(self.u1 - o.u1, self.u2 - o.u2)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.u1, -self.u2)
    }
}

/// Row vector times matrix: `(u M)_j = Σ_i u_i M_ij`.
impl Mul<Mat2> for Spinor {
    type Output = Spinor;
    fn mul(self, m: Mat2) -> Spinor {
        let a = &m.0;
        Spinor::new(
            self.u1 * a[0][0] + self.u2 * a[1][0],
            self.u1 * a[0][1] + self.u2 * a[1][1],
        )
    }
}

/// Complex 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        Mat2([[one, ZERO], [ZERO, one]])
    }

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    /// Column vector `aᵗ` times row vector `b`: entry (i,j) = a_i b_j.
    pub fn outer(a: Spinor, b: Spinor) -> Self {
        Mat2([[a.u1 * b.u1, a.u1 * b.u2], [a.u2 * b.u1, a.u2 * b.u2]])
    }

    /// `iε`-free antisymmetric unit `[[0,1],[-1,0]]`.
    pub fn epsilon() -> Self {
        let one = C64::new(1.0, 0.0);
        Mat2([[ZERO, one], [-one, ZERO]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn trace_free(&self) -> Self {
        let h = self.trace() * 0.5;
        let mut m = *self;
        m.0[0][0] -= h;
        m.0[1][1] -= h;
        m
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.0;
        Mat2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let a = &self.0;
        Mat2([[a[0][0], a[1][0]], [a[0][1], a[1][1]]])
    }

    pub fn conj(&self) -> Self {
        let a = &self.0;
        Mat2([[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]])
    }

    pub fn scale(&self, s: C64) -> Self {
        let a = &self.0;
        Mat2([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn commutator(&self, o: &Mat2) -> Self {
        *self * *o - *o * *self
    }

    pub fn anticommutator(&self, o: &Mat2) -> Self {
        *self * *o + *o * *self
    }

    /// Skew-Hermitian trace-free part.
    pub fn proj_su(&self) -> Self {
        (*self - self.adjoint()).scale_re(0.5).trace_free()
    }

    /// Skew (antisymmetric) part.
    pub fn proj_so(&self) -> Self {
        (*self - self.transpose()).scale_re(0.5)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    /// Imaginary unit times the identity.
    pub fn i_identity() -> Self {
        Mat2([[I, ZERO], [ZERO, I]])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}
