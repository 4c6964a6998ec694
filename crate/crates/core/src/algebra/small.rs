use crate::error::{QnlsError, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub const MAX_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraTag {
    Su2,
    Su4,
    So4,
    So6,
    /// Complex antisymmetric 2×2.
    So2C,
    /// Complex symmetric 2×2.
    S2C,
    Generic,
}

impl AlgebraTag {
    /// Scale in `K(X, Y) = c · Re tr(XY)`. The value 1 reproduces
    /// `K(e, e) = −2χ²` for the so(4) Cartan element `χ(E₀₁ − E₁₀)` and
    /// `K(e, e) = −4χ²` for the su(4) element `iχ diag(1, −1, 1, −1)`; the
    /// other tags use the same trace form.
    pub fn killing_scale(self) -> f64 {
        1.0
    }

    pub fn dim(self) -> Option<usize> {
        match self {
            AlgebraTag::Su2 | AlgebraTag::So2C | AlgebraTag::S2C => Some(2),
            AlgebraTag::Su4 | AlgebraTag::So4 => Some(4),
            AlgebraTag::So6 => Some(6),
            AlgebraTag::Generic => None,
        }
    }
}

impl fmt::Display for AlgebraTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraTag::Su2 => "su(2)",
            AlgebraTag::Su4 => "su(4)",
            AlgebraTag::So4 => "so(4)",
            AlgebraTag::So6 => "so(6)",
            AlgebraTag::So2C => "so(2,C)",
            AlgebraTag::S2C => "s(2,C)",
            AlgebraTag::Generic => "generic",
        };
        f.write_str(s)
    }
}

/// Dense complex `n×n` matrix, `n ≤ 6`, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct SmallMatrix {
    n: usize,
    a: [C64; MAX_DIM * MAX_DIM],
    tag: AlgebraTag,
}

impl fmt::Debug for SmallMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SmallMatrix<{}, {}>", self.n, self.tag)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl SmallMatrix {
    pub fn zeros(n: usize, tag: AlgebraTag) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} outside 1..=6");
        SmallMatrix { n, a: [C64::new(0.0, 0.0); MAX_DIM * MAX_DIM], tag }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, AlgebraTag::Generic);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, tag: AlgebraTag, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n, tag);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(n: usize, tag: AlgebraTag, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_fn(n, tag, |i, j| C64::new(f(i, j), 0.0))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn with_tag(mut self, tag: AlgebraTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| self[(i, j)]))
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut m = *self;
        for z in m.a.iter_mut() {
            *z = f(*z);
        }
        m
    }

    fn zip(&self, o: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let mut m = *self;
        for (z, w) in m.a.iter_mut().zip(o.a.iter()) {
            *z = f(*z, *w);
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.tag, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, self.tag, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `M − (tr M / n) I`.
    pub fn trace_free(&self) -> Self {
        let shift = self.trace() / self.n as f64;
        let mut m = *self;
        for i in 0..self.n {
            m[(i, i)] -= shift;
        }
        m
    }

    /// `trace_free((M − M†)/2)`.
    pub fn proj_su(&self) -> Self {
        (*self - self.adjoint()).scale_re(0.5).trace_free()
    }

    /// `(M − Mᵀ)/2`.
    pub fn proj_so(&self) -> Self {
        (*self - self.transpose()).scale_re(0.5)
    }

    pub fn commutator(&self, o: &Self) -> Self {
        *self * *o - *o * *self
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Re tr(X Y†)`.
    pub fn inner(&self, o: &Self) -> f64 {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (self[(i, j)] * o[(i, j)].conj()).re)
            .sum()
    }

    /// Deviation from the membership predicate of `tag` (0 when it holds).
    pub fn membership_residual(&self, tag: AlgebraTag) -> f64 {
        let imag = || self.entries().map(|z| z.im.abs()).fold(0.0, f64::max);
        match tag {
            AlgebraTag::Su2 | AlgebraTag::Su4 => {
                (*self + self.adjoint()).max_abs().max(self.trace().norm())
            }
            AlgebraTag::So4 | AlgebraTag::So6 => (*self + self.transpose()).max_abs().max(imag()),
            AlgebraTag::So2C => (*self + self.transpose()).max_abs(),
            AlgebraTag::S2C => (*self - self.transpose()).max_abs(),
            AlgebraTag::Generic => 0.0,
        }
    }

    pub fn satisfies_tag(&self, tol: f64) -> bool {
        match self.tag.dim() {
            Some(d) if d != self.n => false,
            _ => self.membership_residual(self.tag) <= tol,
        }
    }
}

/// `K(X, Y) = c_tag · Re tr(XY)`; both arguments must carry the same tag.
pub fn cartan_killing(x: &SmallMatrix, y: &SmallMatrix, tag: AlgebraTag) -> Result<f64> {
    for m in [x, y] {
        if m.tag != tag {
            return Err(QnlsError::TagMismatch { left: m.tag, right: tag });
        }
    }
    if x.n != y.n {
        return Err(QnlsError::InvalidInput(format!(
            "dimension mismatch {} vs {}",
            x.n, y.n
        )));
    }
    Ok(tag.killing_scale() * (*x * *y).trace().re)
}

impl std::ops::Index<(usize, usize)> for SmallMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.n && j < self.n);
        &self.a[i * MAX_DIM + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SmallMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.n && j < self.n);
        &mut self.a[i * MAX_DIM + j]
    }
}

impl Add for SmallMatrix {
    type Output = SmallMatrix;
    fn add(self, o: Self) -> Self {
        self.zip(&o, |a, b| a + b)
    }
}

impl Sub for SmallMatrix {
    type Output = SmallMatrix;
    fn sub(self, o: Self) -> Self {
        self.zip(&o, |a, b| a - b)
    }
}

impl Neg for SmallMatrix {
    type Output = SmallMatrix;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for SmallMatrix {
    type Output = SmallMatrix;
    fn mul(self, o: Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let n = self.n;
        let mut m = Self::zeros(n, self.tag);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += a * o[(k, j)];
                }
            }
        }
        m
    }
}
