use super::Spinor;
use crate::C64;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Real quaternion `w + x i + y j + z k` with `k = ij`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part `x i + y j + z k`.
    pub fn im(self) -> Self {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// Dictionary `(u1, u2) ↦ u1 + u2 j`, so `z j = j z̄` for complex `z`.
    pub fn from_spinor(u: Spinor) -> Self {
        Quaternion::new(u.u1.re, u.u1.im, u.u2.re, u.u2.im)
    }

    pub fn to_spinor(self) -> Spinor {
        Spinor::new(C64::new(self.w, self.x), C64::new(self.y, self.z))
    }

    pub fn commutator(self, o: Self) -> Self {
        self * o - o * self
    }

    pub fn anticommutator(self, o: Self) -> Self {
        self * o + o * self
    }

    pub fn as_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Self) -> Self {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Self) -> Self {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}
