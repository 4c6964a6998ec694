//! Spinor, quaternion and small-matrix algebra.
//!
//! Spinors are row vectors acted on from the right: `u Ĵ`. The quaternion
//! dictionary is `u = (u1, u2) ↦ u1 + u2 j` and `Ĵ ↦ q`, under which `u Ĵ`
//! becomes `ů q` and complex scalar multiplication `i u` becomes `i ů`.

mod generator;
mod mat2;
mod quaternion;
mod small;

pub use generator::SU2Generator;
pub use mat2::{Mat2, Spinor};
pub use quaternion::Quaternion;
pub use small::{cartan_killing, AlgebraTag, SmallMatrix, MAX_DIM};

use crate::C64;

/// `‖quat(uĴ) − quat(u)·q‖`.
pub fn check_spinor_quaternion_dictionary(u: Spinor, j: &SU2Generator) -> f64 {
    let lhs = Quaternion::from_spinor(u * j.matrix());
    let rhs = Quaternion::from_spinor(u) * j.to_quaternion();
    (lhs - rhs).norm()
}

/// Residuals of the two pointwise rewriting identities
/// `u(Ĵ ūᵗu)₀ = ½ i Im(ū·uĴ) u` and `u(ūᵗu Ĵ)₀ = |u|² uĴ − ½ i Im(ū·uĴ) u`.
pub fn rewrite_identity_residuals(u: Spinor, j: &SU2Generator) -> (f64, f64) {
    let jm = j.matrix();
    let a = Mat2::outer(u.conj(), u);
    let half_im = C64::new(0.0, 0.5 * u.cdot(u * jm).im);
    let r1 = u * (jm * a).trace_free() - u.scale(half_im);
    let r2 = u * (a * jm).trace_free() - (u * jm).scale_re(u.norm_sqr()) + u.scale(half_im);
    (r1.norm(), r2.norm())
}

/// `[[ia, b], [−b̄, −ia]] ↦ a i + Re b j + Im b k`, the su(2) part of a
/// 2×2 matrix read as an imaginary quaternion.
pub fn su2_to_quaternion(m: &Mat2) -> Quaternion {
    let s = m.proj_su();
    Quaternion::new(0.0, s.0[0][0].im, s.0[0][1].re, s.0[0][1].im)
}

pub fn quaternion_to_su2(q: Quaternion) -> Mat2 {
    let b = C64::new(q.y, q.z);
    Mat2::new(C64::new(0.0, q.x), b, -b.conj(), C64::new(0.0, -q.x))
}

impl From<Mat2> for SmallMatrix {
    fn from(m: Mat2) -> Self {
        SmallMatrix::from_fn(2, AlgebraTag::Generic, |i, j| m.0[i][j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictionary_on_basis_spinor() {
        let u = Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        assert_eq!(check_spinor_quaternion_dictionary(u, &SU2Generator::diagonal()), 0.0);
        assert_eq!(SU2Generator::diagonal().to_quaternion(), Quaternion::I);
    }

    #[test]
    fn identities_vanish_on_basis_spinor() {
        let u = Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let (r1, r2) = rewrite_identity_residuals(u, &SU2Generator::diagonal());
        assert!(r1 < 1e-15 && r2 < 1e-15);
    }

    #[test]
    fn su2_quaternion_round_trip() {
        let q = Quaternion::new(0.0, 0.3, -0.2, 0.9);
        assert_eq!(su2_to_quaternion(&quaternion_to_su2(q)), q);
    }

    #[test]
    fn complex_i_is_left_multiplication() {
        let u = Spinor::new(C64::new(0.4, -1.0), C64::new(2.0, 0.5));
        let lhs = Quaternion::from_spinor(u.scale(C64::i()));
        let rhs = Quaternion::I * Quaternion::from_spinor(u);
        assert!((lhs - rhs).norm() < 1e-15);
    }
}
