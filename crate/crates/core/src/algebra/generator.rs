use super::{Mat2, Quaternion};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Unit su(2) element `Ĵ(θ, ψ)` with `Ĵ² = −I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Angles", into = "Angles")]
pub struct SU2Generator {
    theta: f64,
    psi: f64,
    matrix: Mat2,
}

#[derive(Serialize, Deserialize)]
struct Angles {
    theta: f64,
    psi: f64,
}

impl From<Angles> for SU2Generator {
    fn from(a: Angles) -> Self {
        SU2Generator::new(a.theta, a.psi)
    }
}

impl From<SU2Generator> for Angles {
    fn from(j: SU2Generator) -> Self {
        Angles { theta: j.theta, psi: j.psi }
    }
}

impl SU2Generator {
    /// Angles are reduced mod 2π.
    pub fn new(theta: f64, psi: f64) -> Self {
        let theta = theta.rem_euclid(TAU);
        let psi = psi.rem_euclid(TAU);
        let (s, c) = theta.sin_cos();
        let phase = C64::from_polar(1.0, psi);
        let matrix = Mat2::new(
            C64::new(0.0, c),
            phase * s,
            -phase.conj() * s,
            C64::new(0.0, -c),
        );
        SU2Generator { theta, psi, matrix }
    }

    /// `Ĵ = diag(i, −i)`, the scalar-reduction generator.
    pub fn diagonal() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }

    /// Image under the spinor/quaternion dictionary: `u Ĵ ↔ ů q`.
    pub fn to_quaternion(&self) -> Quaternion {
        let (s, c) = self.theta.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        Quaternion::new(0.0, c, s * cp, s * sp)
    }

    /// `exp(φĴ) = cos φ I + sin φ Ĵ`.
    pub fn exp(&self, phi: f64) -> Mat2 {
        let (s, c) = phi.sin_cos();
        Mat2::identity().scale_re(c) + self.matrix.scale_re(s)
    }

    /// Largest deviation from the defining properties (anti-Hermitian,
    /// traceless, squares to −I, `tr(ĴĴ†) = 2`).
    pub fn invariant_residual(&self) -> f64 {
        let m = self.matrix;
        let skew = (m + m.adjoint()).frobenius();
        let tr = m.trace().norm();
        let sq = (m * m + Mat2::identity()).frobenius();
        let norm = ((m * m.adjoint()).trace() - C64::new(2.0, 0.0)).norm();
        skew.max(tr).max(sq).max(norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_zero_is_diagonal() {
        let j = SU2Generator::new(0.0, 0.0).matrix();
        assert_eq!(j, Mat2::new(C64::i(), C64::new(0.0, 0.0), C64::new(0.0, 0.0), -C64::i()));
    }

    #[test]
    fn theta_half_pi_is_real_rotation() {
        let j = SU2Generator::new(std::f64::consts::FRAC_PI_2, 0.0).matrix();
        let want = Mat2::epsilon();
        assert!((j - want).max_abs() < 1e-15);
    }

    #[test]
    fn angles_are_reduced() {
        let j = SU2Generator::new(7.0, -1.0);
        assert!(j.theta() >= 0.0 && j.theta() < TAU);
        assert!(j.psi() >= 0.0 && j.psi() < TAU);
        assert!((j.matrix() - SU2Generator::new(7.0 - TAU, TAU - 1.0).matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn serde_round_trip_keeps_angles() {
        let j = SU2Generator::new(0.3, 1.2);
        let s = serde_json::to_string(&j).unwrap();
        let back: SU2Generator = serde_json::from_str(&s).unwrap();
        assert_eq!(j, back);
    }
}
