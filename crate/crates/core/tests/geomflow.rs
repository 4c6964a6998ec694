use nalgebra::DMatrix;
use qnls::geomflow::{self, CurveState, NormalCase, SphereCase};
use qnls::initial;
use qnls::integrator::{evolve, Scheme, State, SystemSpec};
use qnls::systems::StateNls;
use qnls::{EvolutionConfig, PeriodicGrid, QnlsError, SU2Generator, C64};
use std::f64::consts::TAU;

fn max_abs(v: &[Vec<f64>]) -> f64 {
    v.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn straight_line_does_not_move() {
    let g = PeriodicGrid::new(32, 3.0).unwrap();
    let c = geomflow::line(&g, 3).unwrap();
    assert_eq!(max_abs(&geomflow::binormal_rhs_r3(&g, &c).unwrap()), 0.0);
    let err = geomflow::hasimoto_map(&g, &c, geomflow::DEFAULT_KAPPA_MIN).unwrap_err();
    assert!(matches!(err, QnlsError::FrameDegeneracy { .. }));
}

#[test]
fn circle_velocity_is_binormal_over_radius() {
    let radius = 1.7;
    let (g, c) = geomflow::circle(3, 64, radius).unwrap();
    let v = geomflow::binormal_rhs_r3(&g, &c).unwrap();
    for k in 0..64 {
        assert!(v[0][k].abs() < 1e-12 && v[1][k].abs() < 1e-12);
        assert!((v[2][k] - 1.0 / radius).abs() < 1e-12);
    }
    let u = geomflow::hasimoto_map(&g, &c, 1e-8).unwrap();
    assert!(u.u.iter().all(|z| (z - C64::new(1.0 / radius, 0.0)).norm() < 1e-12));
}

#[test]
fn helix_matches_closed_form_curvature_and_torsion() {
    let (a, b) = (1.2, 0.7);
    let (g, c) = geomflow::helix(64, a, b, 2).unwrap();
    let d = a * a + b * b;
    let (kappa, tau) = (a / d, b / d);
    let f = geomflow::frenet_frame(&g, &c, 1e-8).unwrap();
    assert!(f.orthonormality_defect() < 1e-12);
    let v = geomflow::binormal_rhs_r3(&g, &c).unwrap();
    for k in 0..64 {
        assert!((f.kappa[k] - kappa).abs() < 1e-12);
        assert!((f.tau[k] - tau).abs() < 1e-12);
        for i in 0..3 {
            assert!((v[i][k] - kappa * f.b[k][i]).abs() < 1e-12);
        }
    }
    let u = geomflow::hasimoto_map(&g, &c, 1e-8).unwrap();
    for (z, x) in u.u.iter().zip(g.points()) {
        assert!((z - C64::from_polar(kappa, tau * x)).norm() < 1e-10);
    }
}

#[test]
fn circle_translates_rigidly() {
    let radius = 1.0;
    let (g, c) = geomflow::circle(3, 32, radius).unwrap();
    let cfg = EvolutionConfig::new(1e-3, 1.0).with_stride(250);
    let traj = geomflow::evolve_filament(&g, &c, &cfg).unwrap();
    let last = traj.curves.last().unwrap();
    let t = *traj.times.last().unwrap();
    for k in 0..32 {
        assert!((last.r[0][k] - c.r[0][k]).abs() < 1e-8);
        assert!((last.r[1][k] - c.r[1][k]).abs() < 1e-8);
        assert!((last.r[2][k] - t / radius).abs() < 1e-8);
    }
    assert!(traj.max_speed_drift() < 1e-12);
}

fn perturbed_circle(n: usize, seed: u64) -> (PeriodicGrid, CurveState) {
    let g = PeriodicGrid::new(n, TAU).unwrap();
    let c = geomflow::random_curve(&g, 3, &mut initial::rng(seed), 3, 0.15).unwrap();
    (g, c)
}

#[test]
fn perturbed_circle_keeps_unit_speed() {
    let (g, c) = perturbed_circle(64, 1);
    let cfg = EvolutionConfig::new(5e-4, 1.0).with_stride(500);
    let traj = geomflow::evolve_filament(&g, &c, &cfg).unwrap();
    assert!(traj.max_speed_drift() < 1e-6, "{}", traj.max_speed_drift());
}

#[test]
fn hasimoto_image_follows_nls() {
    let (g, c) = perturbed_circle(128, 2);
    let (dt, t_final) = (2.5e-4, 0.2);
    let cfg = EvolutionConfig::new(dt, t_final).with_stride(800);
    let fil = geomflow::evolve_filament(&g, &c, &cfg).unwrap();
    let h0 = fil.hasimoto[0].clone().unwrap();
    let spec = SystemSpec::Nls(h0.nls_params());
    let ncfg = EvolutionConfig::new(dt, t_final).with_stride(800).with_scheme(Scheme::IfRk4);
    let nls = evolve(&g, &spec, &State::Nls(StateNls { u: h0.periodic_part(&g) }), &ncfg).unwrap();
    let State::Nls(fin) = nls.final_state() else { panic!() };
    let (m_nls, p_nls) = geomflow::filament_observables(&g, &fin.u, h0.carrier);
    let (m_fil, p_fil) = fil.hasimoto.last().unwrap().clone().unwrap().observables(&g);
    let dm = m_nls.iter().zip(&m_fil).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let dp = p_nls.iter().zip(&p_fil).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dm < 1e-3 && dp < 1e-3, "{dm} {dp}");
}

#[test]
fn s2_schrodinger_map_holds() {
    let (g, c) = geomflow::circle(3, 32, 1.0).unwrap();
    let cfg = EvolutionConfig::new(1e-3, 0.2).with_stride(100);
    let traj = geomflow::evolve_filament(&g, &c, &cfg).unwrap();
    let gam: Vec<_> = traj.curves.iter().map(|c| c.tangent(&g)).collect();
    let r = geomflow::schrodinger_map_residual(&g, &gam, 0.1, SphereCase::S2).unwrap();
    assert!(r < 1e-6, "{r}");

    let (g, c) = perturbed_circle(64, 3);
    let res = |spacing: f64| {
        let cfg = EvolutionConfig::new(spacing / 20.0, 0.1 + spacing).with_stride(20);
        let t = geomflow::evolve_filament(&g, &c, &cfg).unwrap();
        let n = t.curves.len();
        let gam: Vec<_> = t.curves[n - 3..].iter().map(|c| c.tangent(&g)).collect();
        geomflow::schrodinger_map_residual(&g, &gam, spacing, SphereCase::S2).unwrap()
    };
    let p = (res(0.01) / res(0.005)).log2();
    assert!((p - 2.0).abs() < 0.2, "order {p}");
}

#[test]
fn reference_alignment_gives_the_isotropy_action() {
    let j = SU2Generator::new(0.8, 1.1);
    for case in [NormalCase::Su4Sp2, NormalCase::So6U3] {
        let dim = case.dimension();
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let c = geomflow::line(&g, dim).unwrap();
        let s = geomflow::build_normal_structure(&g, &c, case, &j).unwrap();
        let reference = case.ad_matrix(&case.isotropy(&j));
        for m in &s.j_r {
            assert!((m - &reference).amax() < 1e-12, "{case:?}");
        }
        assert!(s.residuals().max() < 1e-12);
    }
}

#[test]
fn isotropy_action_is_right_multiplication_by_generator() {
    let j = SU2Generator::new(1.3, -0.4);
    let jm = j.matrix();
    let ad = NormalCase::Su4Sp2.ad_matrix(&NormalCase::Su4Sp2.isotropy(&j));
    let mut expect = DMatrix::zeros(5, 5);
    for (col, u) in [(1, (1.0, 0.0, 0.0, 0.0)), (2, (0.0, 1.0, 0.0, 0.0)), (3, (0.0, 0.0, 1.0, 0.0)), (4, (0.0, 0.0, 0.0, 1.0))] {
        let s = qnls::Spinor::new(C64::new(u.0, u.1), C64::new(u.2, u.3)) * jm;
        for (row, v) in [s.u1.re, s.u1.im, s.u2.re, s.u2.im].into_iter().enumerate() {
            expect[(row + 1, col)] = v;
        }
    }
    assert!((ad - expect).amax() < 1e-14);
}

#[test]
fn hermitian_element_is_a_complex_structure_on_r6() {
    let c = NormalCase::So6U3;
    let jc = c.ad_matrix(&c.hermitian_element().unwrap());
    assert!((&jc * &jc + DMatrix::identity(6, 6)).amax() < 1e-14);
    let iso = c.ad_matrix(&c.isotropy(&SU2Generator::new(0.4, 2.0)));
    assert!((&jc * &iso - &iso * &jc).amax() < 1e-14);
}

#[test]
fn random_curves_satisfy_structure_properties() {
    let j = SU2Generator::new(0.6, 2.4);
    for case in [NormalCase::Su4Sp2, NormalCase::So6U3] {
        let g = PeriodicGrid::new(64, TAU).unwrap();
        for seed in 0..5 {
            let c = geomflow::random_curve(&g, case.dimension(), &mut initial::rng(seed), 4, 0.6).unwrap();
            let s = geomflow::build_normal_structure(&g, &c, case, &j).unwrap();
            let r = s.residuals();
            assert!(r.max() < 1e-8, "{case:?} {seed}: {r:?}");
            assert!(s.frame_defect < 1e-10);
            let first = &s.j_r[0];
            let v = geomflow::su2_binormal_rhs(&g, &c, &s).unwrap();
            let t = c.tangent(&g);
            for k in 0..64 {
                let dot: f64 = (0..case.dimension()).map(|d| v[d][k] * t[d][k]).sum();
                assert!(dot.abs() < 1e-8);
            }
            let flipped = s.flipped();
            assert_eq!(flipped.sign_choice, -1);
            assert!((&flipped.j_r[0] + first).amax() == 0.0);
        }
    }
}

#[test]
fn planar_circle_in_r5_moves_along_rotated_normal() {
    let j = SU2Generator::new(0.9, 0.3);
    let (g, c) = geomflow::circle(5, 32, 2.0).unwrap();
    let s = geomflow::build_normal_structure(&g, &c, NormalCase::Su4Sp2, &j).unwrap();
    let v = geomflow::su2_binormal_rhs(&g, &c, &s).unwrap();
    let acc = c.curvature_vector(&g);
    for k in 0..32 {
        let speed: f64 = (0..5).map(|d| v[d][k] * v[d][k]).sum::<f64>().sqrt();
        assert!((speed - 0.5).abs() < 1e-10);
        let n: Vec<f64> = (0..5).map(|d| acc[d][k] * 2.0).collect();
        let jn = s.apply(k, &n);
        for d in 0..5 {
            assert!((v[d][k] - 0.5 * jn[d]).abs() < 1e-12);
        }
    }
}

#[test]
fn r5_flow_preserves_arclength_and_is_a_schrodinger_map() {
    let j = SU2Generator::new(0.7, 1.2);
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let c = geomflow::random_curve(&g, 5, &mut initial::rng(21), 3, 0.15).unwrap();
    let cfg = EvolutionConfig::new(1e-3, 0.5).with_stride(100);
    let traj = geomflow::evolve_su2_binormal(&g, &c, NormalCase::Su4Sp2, &j, &cfg).unwrap();
    assert!(traj.max_speed_drift() < 1e-5, "{}", traj.max_speed_drift());

    let res = |spacing: f64| {
        let cfg = EvolutionConfig::new(spacing / 10.0, 2.0 * spacing).with_stride(10);
        let t = geomflow::evolve_su2_binormal(&g, &c, NormalCase::Su4Sp2, &j, &cfg).unwrap();
        geomflow::schrodinger_map_residual(&g, &t.tangents(&g), spacing, SphereCase::S4(j)).unwrap()
    };
    let (a, b) = (res(0.01), res(0.005));
    let p = (a / b).log2();
    assert!((p - 2.0).abs() < 0.2, "order {p} ({a} {b})");
}
