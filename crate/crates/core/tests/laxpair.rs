use proptest::prelude::*;
use qnls::grid::SpinorField;
use qnls::initial::{self, Parity};
use qnls::integrator::{evolve, State, SystemSpec};
use qnls::laxpair::{self, Corruption, LaxField};
use qnls::systems::{rhs_nls, rhs_sys1, rhs_sys2, EvalOptions, NlsParams, StateSys1, StateSys2};
use qnls::{AlgebraTag, EvolutionConfig, MeanPolicy, PeriodicGrid, SU2Generator, C64};
use std::f64::consts::TAU;

const CHIS: [f64; 3] = [0.0, 0.7, -1.3];

fn raw() -> EvalOptions {
    EvalOptions::raw(MeanPolicy::Project)
}

/// Residual with `U_t` supplied exactly: `U` is affine in the state, so a
/// centered difference over `s ± rate` reproduces it without truncation error.
fn exact_residual(g: &PeriodicGrid, fields: [LaxField; 3]) -> f64 {
    laxpair::zero_curvature_residual(g, &fields, 1.0, "test", None).unwrap().residual_max
}

fn sys1_data(g: &PeriodicGrid, seed: u64) -> StateSys1 {
    StateSys1 { u: initial::random_spinor(g, &mut initial::rng(seed), 0.8, 4, Parity::Even) }
}

fn sys2_data(g: &PeriodicGrid, seed: u64) -> StateSys2 {
    let mut r = initial::rng(seed);
    let u = initial::random_spinor(g, &mut r, 0.8, 4, Parity::Even);
    let v = initial::random_real(g, &mut r, 0.6, 4, Parity::Odd);
    StateSys2 { v, u }
}

#[test]
fn nls_pair_is_flat_on_arbitrary_data() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let u = initial::random_complex(&g, &mut initial::rng(1), 1.0, 5, Parity::None);
    let rate = rhs_nls(&g, &qnls::StateNls { u: u.clone() }, &NlsParams::default(), raw()).rate;
    for chi in CHIS {
        let shift = |s: f64| -> Vec<C64> { u.iter().zip(&rate).map(|(a, b)| a + b * s).collect() };
        let f = [-1.0, 0.0, 1.0].map(|s| laxpair::build_lax_nls(&g, &shift(s), chi));
        assert!(f[1].membership_residual() < 1e-15);
        let r = exact_residual(&g, f);
        assert!(r < 1e-11, "chi {chi}: {r}");
    }
}

#[test]
fn su4_pair_is_flat_on_parity_data() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let j = SU2Generator::new(0.9, 2.1);
    let s = sys1_data(&g, 2);
    let rate = rhs_sys1(&g, &s, &j, raw()).unwrap().rate;
    for chi in CHIS {
        let f = [-1.0, 0.0, 1.0].map(|h| {
            let st = StateSys1 { u: &s.u + &rate.scale_re(h) };
            laxpair::build_lax_sys1(&g, &st, &j, chi, MeanPolicy::Project).unwrap()
        });
        assert_eq!(f[1].tag, AlgebraTag::Su4);
        assert!(f[1].membership_residual() < 1e-13);
        let r = exact_residual(&g, f);
        assert!(r < 1e-10, "chi {chi}: {r}");
    }
}

#[test]
fn so6_pair_is_flat_on_parity_data() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let j = SU2Generator::new(0.5, -0.8);
    let s = sys2_data(&g, 3);
    let rate = rhs_sys2(&g, &s, &j, raw()).unwrap().rate;
    for chi in CHIS {
        let f = [-1.0, 0.0, 1.0].map(|h| {
            let st = StateSys2 {
                v: s.v.iter().zip(&rate.v).map(|(a, b)| a + h * b).collect(),
                u: &s.u + &rate.u.scale_re(h),
            };
            laxpair::build_lax_sys2(&g, &st, &j, chi, MeanPolicy::Project).unwrap()
        });
        assert!(f[1].membership_residual() < 1e-13);
        let r = exact_residual(&g, f);
        assert!(r < 1e-10, "chi {chi}: {r}");
    }
}

#[test]
fn zero_state_pairs_keep_only_spectral_entries() {
    let g = PeriodicGrid::new(16, TAU).unwrap();
    let chi = 0.6;
    let f = laxpair::build_lax_nls(&g, &vec![C64::new(0.0, 0.0); 16], chi);
    let (u, v) = (&f.u[3], &f.v[3]);
    assert_eq!(u[(0, 1)].re, chi);
    assert_eq!(u[(1, 0)].re, -chi);
    assert_eq!(u.entries().filter(|z| z.norm() > 0.0).count(), 2);
    assert_eq!(v[(2, 3)].re, -chi * chi);
    assert_eq!(v[(3, 2)].re, chi * chi);
    assert_eq!(v.entries().filter(|z| z.norm() > 0.0).count(), 2);
}

#[test]
fn trajectory_residual_is_second_order_and_detects_corruption() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let j = SU2Generator::new(1.0, 0.4);
    let spec = SystemSpec::Sys1 { generator: j };
    let s = State::Sys1(sys1_data(&g, 4));
    let report = |spacing: f64, corrupt| {
        let cfg = EvolutionConfig::new(spacing / 20.0, 2.0 * spacing).with_stride(20);
        let t = evolve(&g, &spec, &s, &cfg).unwrap();
        assert_eq!(t.snapshots.len(), 3);
        laxpair::zero_curvature_trajectory(&t, 0.8, corrupt).unwrap()
    };
    let coarse = report(0.04, None);
    let fine = report(0.02, None).with_order_from(&coarse);
    let p = fine.order_estimate.unwrap();
    assert!((p - 2.0).abs() < 0.2, "order {p}");

    let clean = report(2e-4, None);
    let bad = Corruption { row: 0, col: 1, factor: 1.01 };
    let broken = report(2e-4, Some(bad));
    assert!(broken.residual_l2 > 1e3 * clean.residual_l2, "{broken:?} vs {clean:?}");
}

#[test]
fn report_serializes_with_expected_keys() {
    let g = PeriodicGrid::new(16, TAU).unwrap();
    let f = laxpair::build_lax_nls(&g, &vec![C64::new(0.1, 0.0); 16], 0.3);
    let rep = laxpair::zero_curvature_residual(&g, &[f.clone(), f.clone(), f], 0.1, "nls", None).unwrap();
    let json = serde_json::to_value(&rep).unwrap();
    for key in ["residual_l2", "residual_max", "dt", "order_estimate", "system", "chi", "grid"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    let too_few = laxpair::zero_curvature_residual(&g, &[], 0.1, "nls", None);
    assert!(too_few.is_err());
}

#[test]
fn auxiliary_potentials_satisfy_their_relations() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let j = SU2Generator::new(1.2, 0.5);
    let jm = j.matrix();
    let gauge = qnls::GaugeConstants::canonical(0.4, &j);
    assert!(gauge.is_valid(1e-15));

    let s = sys1_data(&g, 5);
    let a = laxpair::compute_aux_sys1(&g, &s, &j, &gauge, MeanPolicy::Project).unwrap();
    let wwx = g.dx_mat2(&a.ww_par);
    let wpx = g.dx_mat2(&a.w_par);
    let bwx = g.dx_real(&a.big_w_par);
    for k in 0..64 {
        let (u, w) = (s.u.at(k), a.w.at(k));
        let o = |p: qnls::Spinor, q: qnls::Spinor| qnls::Mat2::outer(p, q);
        let ww = (o(u, w) - o(w, u)).scale_re(2.0);
        assert!((wwx[k] - ww).max_abs() < 1e-11);
        let wp = (o(u.conj(), w) - o(w.conj(), u)).scale_re(2.0).trace_free();
        assert!((wpx[k] - wp).max_abs() < 1e-11, "{k}");
        assert!((bwx[k] - 2.0 * u.cdot(w).im).abs() < 1e-11);
    }

    let s = sys2_data(&g, 6);
    let a = laxpair::compute_aux_sys2(&g, &s, &j, &gauge, MeanPolicy::Project).unwrap();
    let wpx = g.dx_mat2(&a.w_par);
    let bwx = g.dx_real(&a.big_w_par);
    for k in 0..64 {
        let (u, w) = (s.u.at(k), a.w.at(k));
        let rhs = qnls::Mat2::outer(u.conj(), w) - qnls::Mat2::outer(w.conj(), u);
        assert!((wpx[k] - rhs.trace_free()).max_abs() < 1e-11, "{k}");
        assert!((bwx[k] - 2.0 * u.cdot(w).im).abs() < 1e-11);
        assert!((a.w.at(k) - (g.dx_spinor(&s.u).at(k) * jm - (u * jm).scale(C64::new(0.0, s.v[k])))).max_abs() < 1e-11);
    }
}

#[test]
fn hamiltonian_operators_map_gradients_to_flows() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let j = SU2Generator::new(0.7, 1.9);
    let s1 = StateSys1 { u: initial::random_spinor(&g, &mut initial::rng(7), 0.7, 3, Parity::None) };
    let r1 = laxpair::check_hamiltonian_sys1(&g, &s1, &j).unwrap();
    assert!(r1 < 1e-5, "{r1}");
    let mut r = initial::rng(8);
    let s2 = StateSys2 {
        u: initial::random_spinor(&g, &mut r, 0.7, 3, Parity::None),
        v: initial::random_real(&g, &mut r, 0.5, 3, Parity::None),
    };
    let r2 = laxpair::check_hamiltonian_sys2(&g, &s2, &j).unwrap();
    assert!(r2 < 1e-5, "{r2}");
    let zero = StateSys1 { u: SpinorField::zeros(64) };
    assert_eq!(laxpair::check_hamiltonian_sys1(&g, &zero, &j).unwrap(), 0.0);
}

#[test]
fn symplectic_operators_reproduce_recursion_seeds() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let j = SU2Generator::new(0.3, 0.2);
    let jm = j.matrix();
    let u = initial::random_spinor(&g, &mut initial::rng(9), 0.8, 3, Parity::None);
    let uj = u.mul_mat(jm);
    let ux_j = g.dx_spinor(&u).mul_mat(jm);
    let got = laxpair::jop_sys1(&g, &u, &uj).unwrap();
    assert!((&got - &ux_j).max_abs() < 1e-12);

    let v = initial::random_real(&g, &mut initial::rng(10), 0.5, 3, Parity::None);
    let s = StateSys2 { v: v.clone(), u: u.clone() };
    let seed = StateSys2 { v: vec![0.0; 64], u: uj.clone() };
    let got = laxpair::jop_sys2(&g, &s, &seed).unwrap();
    for k in 0..64 {
        let a = u.at(k);
        assert!((got.v[k] - 0.5 * a.cdot(a * jm).im).abs() < 1e-12);
        let want = ux_j.at(k) - uj.at(k).scale(C64::new(0.0, v[k]));
        assert!((got.u.at(k) - want).max_abs() < 1e-12);
    }
}

#[test]
fn zero_state_recursion_is_second_derivative() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let f = initial::random_spinor(&g, &mut initial::rng(11), 1.0, 4, Parity::None);
    let got = laxpair::recursion_sys1(&g, &SpinorField::zeros(32), &f).unwrap();
    assert!((&got - &g.dxx_spinor(&f)).max_abs() < 1e-11);
}

fn field(seed: u64, g: &PeriodicGrid) -> StateSys2 {
    let mut r = initial::rng(seed);
    StateSys2 {
        u: initial::random_spinor(g, &mut r, 1.0, 4, Parity::None),
        v: initial::random_real(g, &mut r, 1.0, 4, Parity::None),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_skew(seed in 0u64..10_000) {
        let g = PeriodicGrid::new(32, TAU).unwrap();
        let (s, f, h) = (field(seed, &g), field(seed + 1, &g), field(seed + 2, &g));
        let p1 = |a: &SpinorField, b: &SpinorField| g.pairing(a, b);
        let ops1: [fn(&PeriodicGrid, &SpinorField, &SpinorField) -> qnls::Result<SpinorField>; 2] =
            [laxpair::hop_sys1, laxpair::jop_sys1];
        for op in ops1 {
            let a = p1(&f.u, &op(&g, &s.u, &h.u).unwrap());
            let b = p1(&op(&g, &s.u, &f.u).unwrap(), &h.u);
            prop_assert!((a + b).abs() < 1e-10, "{a} {b}");
        }
        let ops2: [fn(&PeriodicGrid, &StateSys2, &StateSys2) -> qnls::Result<StateSys2>; 2] =
            [laxpair::hop_sys2, laxpair::jop_sys2];
        for op in ops2 {
            let a = laxpair::pairing_sys2(&g, &f, &op(&g, &s, &h).unwrap());
            let b = laxpair::pairing_sys2(&g, &op(&g, &s, &f).unwrap(), &h);
            prop_assert!((a + b).abs() < 1e-10, "{a} {b}");
        }
    }
}
