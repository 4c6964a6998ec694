use qnls::grid::SpinorField;
use qnls::initial::{self, Parity};
use qnls::integrator::{conservation_report, evolve, Scheme, State, SystemSpec};
use qnls::systems::{NlsParams, StateNls, StateSys1, StateSys2};
use qnls::{EvolutionConfig, PeriodicGrid, QnlsError, SU2Generator, C64};
use std::f64::consts::TAU;

fn nls_spec() -> SystemSpec {
    SystemSpec::Nls(NlsParams::default())
}

fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn spinor_diff(a: &SpinorField, b: &SpinorField) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).max_abs()).fold(0.0, f64::max)
}

#[test]
fn nls_plane_wave_tracks_exact_phase() {
    let g = PeriodicGrid::new(256, TAU).unwrap();
    let a = C64::new(1.0, 0.0);
    let u0 = initial::plane_wave(&g, a, 1);
    // Plain RK4 is outside its stability region at N=256, dt=1e-3.
    for scheme in [Scheme::IfRk4] {
        let cfg = EvolutionConfig::new(1e-3, 1.0).with_scheme(scheme).with_stride(100);
        let traj = evolve(&g, &nls_spec(), &State::Nls(StateNls { u: u0.clone() }), &cfg).unwrap();
        let State::Nls(fin) = traj.final_state() else { panic!() };
        let omega = 0.5 * a.norm_sqr() - 1.0;
        let exact: Vec<C64> = u0.iter().map(|z| z * C64::from_polar(1.0, omega * 1.0)).collect();
        assert!(rel_err(&fin.u, &exact) < 1e-8, "{scheme:?}");
        let rep = conservation_report(&traj).unwrap();
        assert!(rep.hamiltonian_drift < 1e-10, "{scheme:?}: {}", rep.hamiltonian_drift);
    }
}

#[test]
fn zero_state_stays_zero() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let j = SU2Generator::new(0.4, 0.1);
    let cfg = EvolutionConfig::new(1e-2, 0.1);
    let s = State::Sys2(StateSys2 { v: vec![0.0; 32], u: SpinorField::zeros(32) });
    let traj = evolve(&g, &SystemSpec::Sys2 { generator: j }, &s, &cfg).unwrap();
    assert_eq!(traj.final_state().max_abs(), 0.0);
}

#[test]
fn sys1_scalar_reduction_matches_reference_solver() {
    let g = PeriodicGrid::new(128, TAU).unwrap();
    let u1 = initial::random_complex(&g, &mut initial::rng(4), 0.6, 4, Parity::None);
    let cfg = EvolutionConfig::new(1e-3, 0.25).with_stride(250);
    let spec = SystemSpec::Sys1 { generator: SU2Generator::diagonal() };
    let s = State::Sys1(StateSys1 { u: initial::scalar_embedding(u1.clone()) });
    let traj = evolve(&g, &spec, &s, &cfg).unwrap();
    let reference = evolve(
        &g,
        &SystemSpec::Nls(NlsParams::with_coupling(2.0)),
        &State::Nls(StateNls { u: u1 }),
        &cfg,
    )
    .unwrap();
    let (State::Sys1(a), State::Nls(b)) = (traj.final_state(), reference.final_state()) else {
        panic!()
    };
    assert!(rel_err(&a.u.u1, &b.u) < 1e-10);
    assert!(a.u.u2.iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn rk4_self_convergence_is_fourth_order() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let j = SU2Generator::new(0.8, 2.0);
    let u = initial::random_spinor(&g, &mut initial::rng(12), 0.5, 3, Parity::None);
    let spec = SystemSpec::Sys1 { generator: j };
    let run = |dt: f64| {
        let cfg = EvolutionConfig::new(dt, 0.2).with_scheme(Scheme::Rk4).with_stride(1_000_000);
        let t = evolve(&g, &spec, &State::Sys1(StateSys1 { u: u.clone() }), &cfg).unwrap();
        let State::Sys1(s) = t.final_state().clone() else { panic!() };
        s.u
    };
    let dt = 4e-3;
    let reference = run(dt / 4.0);
    let e1 = spinor_diff(&run(dt), &reference);
    let e2 = spinor_diff(&run(dt / 2.0), &reference);
    let ratio = e1 / e2;
    assert!(ratio > 12.0 && ratio < 40.0, "ratio {ratio}");
}

#[test]
fn schemes_agree() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let j = SU2Generator::new(1.1, 0.3);
    let mut r = initial::rng(5);
    let u = initial::random_spinor(&g, &mut r, 0.4, 3, Parity::None);
    let v = initial::random_real(&g, &mut r, 0.4, 3, Parity::None);
    let spec = SystemSpec::Sys2 { generator: j };
    let s = State::Sys2(StateSys2 { v, u });
    let run = |scheme| {
        let cfg = EvolutionConfig::new(5e-4, 0.1).with_scheme(scheme).with_stride(1000);
        let t = evolve(&g, &spec, &s, &cfg).unwrap();
        let State::Sys2(f) = t.final_state().clone() else { panic!() };
        f
    };
    let a = run(Scheme::Rk4);
    let b = run(Scheme::IfRk4);
    assert!(spinor_diff(&a.u, &b.u) < 1e-9);
    let dv = a.v.iter().zip(&b.v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(dv < 1e-9);
}

#[test]
fn evolution_commutes_with_generator_rotation() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let j = SU2Generator::new(0.6, 1.4);
    let u = initial::random_spinor(&g, &mut initial::rng(6), 0.5, 3, Parity::None);
    let rot = j.exp(0.9);
    let spec = SystemSpec::Sys1 { generator: j };
    let cfg = EvolutionConfig::new(1e-3, 0.1).with_stride(1000);
    let fin = |u: SpinorField| {
        let t = evolve(&g, &spec, &State::Sys1(StateSys1 { u }), &cfg).unwrap();
        let State::Sys1(s) = t.final_state().clone() else { panic!() };
        s.u
    };
    let a = fin(u.mul_mat(rot));
    let b = fin(u).mul_mat(rot);
    assert!(spinor_diff(&a, &b) < 1e-12);
}

#[test]
fn monitors_are_recorded_per_snapshot() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let u = initial::plane_wave(&g, C64::new(0.5, 0.0), 2);
    let cfg = EvolutionConfig::new(1e-2, 0.1).with_stride(3);
    let t = evolve(&g, &nls_spec(), &State::Nls(StateNls { u }), &cfg).unwrap();
    let times: Vec<f64> = t.monitors.iter().map(|m| m.t).collect();
    assert_eq!(times.len(), 5);
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    assert!((times[4] - 0.1).abs() < 1e-12);
}

#[test]
fn blowup_is_reported() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let u = initial::random_complex(&g, &mut initial::rng(1), 1.0, 4, Parity::None);
    // Explicit RK4 far beyond its dispersive stability limit.
    let cfg = EvolutionConfig::new(0.2, 50.0).with_scheme(Scheme::Rk4);
    let err = evolve(&g, &nls_spec(), &State::Nls(StateNls { u }), &cfg).unwrap_err();
    assert!(matches!(err, QnlsError::Blowup { .. }), "{err:?}");
}

#[test]
fn unresolved_initial_data_is_rejected() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let u = initial::plane_wave(&g, C64::new(1.0, 0.0), 15);
    let cfg = EvolutionConfig::new(1e-3, 0.01);
    let err = evolve(&g, &nls_spec(), &State::Nls(StateNls { u }), &cfg).unwrap_err();
    assert!(matches!(err, QnlsError::Resolution { .. }));
}

#[test]
fn mismatched_state_is_rejected() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let cfg = EvolutionConfig::new(1e-3, 0.01);
    let s = State::Nls(StateNls { u: vec![C64::new(0.0, 0.0); 32] });
    let spec = SystemSpec::Sys1 { generator: SU2Generator::diagonal() };
    assert!(matches!(evolve(&g, &spec, &s, &cfg), Err(QnlsError::InvalidInput(_))));
}

#[test]
fn non_finite_samples_count_as_blowup() {
    let g = PeriodicGrid::new(64, TAU).unwrap();
    let mut r = initial::rng(1);
    let u = initial::random_spinor(&g, &mut r, 4.0, 4, Parity::None);
    let v = initial::random_real(&g, &mut r, 1.0, 4, Parity::None);
    let spec = SystemSpec::Sys2 { generator: SU2Generator::new(0.3, 0.2) };
    let cfg = EvolutionConfig::new(0.2, 50.0).with_scheme(Scheme::Rk4).with_stride(1_000_000);
    let err = evolve(&g, &spec, &State::Sys2(StateSys2 { v, u }), &cfg).unwrap_err();
    let QnlsError::Blowup { max_abs, .. } = err else { panic!("{err:?}") };
    assert!(max_abs.is_nan() || max_abs > 1e8);
}
