use qnls::geomflow::{self, NormalCase};
use qnls::initial::{self, Parity};
use qnls::integrator::{evolve, State, SystemSpec};
use qnls::io;
use qnls::systems::StateSys2;
use qnls::{EvolutionConfig, PeriodicGrid, QnlsError, SU2Generator};
use std::f64::consts::TAU;

#[test]
fn field_binary_round_trips_bit_exactly() {
    let g = PeriodicGrid::new(32, 5.0).unwrap();
    let mut r = initial::rng(1);
    let comps = vec![
        initial::random_complex(&g, &mut r, 1.0, 4, Parity::None),
        initial::random_complex(&g, &mut r, 0.3, 2, Parity::Even),
    ];
    let mut buf = Vec::new();
    io::write_field_binary(&mut buf, &g, &comps).unwrap();
    assert_eq!(buf.len(), 24 + 2 * 32 * 16);
    let back = io::read_field_binary(buf.as_slice()).unwrap();
    assert_eq!((back.n, back.length), (32, 5.0));
    assert_eq!(back.components, comps);

    let truncated = io::read_field_binary(&buf[..buf.len() - 3]);
    assert!(matches!(truncated, Err(QnlsError::Io(_))));
}

#[test]
fn field_csv_round_trips() {
    let g = PeriodicGrid::new(16, TAU).unwrap();
    let comps = vec![initial::random_complex(&g, &mut initial::rng(2), 1.0, 3, Parity::None)];
    let mut buf = Vec::new();
    io::write_field_csv(&mut buf, &g, &comps).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("x,c0_re,c0_im\n"));
    let (xs, back) = io::read_field_csv(buf.as_slice()).unwrap();
    assert_eq!(xs, g.points());
    assert_eq!(back, comps);
}

#[test]
fn trajectory_directory_round_trips() {
    let g = PeriodicGrid::new(32, TAU).unwrap();
    let mut r = initial::rng(3);
    let s = State::Sys2(StateSys2 {
        u: initial::random_spinor(&g, &mut r, 0.4, 3, Parity::None),
        v: initial::random_real(&g, &mut r, 0.4, 3, Parity::None),
    });
    let spec = SystemSpec::Sys2 { generator: SU2Generator::new(0.5, 1.5) };
    let traj = evolve(&g, &spec, &s, &EvolutionConfig::new(1e-2, 0.05).with_stride(2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    io::write_trajectory(dir.path(), &traj, Some(0.5)).unwrap();
    assert!(dir.path().join("snapshots/0000.bin").exists());
    let (back, meta) = io::read_trajectory(dir.path()).unwrap();
    assert_eq!(meta.chi, Some(0.5));
    assert_eq!(back.times, traj.times);
    assert_eq!(back.snapshots, traj.snapshots);
    assert_eq!(back.monitors, traj.monitors);
    assert_eq!(back.system, traj.system);
}

#[test]
fn curve_and_structure_dumps_round_trip() {
    let (g, c) = geomflow::helix(32, 1.0, 0.5, 1).unwrap();
    let mut buf = Vec::new();
    io::write_curve_csv(&mut buf, &g, &c).unwrap();
    let back = io::read_curve_csv(buf.as_slice(), c.drift.clone()).unwrap();
    assert_eq!(back, c);

    let g = PeriodicGrid::new(16, TAU).unwrap();
    let c = geomflow::random_curve(&g, 5, &mut initial::rng(4), 2, 0.3).unwrap();
    let st = geomflow::build_normal_structure(&g, &c, NormalCase::Su4Sp2, &SU2Generator::diagonal()).unwrap();
    let mut buf = Vec::new();
    io::write_structure(&mut buf, &st).unwrap();
    assert_eq!(io::read_structure(buf.as_slice()).unwrap(), st.j_r);
}
