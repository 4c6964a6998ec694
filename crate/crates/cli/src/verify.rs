//! Property suites run by `qnls verify`.

use clap::ValueEnum;
use qnls::algebra::{check_spinor_quaternion_dictionary, rewrite_identity_residuals};
use qnls::geomflow::{self, NormalCase};
use qnls::grid::SpinorField;
use qnls::initial::{self, Parity};
use qnls::integrator::{evolve, State, SystemSpec};
use qnls::laxpair::{self, Corruption};
use qnls::systems::{self, EvalOptions, NlsParams, StateNls, StateSys1, StateSys2};
use qnls::{EvolutionConfig, PeriodicGrid, SU2Generator, Spinor, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Operators,
    Laxpair,
    Geometry,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual.is_finite() && max_residual < tolerance,
        }
    }

    fn from_result(name: &str, samples: usize, r: qnls::Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(v) => Check::new(name, samples, v, tolerance),
            Err(e) => {
                let mut c = Check::new(name, samples, f64::INFINITY, tolerance);
                c.name = format!("{name} ({e})");
                c
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> VerifyReport {
    let checks = match suite {
        Suite::Algebra => algebra(seed),
        Suite::Operators => operators(seed),
        Suite::Laxpair => lax(seed),
        Suite::Geometry => geometry(seed),
        Suite::All => [algebra(seed), operators(seed), lax(seed), geometry(seed)].concat(),
    };
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { suite, seed, checks, pass }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn cplx(r: &mut impl Rng) -> C64 {
    C64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0))
}

fn algebra(seed: u64) -> Vec<Check> {
    const SAMPLES: usize = 10_000;
    let mut rng = initial::rng(seed);
    let (mut gen, mut dict, mut id1, mut id2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let j = SU2Generator::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
        let u = Spinor::new(cplx(&mut rng), cplx(&mut rng));
        gen = gen.max(j.invariant_residual());
        dict = dict.max(check_spinor_quaternion_dictionary(u, &j));
        let (a, b) = rewrite_identity_residuals(u, &j);
        id1 = id1.max(a);
        id2 = id2.max(b);
    }
    vec![
        Check::new("generator_invariants", SAMPLES, gen, 1e-12),
        Check::new("spinor_quaternion_dictionary", SAMPLES, dict, 1e-12),
        Check::new("rewrite_identity_trace_free_j_left", SAMPLES, id1, 1e-12),
        Check::new("rewrite_identity_trace_free_j_right", SAMPLES, id2, 1e-12),
    ]
}

fn sys2_state(g: &PeriodicGrid, seed: u64, parity: Parity) -> StateSys2 {
    let mut r = initial::rng(seed);
    let v_parity = if parity == Parity::Even { Parity::Odd } else { parity };
    StateSys2 {
        u: initial::random_spinor(g, &mut r, 0.8, 4, parity),
        v: initial::random_real(g, &mut r, 0.5, 4, v_parity),
    }
}

fn generator_for(seed: u64) -> SU2Generator {
    let mut r = initial::rng(seed ^ 0x5eed);
    SU2Generator::new(r.random_range(0.0..TAU), r.random_range(0.0..TAU))
}

fn operators(seed: u64) -> Vec<Check> {
    const TRIPLES: usize = 20;
    let g = PeriodicGrid::new(32, TAU).expect("valid grid");
    let mut skew = [0.0f64; 4];
    for t in 0..TRIPLES as u64 {
        let base = seed.wrapping_mul(1000).wrapping_add(3 * t);
        let [s, f, h] = [0, 1, 2].map(|k| sys2_state(&g, base + k, Parity::None));
        let ops1 = [laxpair::hop_sys1, laxpair::jop_sys1];
        for (slot, op) in ops1.iter().enumerate() {
            let r = op(&g, &s.u, &h.u).and_then(|oh| {
                let of = op(&g, &s.u, &f.u)?;
                Ok((g.pairing(&f.u, &oh) + g.pairing(&of, &h.u)).abs())
            });
            skew[slot] = skew[slot].max(r.unwrap_or(f64::INFINITY));
        }
        let ops2 = [laxpair::hop_sys2, laxpair::jop_sys2];
        for (slot, op) in ops2.iter().enumerate() {
            let r = op(&g, &s, &h).and_then(|oh| {
                let of = op(&g, &s, &f)?;
                Ok((laxpair::pairing_sys2(&g, &f, &oh) + laxpair::pairing_sys2(&g, &of, &h)).abs())
            });
            skew[2 + slot] = skew[2 + slot].max(r.unwrap_or(f64::INFINITY));
        }
    }

    let g64 = PeriodicGrid::new(64, TAU).expect("valid grid");
    let ham = |sys2: bool| -> qnls::Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..3 {
            let s = sys2_state(&g64, seed + 100 + k, Parity::None);
            let j = generator_for(seed + k);
            let r = if sys2 {
                laxpair::check_hamiltonian_sys2(&g64, &s, &j)?
            } else {
                laxpair::check_hamiltonian_sys1(&g64, &StateSys1 { u: s.u }, &j)?
            };
            worst = worst.max(r);
        }
        Ok(worst)
    };

    let quat = || -> qnls::Result<f64> {
        let opts = EvalOptions::default();
        let mut worst = 0.0f64;
        for k in 0..10 {
            let s = sys2_state(&g64, seed + 200 + k, Parity::None);
            let j = generator_for(seed + 50 + k);
            let s1 = StateSys1 { u: s.u.clone() };
            let a = systems::rhs_sys1(&g64, &s1, &j, opts)?.rate;
            let b = systems::rhs_sys1_quaternion(&g64, &s1, &j, opts)?.rate;
            worst = worst.max(spinor_diff(&a, &b) / a.max_abs().max(1e-300));
            let a = systems::rhs_sys2(&g64, &s, &j, opts)?.rate;
            let b = systems::rhs_sys2_quaternion(&g64, &s, &j, opts)?.rate;
            let scale = a.u.max_abs().max(max_of(a.v.iter().map(|x| x.abs()))).max(1e-300);
            let dv = max_of(a.v.iter().zip(&b.v).map(|(x, y)| (x - y).abs()));
            worst = worst.max(spinor_diff(&a.u, &b.u).max(dv) / scale);
        }
        Ok(worst)
    };

    vec![
        Check::new("hop_sys1_skew", TRIPLES, skew[0], 1e-10),
        Check::new("jop_sys1_skew", TRIPLES, skew[1], 1e-10),
        Check::new("hop_sys2_skew", TRIPLES, skew[2], 1e-10),
        Check::new("jop_sys2_skew", TRIPLES, skew[3], 1e-10),
        Check::from_result("hamiltonian_form_sys1", 3, ham(false), 1e-5),
        Check::from_result("hamiltonian_form_sys2", 3, ham(true), 1e-5),
        Check::from_result("quaternion_vs_spinor_rhs", 10, quat(), 1e-10),
    ]
}

fn spinor_diff(a: &SpinorField, b: &SpinorField) -> f64 {
    max_of(a.iter().zip(b.iter()).map(|(x, y)| (x - y).max_abs()))
}

fn lax(seed: u64) -> Vec<Check> {
    let g = PeriodicGrid::new(64, TAU).expect("valid grid");
    let j = generator_for(seed);
    let chi = 0.8;
    let sys2 = sys2_state(&g, seed, Parity::Even);
    let cases: [(&str, SystemSpec, State); 3] = [
        (
            "nls",
            SystemSpec::Nls(NlsParams::default()),
            State::Nls(StateNls { u: initial::random_complex(&g, &mut initial::rng(seed), 0.8, 4, Parity::None) }),
        ),
        ("sys1", SystemSpec::Sys1 { generator: j }, State::Sys1(StateSys1 { u: sys2.u.clone() })),
        ("sys2", SystemSpec::Sys2 { generator: j }, State::Sys2(sys2)),
    ];
    let mut checks = Vec::new();
    for (name, spec, state) in &cases {
        let report = |spacing: f64, corrupt| {
            let cfg = EvolutionConfig::new(spacing / 20.0, 2.0 * spacing).with_stride(20);
            let t = evolve(&g, spec, state, &cfg)?;
            laxpair::zero_curvature_trajectory(&t, chi, corrupt)
        };
        let order = report(0.04, None)
            .and_then(|coarse| Ok(report(0.02, None)?.with_order_from(&coarse)))
            .map(|r| (r.order_estimate.unwrap_or(f64::NAN) - 2.0).abs());
        checks.push(Check::from_result(&format!("{name}_residual_order_minus_2"), 2, order, 0.2));

        let member = laxpair::build_lax(&g, state, spec.generator().as_ref(), chi, Default::default())
            .map(|f| f.membership_residual());
        checks.push(Check::from_result(&format!("{name}_membership"), g.n(), member, 1e-12));

        // Inverse inflation factor, so a pass means inflation >= 1e3.
        let bad = match spec {
            SystemSpec::Nls(_) => Corruption { row: 2, col: 3, factor: 1.01 },
            _ => Corruption { row: 0, col: 1, factor: 1.01 },
        };
        let inflation = report(1e-4, None)
            .and_then(|clean| Ok(clean.residual_l2 / report(1e-4, Some(bad))?.residual_l2));
        checks.push(Check::from_result(&format!("{name}_corruption_inverse_inflation"), 1, inflation, 1e-3));
    }
    checks
}

fn geometry(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let radius = 1.5;
    let circle = geomflow::circle(3, 64, radius).and_then(|(g, c)| {
        let v = geomflow::binormal_rhs_r3(&g, &c)?;
        Ok(max_of((0..64).map(|k| v[0][k].abs().max(v[1][k].abs()).max((v[2][k] - 1.0 / radius).abs()))))
    });
    checks.push(Check::from_result("circle_binormal_velocity", 64, circle, 1e-8));

    let (a, b) = (1.2, 0.7);
    let helix = geomflow::helix(64, a, b, 2).and_then(|(g, c)| {
        let d = a * a + b * b;
        let f = geomflow::frenet_frame(&g, &c, geomflow::DEFAULT_KAPPA_MIN)?;
        Ok(max_of(f.kappa.iter().zip(&f.tau).map(|(k, t)| (k - a / d).abs().max((t - b / d).abs()))))
    });
    checks.push(Check::from_result("helix_curvature_torsion", 64, helix, 1e-8));

    let g = PeriodicGrid::new(64, TAU).expect("valid grid");
    let j = generator_for(seed);
    for case in [NormalCase::Su4Sp2, NormalCase::So6U3] {
        let worst = (0..3).try_fold(0.0f64, |m, k| {
            let c = geomflow::random_curve(&g, case.dimension(), &mut initial::rng(seed + k), 4, 0.6)?;
            Ok(m.max(geomflow::build_normal_structure(&g, &c, case, &j)?.residuals().max()))
        });
        checks.push(Check::from_result(&format!("{}_structure", case.tag()), 3 * g.n(), worst, 1e-8));
    }

    let drift = geomflow::random_curve(&g, 3, &mut initial::rng(seed), 3, 0.15).and_then(|c| {
        let cfg = EvolutionConfig::new(5e-4, 0.1).with_stride(50);
        Ok(geomflow::evolve_filament(&g, &c, &cfg)?.max_speed_drift())
    });
    checks.push(Check::from_result("filament_arclength_drift", 1, drift, 1e-6));
    checks
}
