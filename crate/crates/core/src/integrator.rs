//! Fixed-step time integration with conserved-quantity monitoring.

use crate::algebra::{Mat2, SU2Generator};
use crate::error::{QnlsError, Result};
use crate::grid::{complexify, re, MeanPolicy, PeriodicGrid, SpinorField};
use crate::systems::{
    self, hamiltonian_nls, hamiltonian_sys1, hamiltonian_sys2, EvalOptions, NlsParams,
    NonlocalForm, StateNls, StateSys1, StateSys2,
};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Samples above this magnitude abort the run.
pub const BLOWUP_THRESHOLD: f64 = 1e8;
/// Spectral tail ratio that aborts a run.
pub const RESOLUTION_LIMIT: f64 = 1e-3;
/// Largest tail ratio accepted for initial data.
pub const INITIAL_TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Classical RK4 on the full right-hand side.
    Rk4,
    /// RK4 in the integrating-factor variables of the linear dispersive part.
    #[default]
    IfRk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "one")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub mean_policy: MeanPolicy,
    #[serde(default = "yes")]
    pub dealias: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        EvolutionConfig {
            dt,
            t_final,
            snapshot_stride: 1,
            scheme: Scheme::default(),
            mean_policy: MeanPolicy::Project,
            dealias: true,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dt.is_finite()
            && self.dt > 0.0
            && self.t_final.is_finite()
            && self.t_final > 0.0
            && self.snapshot_stride >= 1;
        if ok {
            Ok(())
        } else {
            Err(QnlsError::InvalidInput(format!(
                "need dt > 0, t_final > 0, stride >= 1 (got dt={}, t_final={}, stride={})",
                self.dt, self.t_final, self.snapshot_stride
            )))
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().max(1.0) as usize
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions { policy: self.mean_policy, dealias: self.dealias }
    }
}

/// Which equation is integrated, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum SystemSpec {
    Nls(NlsParams),
    Sys1 { generator: SU2Generator },
    Sys2 { generator: SU2Generator },
}

impl SystemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::Nls(_) => "nls",
            SystemSpec::Sys1 { .. } => "sys1",
            SystemSpec::Sys2 { .. } => "sys2",
        }
    }

    pub fn generator(&self) -> Option<SU2Generator> {
        match self {
            SystemSpec::Nls(_) => None,
            SystemSpec::Sys1 { generator } | SystemSpec::Sys2 { generator } => Some(*generator),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Nls(StateNls),
    Sys1(StateSys1),
    Sys2(StateSys2),
}

impl State {
    /// Component arrays: `[u]`, `[u1, u2]` or `[v, u1, u2]`.
    pub fn components(&self) -> Vec<Vec<C64>> {
        match self {
            State::Nls(s) => vec![s.u.clone()],
            State::Sys1(s) => vec![s.u.u1.clone(), s.u.u2.clone()],
            State::Sys2(s) => vec![complexify(&s.v), s.u.u1.clone(), s.u.u2.clone()],
        }
    }

    fn from_components(like: &State, mut c: Vec<Vec<C64>>) -> State {
        match like {
            State::Nls(_) => State::Nls(StateNls { u: c.remove(0) }),
            State::Sys1(_) => {
                let u2 = c.pop().unwrap();
                let u1 = c.pop().unwrap();
                State::Sys1(StateSys1 { u: SpinorField { u1, u2 } })
            }
            State::Sys2(_) => {
                let u2 = c.pop().unwrap();
                let u1 = c.pop().unwrap();
                let v = re(&c.pop().unwrap());
                State::Sys2(StateSys2 { v, u: SpinorField { u1, u2 } })
            }
        }
    }

    /// Inverse of [`State::components`] for the given system.
    pub fn from_parts(spec: &SystemSpec, comps: Vec<Vec<C64>>) -> Result<State> {
        let (like, need) = match spec {
            SystemSpec::Nls(_) => (State::Nls(StateNls::default()), 1),
            SystemSpec::Sys1 { .. } => (State::Sys1(StateSys1::default()), 2),
            SystemSpec::Sys2 { .. } => (State::Sys2(StateSys2::default()), 3),
        };
        if comps.len() != need {
            return Err(QnlsError::Format(format!(
                "{} needs {need} components, got {}",
                spec.name(),
                comps.len()
            )));
        }
        let n = comps[0].len();
        if comps.iter().any(|c| c.len() != n) {
            return Err(QnlsError::Format("components differ in length".into()));
        }
        Ok(State::from_components(&like, comps))
    }

    pub fn max_abs(&self) -> f64 {
        peak(self.components().iter().flatten().map(|z| z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().flatten().all(|z| z.is_finite())
    }

    pub fn len(&self) -> usize {
        match self {
            State::Nls(s) => s.u.len(),
            State::Sys1(s) => s.u.len(),
            State::Sys2(s) => s.u.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn matches(&self, spec: &SystemSpec) -> bool {
        matches!(
            (self, spec),
            (State::Nls(_), SystemSpec::Nls(_))
                | (State::Sys1(_), SystemSpec::Sys1 { .. })
                | (State::Sys2(_), SystemSpec::Sys2 { .. })
        )
    }
}

/// One row of the monitor series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub t: f64,
    pub hamiltonian: f64,
    pub mass: f64,
    pub v_integral: f64,
    /// Largest nonlocal mean projected out since the previous row.
    pub removed_mean: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: PeriodicGrid,
    pub system: SystemSpec,
    pub config: EvolutionConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<State>,
    pub monitors: Vec<MonitorRow>,
}

/// Maximum drift of each monitored functional, relative to its initial
/// value when that is above `1e-12` in magnitude and absolute otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub hamiltonian_drift: f64,
    pub mass_drift: f64,
    pub v_integral_drift: f64,
    pub max_removed_mean: f64,
}

pub fn conservation_report(traj: &Trajectory) -> Result<ConservationReport> {
    if traj.monitors.len() < 2 {
        return Err(QnlsError::TooFewSnapshots { need: 2, got: traj.monitors.len() });
    }
    let drift = |f: fn(&MonitorRow) -> f64| {
        let f0 = f(&traj.monitors[0]);
        let scale = if f0.abs() > 1e-12 { f0.abs() } else { 1.0 };
        traj.monitors.iter().map(|m| (f(m) - f0).abs()).fold(0.0, f64::max) / scale
    };
    Ok(ConservationReport {
        hamiltonian_drift: drift(|m| m.hamiltonian),
        mass_drift: drift(|m| m.mass),
        v_integral_drift: drift(|m| m.v_integral),
        max_removed_mean: traj.monitors.iter().map(|m| m.removed_mean).fold(0.0, f64::max),
    })
}

/// `(ℋ, ∫|u|², ∫v)` for a state.
pub fn monitors(grid: &PeriodicGrid, spec: &SystemSpec, state: &State) -> (f64, f64, f64) {
    let mass_of = |u: &[C64]| grid.integrate_real(&u.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
    match (spec, state) {
        (SystemSpec::Nls(_), State::Nls(s)) => (hamiltonian_nls(grid, s), mass_of(&s.u), 0.0),
        (SystemSpec::Sys1 { generator }, State::Sys1(s)) => {
            (hamiltonian_sys1(grid, s, generator), systems::mass(grid, &s.u), 0.0)
        }
        (SystemSpec::Sys2 { generator }, State::Sys2(s)) => (
            hamiltonian_sys2(grid, s, generator),
            systems::mass(grid, &s.u),
            grid.integrate_real(&s.v),
        ),
        _ => (f64::NAN, f64::NAN, f64::NAN),
    }
}

/// Largest value, or NaN if any value is NaN (`f64::max` would drop it).
pub(crate) fn peak(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

type Comps = Vec<Vec<C64>>;

struct Stepper<'a> {
    grid: &'a PeriodicGrid,
    spec: SystemSpec,
    like: State,
    opts: EvalOptions,
}

impl Stepper<'_> {
    /// Full or nonlinear-only rate in physical space.
    fn rate(&self, c: &Comps, nonlinear_only: bool) -> Result<(Comps, f64)> {
        let g = self.grid;
        let state = State::from_components(&self.like, c.clone());
        let (rate, mean) = match (&self.spec, state) {
            (SystemSpec::Nls(p), State::Nls(s)) => {
                let r = if nonlinear_only {
                    systems::nonlinear_nls(g, &s.u, p, self.opts)
                } else {
                    systems::rhs_nls(g, &s, p, self.opts).rate
                };
                (State::Nls(StateNls { u: r }), 0.0)
            }
            (SystemSpec::Sys1 { generator }, State::Sys1(s)) => {
                let e = if nonlinear_only {
                    systems::nonlinear_sys1(g, &s, generator, NonlocalForm::Main, self.opts)?
                } else {
                    systems::rhs_sys1(g, &s, generator, self.opts)?
                };
                (State::Sys1(StateSys1 { u: e.rate }), e.removed_mean)
            }
            (SystemSpec::Sys2 { generator }, State::Sys2(s)) => {
                let e = if nonlinear_only {
                    systems::nonlinear_sys2(g, &s, generator, NonlocalForm::Main, self.opts)?
                } else {
                    systems::rhs_sys2(g, &s, generator, self.opts)?
                };
                (State::Sys2(e.rate), e.removed_mean)
            }
            _ => unreachable!("state/system mismatch is rejected before stepping"),
        };
        Ok((rate.components(), mean))
    }

    /// Exact linear flow over `h`, applied to Fourier coefficients.
    fn propagate(&self, hat: &mut Comps, h: f64) {
        let g = self.grid;
        match &self.spec {
            SystemSpec::Nls(p) => {
                for (j, z) in hat[0].iter_mut().enumerate() {
                    *z *= (p.linear_symbol(g.wavenumber(j)) * h).exp();
                }
            }
            SystemSpec::Sys1 { generator } | SystemSpec::Sys2 { generator } => {
                let off = hat.len() - 2;
                for j in 0..g.n() {
                    let k = g.wavenumber(j);
                    let prop: Mat2 = generator.exp(-k * k * h);
                    let (a, b) = (hat[off][j], hat[off + 1][j]);
                    hat[off][j] = a * prop.0[0][0] + b * prop.0[1][0];
                    hat[off + 1][j] = a * prop.0[0][1] + b * prop.0[1][1];
                }
            }
        }
    }

    fn fft(&self, c: &Comps) -> Comps {
        c.iter().map(|f| self.grid.fft(f)).collect()
    }

    fn ifft(&self, c: &Comps) -> Comps {
        c.iter().map(|f| self.grid.ifft(f)).collect()
    }

    fn step_rk4(&self, c: &Comps, dt: f64) -> Result<(Comps, f64)> {
        let (k1, m) = self.rate(c, false)?;
        let (k2, _) = self.rate(&axpy(c, 0.5 * dt, &k1), false)?;
        let (k3, _) = self.rate(&axpy(c, 0.5 * dt, &k2), false)?;
        let (k4, _) = self.rate(&axpy(c, dt, &k3), false)?;
        let mut out = c.clone();
        for (i, comp) in out.iter_mut().enumerate() {
            for (p, z) in comp.iter_mut().enumerate() {
                *z += dt / 6.0 * (k1[i][p] + 2.0 * k2[i][p] + 2.0 * k3[i][p] + k4[i][p]);
            }
        }
        Ok((out, m))
    }

    fn step_if_rk4(&self, c: &Comps, dt: f64) -> Result<(Comps, f64)> {
        let h = 0.5 * dt;
        let nl = |hat: &Comps| -> Result<(Comps, f64)> {
            let (r, m) = self.rate(&self.ifft(hat), true)?;
            Ok((self.fft(&r), m))
        };
        let prop = |mut x: Comps| {
            self.propagate(&mut x, h);
            x
        };
        let u = self.fft(c);
        let (k1, m) = nl(&u)?;
        let eu = prop(u.clone());
        let (k2, _) = nl(&prop(axpy(&u, h, &k1)))?;
        let (k3, _) = nl(&axpy(&eu, h, &k2))?;
        let eeu = prop(eu);
        let (k4, _) = nl(&axpy(&eeu, dt, &prop(k3.clone())))?;
        let ek1 = prop(prop(k1));
        let ek2 = prop(k2);
        let ek3 = prop(k3);
        let mut out = eeu;
        for (i, comp) in out.iter_mut().enumerate() {
            for (p, z) in comp.iter_mut().enumerate() {
                *z += dt / 6.0 * (ek1[i][p] + 2.0 * ek2[i][p] + 2.0 * ek3[i][p] + k4[i][p]);
            }
        }
        Ok((self.ifft(&out), m))
    }
}

fn axpy(x: &Comps, a: f64, y: &Comps) -> Comps {
    x.iter()
        .zip(y)
        .map(|(xc, yc)| xc.iter().zip(yc).map(|(p, q)| p + q * a).collect())
        .collect()
}

/// Integrate `initial` to `config.t_final` with a fixed step.
pub fn evolve(
    grid: &PeriodicGrid,
    spec: &SystemSpec,
    initial: &State,
    config: &EvolutionConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if !initial.matches(spec) {
        return Err(QnlsError::InvalidInput(format!(
            "initial state does not match system {}",
            spec.name()
        )));
    }
    if initial.len() != grid.n() {
        return Err(QnlsError::InvalidInput(format!(
            "state has {} samples, grid has {}",
            initial.len(),
            grid.n()
        )));
    }
    let tail = max_tail(grid, initial);
    if tail > INITIAL_TAIL_LIMIT {
        return Err(QnlsError::Resolution { t: 0.0, tail_ratio: tail });
    }
    let stepper = Stepper { grid, spec: *spec, like: initial.clone(), opts: config.eval_options() };
    let record = |t: f64, s: &State, mean: f64, traj: &mut Trajectory| {
        let (h, m, v) = monitors(grid, spec, s);
        traj.times.push(t);
        traj.snapshots.push(s.clone());
        traj.monitors.push(MonitorRow { t, hamiltonian: h, mass: m, v_integral: v, removed_mean: mean });
    };
    let mut traj = Trajectory {
        grid: grid.clone(),
        system: *spec,
        config: *config,
        times: Vec::new(),
        snapshots: Vec::new(),
        monitors: Vec::new(),
    };
    record(0.0, initial, 0.0, &mut traj);

    let steps = config.steps();
    let mut c = initial.components();
    let mut mean_since = 0.0f64;
    for n in 1..=steps {
        let t = n as f64 * config.dt;
        let (next, mean) = match config.scheme {
            Scheme::Rk4 => stepper.step_rk4(&c, config.dt)?,
            Scheme::IfRk4 => stepper.step_if_rk4(&c, config.dt)?,
        };
        c = next;
        mean_since = mean_since.max(mean);
        let max_abs = peak(c.iter().flatten().map(|z| z.norm()));
        if !(max_abs <= BLOWUP_THRESHOLD) {
            return Err(QnlsError::Blowup { t, max_abs });
        }
        if n % config.snapshot_stride == 0 || n == steps {
            let s = State::from_components(initial, c.clone());
            let tail = max_tail(grid, &s);
            if tail > RESOLUTION_LIMIT {
                return Err(QnlsError::Resolution { t, tail_ratio: tail });
            }
            record(t, &s, mean_since, &mut traj);
            mean_since = 0.0;
        }
    }
    Ok(traj)
}

fn max_tail(grid: &PeriodicGrid, s: &State) -> f64 {
    s.components().iter().map(|c| grid.tail_ratio(c)).fold(0.0, f64::max)
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.snapshots.last().expect("a trajectory always holds the initial state")
    }

    pub fn generator(&self) -> Option<SU2Generator> {
        self.system.generator()
    }
}
