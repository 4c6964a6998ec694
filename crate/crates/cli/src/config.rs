//! TOML run configurations.

use qnls::geomflow::NormalCase;
use qnls::initial::{self, Parity};
use qnls::integrator::{State, SystemSpec};
use qnls::io;
use qnls::systems::{NlsParams, StateNls, StateSys1, StateSys2};
use qnls::{EvolutionConfig, PeriodicGrid, SU2Generator, C64};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
    toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_owned(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Nls,
    Sys1,
    Sys2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub theta: f64,
    pub psi: f64,
}

impl From<GeneratorConfig> for SU2Generator {
    fn from(g: GeneratorConfig) -> Self {
        SU2Generator::new(g.theta, g.psi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

/// Initial data. Scalar families fill `u1` (or `u` for NLS); for sys2 the
/// `v` component is set by `v` (constant) or `v_amplitude` (random).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InitialSpec {
    PlaneWave {
        amplitude: f64,
        #[serde(default)]
        phase: f64,
        mode: i64,
        #[serde(default)]
        v: f64,
    },
    GaussianRotation {
        amplitude: f64,
        width: f64,
        twist: f64,
        #[serde(default)]
        v: f64,
    },
    ScalarEmbedding {
        amplitude: f64,
        modes: usize,
    },
    Random {
        amplitude: f64,
        modes: usize,
        #[serde(default)]
        parity: Parity,
        #[serde(default)]
        v_amplitude: f64,
    },
    /// Field binary (`.bin`) or field CSV (`.csv`) snapshot.
    File { path: PathBuf },
}

impl InitialSpec {
    pub fn amplitude_mut(&mut self) -> Option<&mut f64> {
        match self {
            InitialSpec::PlaneWave { amplitude, .. }
            | InitialSpec::GaussianRotation { amplitude, .. }
            | InitialSpec::ScalarEmbedding { amplitude, .. }
            | InitialSpec::Random { amplitude, .. } => Some(amplitude),
            InitialSpec::File { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: SystemKind,
    pub seed: u64,
    pub out: PathBuf,
    /// Spectral parameter used for the Lax residual in the summary.
    pub chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nls: Option<NlsParams>,
    pub grid: GridConfig,
    pub evolution: EvolutionConfig,
    pub initial: InitialSpec,
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// Checks ranges and builds the grid and system.
    pub fn resolve(&self) -> Result<(PeriodicGrid, SystemSpec), ConfigError> {
        let grid = PeriodicGrid::new(self.grid.n, self.grid.length).map_err(|e| invalid(e.to_string()))?;
        self.evolution.validate().map_err(|e| invalid(e.to_string()))?;
        if !self.chi.is_finite() {
            return Err(invalid("chi must be finite"));
        }
        let generator = || -> Result<SU2Generator, ConfigError> {
            let g = self.generator.ok_or_else(|| invalid("sys1/sys2 need a [generator] table"))?;
            if !(g.theta.is_finite() && g.psi.is_finite()) {
                return Err(invalid("generator angles must be finite"));
            }
            Ok(g.into())
        };
        let spec = match self.system {
            SystemKind::Nls => {
                let p = self.nls.unwrap_or_default();
                if ![p.g, p.c1, p.c2].iter().all(|x| x.is_finite()) {
                    return Err(invalid("nls parameters must be finite"));
                }
                SystemSpec::Nls(p)
            }
            SystemKind::Sys1 => SystemSpec::Sys1 { generator: generator()? },
            SystemKind::Sys2 => SystemSpec::Sys2 { generator: generator()? },
        };
        if let InitialSpec::File { path } = &self.initial {
            if !path.is_file() {
                return Err(invalid(format!("initial file {} does not exist", path.display())));
            }
        }
        if let Some(&mut a) = self.initial.clone().amplitude_mut() {
            if !(a.is_finite() && a >= 0.0) {
                return Err(invalid("initial amplitude must be finite and non-negative"));
            }
        }
        Ok((grid, spec))
    }

    pub fn initial_state(&self, grid: &PeriodicGrid, spec: &SystemSpec) -> Result<State, ConfigError> {
        let n = grid.n();
        let mut rng = initial::rng(self.seed);
        let j = spec.generator().unwrap_or_else(SU2Generator::diagonal);
        let (u1, u2, v): (Vec<C64>, Option<Vec<C64>>, Vec<f64>) = match &self.initial {
            InitialSpec::PlaneWave { amplitude, phase, mode, v } => {
                (initial::plane_wave(grid, C64::from_polar(*amplitude, *phase), *mode), None, vec![*v; n])
            }
            InitialSpec::GaussianRotation { amplitude, width, twist, v } => {
                if !(width.is_finite() && *width > 0.0) {
                    return Err(invalid("gaussian width must be positive"));
                }
                let u = initial::gaussian_rotation(grid, *amplitude, *width, *twist, &j);
                (u.u1, Some(u.u2), vec![*v; n])
            }
            InitialSpec::ScalarEmbedding { amplitude, modes } => {
                let u = initial::random_complex(grid, &mut rng, *amplitude, *modes, Parity::None);
                (u, None, vec![0.0; n])
            }
            InitialSpec::Random { amplitude, modes, parity, v_amplitude } => {
                if self.system == SystemKind::Nls {
                    (initial::random_complex(grid, &mut rng, *amplitude, *modes, *parity), None, vec![0.0; n])
                } else {
                    let u = initial::random_spinor(grid, &mut rng, *amplitude, *modes, *parity);
                    let v_parity = match parity {
                        Parity::Even => Parity::Odd,
                        p => *p,
                    };
                    let v = if self.system == SystemKind::Sys2 && *v_amplitude > 0.0 {
                        initial::random_real(grid, &mut rng, *v_amplitude, *modes, v_parity)
                    } else {
                        vec![0.0; n]
                    };
                    (u.u1, Some(u.u2), v)
                }
            }
            InitialSpec::File { path } => return read_state_file(path, grid, spec),
        };
        let u2 = u2.unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
        let u = qnls::SpinorField { u1, u2 };
        Ok(match self.system {
            SystemKind::Nls => State::Nls(StateNls { u: u.u1 }),
            SystemKind::Sys1 => State::Sys1(StateSys1 { u }),
            SystemKind::Sys2 => State::Sys2(StateSys2 { v, u }),
        })
    }
}

fn read_state_file(path: &Path, grid: &PeriodicGrid, spec: &SystemSpec) -> Result<State, ConfigError> {
    let file = File::open(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
    let bad = |e: qnls::QnlsError| invalid(format!("{}: {e}", path.display()));
    let comps = if path.extension().is_some_and(|e| e == "csv") {
        io::read_field_csv(BufReader::new(file)).map_err(bad)?.1
    } else {
        let snap = io::read_field_binary(BufReader::new(file)).map_err(bad)?;
        if snap.n != grid.n() || snap.length != grid.length() {
            return Err(invalid(format!(
                "{}: snapshot grid (N={}, L={}) differs from config",
                path.display(),
                snap.n,
                snap.length
            )));
        }
        snap.components
    };
    if comps.first().map_or(0, Vec::len) != grid.n() {
        return Err(invalid(format!("{}: sample count differs from grid N", path.display())));
    }
    State::from_parts(spec, comps).map_err(bad)
}

/// Parameter axes of a sweep. A missing axis keeps the template value; an
/// empty list makes the whole grid empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepAxes {
    pub theta: Option<Vec<f64>>,
    pub psi: Option<Vec<f64>>,
    pub chi: Option<Vec<f64>>,
    pub dt: Option<Vec<f64>>,
    pub amplitude: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub out: PathBuf,
    #[serde(default)]
    pub axes: SweepAxes,
    pub template: RunConfig,
}

/// One sweep cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub theta: f64,
    pub psi: f64,
    pub chi: f64,
    pub dt: f64,
    pub amplitude: f64,
}

impl SweepConfig {
    pub fn points(&self) -> Vec<SweepPoint> {
        let t = &self.template;
        let g = t.generator.unwrap_or(GeneratorConfig { theta: f64::NAN, psi: f64::NAN });
        let amp = t.initial.clone().amplitude_mut().map_or(f64::NAN, |a| *a);
        let axis = |a: &Option<Vec<f64>>, d: f64| a.clone().unwrap_or_else(|| vec![d]);
        let a = &self.axes;
        let mut out = Vec::new();
        for &theta in &axis(&a.theta, g.theta) {
            for &psi in &axis(&a.psi, g.psi) {
                for &chi in &axis(&a.chi, t.chi) {
                    for &dt in &axis(&a.dt, t.evolution.dt) {
                        for &amplitude in &axis(&a.amplitude, amp) {
                            out.push(SweepPoint { theta, psi, chi, dt, amplitude });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn cell(&self, p: &SweepPoint) -> RunConfig {
        let mut c = self.template.clone();
        if c.generator.is_some() || self.axes.theta.is_some() || self.axes.psi.is_some() {
            c.generator = Some(GeneratorConfig { theta: p.theta, psi: p.psi });
        }
        c.chi = p.chi;
        c.evolution.dt = p.dt;
        if let Some(a) = c.initial.amplitude_mut() {
            *a = p.amplitude;
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveCase {
    R3,
    Su4sp2,
    So6u3,
}

impl CurveCase {
    pub fn normal_case(self) -> Option<NormalCase> {
        match self {
            CurveCase::R3 => None,
            CurveCase::Su4sp2 => Some(NormalCase::Su4Sp2),
            CurveCase::So6u3 => Some(NormalCase::So6U3),
        }
    }

    pub fn dimension(self) -> usize {
        self.normal_case().map_or(3, NormalCase::dimension)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum CurveShape {
    Circle { radius: f64 },
    /// R³ only.
    Helix { a: f64, b: f64, turns: usize },
    /// Perturbed unit circle of length `length`.
    Random { length: f64, modes: usize, wobble: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub case: CurveCase,
    pub seed: u64,
    pub out: PathBuf,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorConfig>,
    pub curve: CurveShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionConfig>,
}
