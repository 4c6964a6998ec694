//! `qnls reconstruct-curve`: build a curve, its normal complex structure,
//! and optionally evolve it by the bi-normal flow.

use crate::config::{ConfigError, CurveCase, CurveConfig, CurveShape};
use crate::failure::{write_error_json, Failure};
use anyhow::Context;
use qnls::geomflow::{self, CurveState, StructureResiduals};
use qnls::{io, initial, PeriodicGrid};
use serde::Serialize;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub case: CurveCase,
    pub n: usize,
    pub length: f64,
    pub speed_deviation: f64,
    pub structure: Option<StructureResiduals>,
    pub frame_defect: Option<f64>,
    pub frenet_defect: Option<f64>,
    pub snapshots: usize,
    pub max_speed_drift: Option<f64>,
}

fn build_curve(cfg: &CurveConfig) -> Result<(PeriodicGrid, CurveState), Failure> {
    let dim = cfg.case.dimension();
    let bad = |m: String| Failure::Config(ConfigError::Invalid(m));
    let built = match &cfg.curve {
        CurveShape::Circle { radius } => geomflow::circle(dim, cfg.n, *radius),
        CurveShape::Helix { a, b, turns } => {
            if cfg.case != CurveCase::R3 {
                return Err(bad("helix curves are only defined in R3".into()));
            }
            geomflow::helix(cfg.n, *a, *b, *turns)
        }
        CurveShape::Random { length, modes, wobble } => PeriodicGrid::new(cfg.n, *length).and_then(|g| {
            let c = geomflow::random_curve(&g, dim, &mut initial::rng(cfg.seed), *modes, *wobble)?;
            Ok((g, c))
        }),
    };
    built.map_err(|e| if e.is_numerical() { Failure::Numerical(e) } else { bad(e.to_string()) })
}

pub fn reconstruct(cfg: &CurveConfig) -> Result<CurveReport, Failure> {
    match run(cfg) {
        Err(Failure::Numerical(e)) => {
            write_error_json(&cfg.out, &e)?;
            Err(Failure::Numerical(e))
        }
        other => other,
    }
}

fn run(cfg: &CurveConfig) -> Result<CurveReport, Failure> {
    let (grid, curve) = build_curve(cfg)?;
    let out = &cfg.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    io::write_json(&out.join("meta.json"), cfg)?;
    write_curve(&out.join("curve.csv"), &grid, &curve)?;

    let mut report = CurveReport {
        case: cfg.case,
        n: grid.n(),
        length: grid.length(),
        speed_deviation: curve.speed_deviation(&grid),
        structure: None,
        frame_defect: None,
        frenet_defect: None,
        snapshots: 1,
        max_speed_drift: None,
    };

    let generator = || {
        cfg.generator
            .map(Into::into)
            .ok_or_else(|| Failure::Config(ConfigError::Invalid("su4sp2/so6u3 need a [generator] table".into())))
    };
    let curves = match cfg.case.normal_case() {
        None => {
            report.frenet_defect = geomflow::frenet_frame(&grid, &curve, geomflow::DEFAULT_KAPPA_MIN)
                .ok()
                .map(|f| f.orthonormality_defect());
            match &cfg.evolution {
                Some(ev) => {
                    let t = geomflow::evolve_filament(&grid, &curve, ev)?;
                    report.max_speed_drift = Some(t.max_speed_drift());
                    t.curves
                }
                None => Vec::new(),
            }
        }
        Some(case) => {
            let j = generator()?;
            let s = geomflow::build_normal_structure(&grid, &curve, case, &j)?;
            report.structure = Some(s.residuals());
            report.frame_defect = Some(s.frame_defect);
            let f = BufWriter::new(File::create(out.join("structure.bin")).context("creating structure.bin")?);
            io::write_structure(f, &s)?;
            match &cfg.evolution {
                Some(ev) => {
                    let t = geomflow::evolve_su2_binormal(&grid, &curve, case, &j, ev)?;
                    report.max_speed_drift = Some(t.max_speed_drift());
                    t.curves
                }
                None => Vec::new(),
            }
        }
    };
    if !curves.is_empty() {
        let dir = out.join("curves");
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, c) in curves.iter().enumerate() {
            write_curve(&dir.join(format!("{i:04}.csv")), &grid, c)?;
        }
        report.snapshots = curves.len();
    }
    io::write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

fn write_curve(path: &Path, grid: &PeriodicGrid, c: &CurveState) -> Result<(), Failure> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    io::write_curve_csv(BufWriter::new(f), grid, c)?;
    Ok(())
}
