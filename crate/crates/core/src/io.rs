//! On-disk formats.
//!
//! * Field binary: little-endian `u64 N`, `f64 L`, `u64 components`, then for
//!   each component `N` pairs `(re, im)` of `f64`.
//! * Field CSV: `x, c0_re, c0_im, c1_re, ...`.
//! * Trajectory directory: `meta.json`, `monitors.csv`, `snapshots/NNNN.bin`.
//! * Curve CSV: `x, r0, r1, ...`; structure dumps are `u64 samples`,
//!   `u64 dim`, then row-major `f64` matrices.

use crate::error::{QnlsError, Result};
use crate::geomflow::{CurveState, NormalComplexStructure};
use crate::grid::PeriodicGrid;
use crate::integrator::{EvolutionConfig, MonitorRow, State, SystemSpec, Trajectory};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// A field snapshot as read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub n: usize,
    pub length: f64,
    pub components: Vec<Vec<C64>>,
}

impl FieldSnapshot {
    pub fn grid(&self) -> Result<PeriodicGrid> {
        PeriodicGrid::new(self.n, self.length)
    }
}

pub fn write_field_binary(mut w: impl Write, grid: &PeriodicGrid, comps: &[Vec<C64>]) -> Result<()> {
    w.write_all(&(grid.n() as u64).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&(comps.len() as u64).to_le_bytes())?;
    for c in comps {
        if c.len() != grid.n() {
            return Err(QnlsError::Format("component length differs from N".into()));
        }
        for z in c {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_field_binary(mut r: impl Read) -> Result<FieldSnapshot> {
    let n = read_u64(&mut r)? as usize;
    let length = read_f64(&mut r)?;
    let count = read_u64(&mut r)? as usize;
    if n == 0 || n > 1 << 24 || count > 16 {
        return Err(QnlsError::Format(format!("implausible header N={n}, components={count}")));
    }
    let components = (0..count)
        .map(|_| (0..n).map(|_| Ok(C64::new(read_f64(&mut r)?, read_f64(&mut r)?))).collect())
        .collect::<Result<Vec<Vec<C64>>>>()?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(QnlsError::Format(format!("{} trailing bytes", rest.len())));
    }
    Ok(FieldSnapshot { n, length, components })
}

pub fn write_field_csv(w: impl Write, grid: &PeriodicGrid, comps: &[Vec<C64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["x".to_string()];
    for i in 0..comps.len() {
        header.push(format!("c{i}_re"));
        header.push(format!("c{i}_im"));
    }
    out.write_record(&header)?;
    for (k, x) in grid.points().iter().enumerate() {
        let mut row = vec![x.to_string()];
        for c in comps {
            row.push(c[k].re.to_string());
            row.push(c[k].im.to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Returns the sample positions and the components.
pub fn read_field_csv(r: impl Read) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let width = rdr.headers()?.len();
    if width < 3 || width % 2 == 0 {
        return Err(QnlsError::Format(format!("field CSV has {width} columns")));
    }
    let count = (width - 1) / 2;
    let mut xs = Vec::new();
    let mut comps = vec![Vec::new(); count];
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].trim().parse().map_err(|e| QnlsError::Format(format!("column {i}: {e}")))
        };
        xs.push(num(0)?);
        for (c, comp) in comps.iter_mut().enumerate() {
            comp.push(C64::new(num(1 + 2 * c)?, num(2 + 2 * c)?));
        }
    }
    Ok((xs, comps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub system: SystemSpec,
    pub n: usize,
    pub length: f64,
    pub config: EvolutionConfig,
    /// `(θ, ψ)` of the generator, if any.
    pub generator_angles: Option<(f64, f64)>,
    pub chi: Option<f64>,
    pub times: Vec<f64>,
}

pub fn write_trajectory(dir: &Path, traj: &Trajectory, chi: Option<f64>) -> Result<()> {
    fs::create_dir_all(dir.join("snapshots"))?;
    let meta = TrajectoryMeta {
        system: traj.system,
        n: traj.grid.n(),
        length: traj.grid.length(),
        config: traj.config,
        generator_angles: traj.generator().map(|j| (j.theta(), j.psi())),
        chi,
        times: traj.times.clone(),
    };
    write_json(&dir.join("meta.json"), &meta)?;
    write_monitors(File::create(dir.join("monitors.csv"))?, &traj.monitors)?;
    for (i, s) in traj.snapshots.iter().enumerate() {
        let f = BufWriter::new(File::create(dir.join("snapshots").join(format!("{i:04}.bin")))?);
        write_field_binary(f, &traj.grid, &s.components())?;
    }
    Ok(())
}

pub fn write_monitors(w: impl Write, rows: &[MonitorRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_monitors(r: impl Read) -> Result<Vec<MonitorRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<MonitorRow>, _>>()?)
}

pub fn read_trajectory(dir: &Path) -> Result<(Trajectory, TrajectoryMeta)> {
    let meta: TrajectoryMeta = read_json(&dir.join("meta.json"))?;
    let grid = PeriodicGrid::new(meta.n, meta.length)?;
    let monitors = read_monitors(File::open(dir.join("monitors.csv"))?)?;
    let snapshots = (0..meta.times.len())
        .map(|i| {
            let path = dir.join("snapshots").join(format!("{i:04}.bin"));
            let snap = read_field_binary(BufReader::new(File::open(path)?))?;
            if snap.n != meta.n {
                return Err(QnlsError::Format(format!("snapshot {i} has N={}", snap.n)));
            }
            State::from_parts(&meta.system, snap.components)
        })
        .collect::<Result<Vec<_>>>()?;
    let traj = Trajectory {
        grid,
        system: meta.system,
        config: meta.config,
        times: meta.times.clone(),
        snapshots,
        monitors,
    };
    Ok((traj, meta))
}

pub fn write_curve_csv(w: impl Write, grid: &PeriodicGrid, c: &CurveState) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["x".to_string()];
    header.extend((0..c.dimension()).map(|d| format!("r{d}")));
    out.write_record(&header)?;
    for (k, x) in grid.points().iter().enumerate() {
        let mut row = vec![x.to_string()];
        row.extend(c.r.iter().map(|comp| comp[k].to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the samples of a curve CSV; the drift is supplied by the caller.
pub fn read_curve_csv(r: impl Read, drift: Vec<f64>) -> Result<CurveState> {
    let mut rdr = csv::Reader::from_reader(r);
    let dim = rdr.headers()?.len().saturating_sub(1);
    let mut comps = vec![Vec::new(); dim];
    for rec in rdr.records() {
        let rec = rec?;
        for (d, comp) in comps.iter_mut().enumerate() {
            comp.push(rec[d + 1].trim().parse().map_err(|e| QnlsError::Format(format!("{e}")))?);
        }
    }
    CurveState::new(comps, drift)
}

pub fn write_structure(mut w: impl Write, s: &NormalComplexStructure) -> Result<()> {
    let dim = s.case.dimension();
    w.write_all(&(s.j_r.len() as u64).to_le_bytes())?;
    w.write_all(&(dim as u64).to_le_bytes())?;
    for m in &s.j_r {
        for i in 0..dim {
            for j in 0..dim {
                w.write_all(&m[(i, j)].to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Matrices of a structure dump, row-major per sample.
pub fn read_structure(mut r: impl Read) -> Result<Vec<nalgebra::DMatrix<f64>>> {
    let samples = read_u64(&mut r)? as usize;
    let dim = read_u64(&mut r)? as usize;
    if dim == 0 || dim > 6 || samples > 1 << 24 {
        return Err(QnlsError::Format(format!("implausible structure header {samples}×{dim}")));
    }
    (0..samples)
        .map(|_| {
            let mut v = Vec::with_capacity(dim * dim);
            for _ in 0..dim * dim {
                v.push(read_f64(&mut r)?);
            }
            Ok(nalgebra::DMatrix::from_row_slice(dim, dim, &v))
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
