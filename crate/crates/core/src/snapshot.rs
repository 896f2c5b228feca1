//! Field snapshot files.
//!
//! Format: header line `disk-field v1 <kind> <n_r> <n_theta>` followed by the
//! node values row-major (radius outer, angle inner), one component block per
//! tensor slot, plain-text decimal with 17 significant digits (one value per
//! line). Identical inputs yield byte-identical files.

use std::io::{BufRead, Write};
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{FieldKind, OneForm, ScalarField, SymTensor, TwoForm, VectorField};
use crate::grid::DiskGrid;

fn write_values(out: &mut impl Write, values: &Array2<f64>) -> Result<()> {
    let (n_r, n_t) = values.dim();
    for ja in 0..n_r {
        for k in 0..n_t {
            // {:e} prints the shortest roundtrip form; force 16 fractional
            // digits = 17 significant digits for byte determinism.
            writeln!(out, "{:.16e}", values[[ja, k]])?;
        }
    }
    Ok(())
}

fn write_header(out: &mut impl Write, kind: FieldKind, grid: &DiskGrid) -> Result<()> {
    writeln!(
        out,
        "disk-field v1 {} {} {}",
        kind.label(),
        grid.n_r,
        grid.n_theta
    )?;
    Ok(())
}

pub fn write_scalar(out: &mut impl Write, f: &ScalarField) -> Result<()> {
    write_header(out, FieldKind::Scalar, &f.grid)?;
    write_values(out, &f.values)
}

pub fn write_vector(out: &mut impl Write, f: &VectorField) -> Result<()> {
    write_header(out, FieldKind::Vector, &f.grid)?;
    write_values(out, &f.comp[0])?;
    write_values(out, &f.comp[1])
}

pub fn write_oneform(out: &mut impl Write, f: &OneForm) -> Result<()> {
    write_header(out, FieldKind::OneForm, &f.grid)?;
    write_values(out, &f.comp[0])?;
    write_values(out, &f.comp[1])
}

pub fn write_twoform(out: &mut impl Write, f: &TwoForm) -> Result<()> {
    write_header(out, FieldKind::TwoForm, &f.grid)?;
    write_values(out, &f.comp12)
}

pub fn write_symtensor(out: &mut impl Write, f: &SymTensor) -> Result<()> {
    write_header(out, FieldKind::SymTensor, &f.grid)?;
    write_values(out, &f.c11)?;
    write_values(out, &f.c12)?;
    write_values(out, &f.c22)
}

pub struct SnapshotHeader {
    pub kind: FieldKind,
    pub n_r: usize,
    pub n_theta: usize,
}

fn read_header(line: &str) -> Result<SnapshotHeader> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 5 || parts[0] != "disk-field" || parts[1] != "v1" {
        return Err(Error::Format(format!("bad header: {line:?}")));
    }
    let kind = FieldKind::from_label(parts[2])
        .ok_or_else(|| Error::Format(format!("unknown field kind {:?}", parts[2])))?;
    let n_r = parts[3]
        .parse()
        .map_err(|_| Error::Format("bad n_r".into()))?;
    let n_theta = parts[4]
        .parse()
        .map_err(|_| Error::Format("bad n_theta".into()))?;
    Ok(SnapshotHeader { kind, n_r, n_theta })
}

fn read_block(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    n_r: usize,
    n_t: usize,
) -> Result<Array2<f64>> {
    let mut values = Array2::zeros((n_r, n_t));
    for ja in 0..n_r {
        for k in 0..n_t {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format("truncated snapshot".into()))??;
            values[[ja, k]] = line
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad value {line:?}")))?;
        }
    }
    Ok(values)
}

pub enum Snapshot {
    Scalar(ScalarField),
    Vector(VectorField),
    OneForm(OneForm),
    TwoForm(TwoForm),
    SymTensor(SymTensor),
}

pub fn read_snapshot(input: impl BufRead, grid: Option<Arc<DiskGrid>>) -> Result<Snapshot> {
    let mut lines = input.lines();
    let header = read_header(
        &lines
            .next()
            .ok_or_else(|| Error::Format("empty snapshot".into()))??,
    )?;
    let grid = match grid {
        Some(g) => {
            if g.n_r != header.n_r || g.n_theta != header.n_theta {
                return Err(Error::Format(format!(
                    "grid mismatch: snapshot is {}x{}, expected {}x{}",
                    header.n_r, header.n_theta, g.n_r, g.n_theta
                )));
            }
            g
        }
        None => DiskGrid::new(header.n_r, header.n_theta)?,
    };
    let (n_r, n_t) = (header.n_r, header.n_theta);
    let snap = match header.kind {
        FieldKind::Scalar => Snapshot::Scalar(ScalarField {
            grid,
            values: read_block(&mut lines, n_r, n_t)?,
        }),
        FieldKind::Vector => Snapshot::Vector(VectorField {
            grid,
            comp: [
                read_block(&mut lines, n_r, n_t)?,
                read_block(&mut lines, n_r, n_t)?,
            ],
        }),
        FieldKind::OneForm => Snapshot::OneForm(OneForm {
            grid,
            comp: [
                read_block(&mut lines, n_r, n_t)?,
                read_block(&mut lines, n_r, n_t)?,
            ],
        }),
        FieldKind::TwoForm => Snapshot::TwoForm(TwoForm {
            grid,
            comp12: read_block(&mut lines, n_r, n_t)?,
        }),
        FieldKind::SymTensor => Snapshot::SymTensor(SymTensor {
            grid,
            c11: read_block(&mut lines, n_r, n_t)?,
            c12: read_block(&mut lines, n_r, n_t)?,
            c22: read_block(&mut lines, n_r, n_t)?,
        }),
    };
    Ok(snap)
}
