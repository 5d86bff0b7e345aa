//! Text formats: fields as `x,re,im`, intensities as `p,intensity`, retrieved
//! phases as `p,phase,valid` with a JSON sidecar. Numbers are written with 17
//! significant digits so 64-bit values survive a round trip. Files are written
//! to a temporary sibling and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expfilter::{FilterSpec, PhaseResult};
use crate::wavefield::{Grid, SampledField};

/// Allowed relative deviation of any sample spacing from the mean spacing.
pub const SPACING_TOLERANCE: f64 = 1e-9;

pub const FIELD_HEADER: &str = "x,re,im";
pub const INTENSITY_HEADER: &str = "p,intensity";
pub const PHASE_HEADER: &str = "p,phase,valid";

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::other(format!("{} has no file name", path.display()))))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    fs::write(&tmp, contents)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

/// Writes a header and rows as a CSV file.
pub fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    write_atomic(path, &text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, &text)
}

fn format_field(field: &SampledField) -> impl Iterator<Item = String> + '_ {
    field
        .grid()
        .positions()
        .zip(field.values())
        .map(|(x, v)| format!("{x:.16e},{:.16e},{:.16e}", v.re, v.im))
}

pub fn save_field(field: &SampledField, path: &Path) -> Result<()> {
    write_csv(path, FIELD_HEADER, format_field(field))
}

/// Parses rows with a fixed header into columns of floats. Row numbers in
/// errors count lines from 1, header included.
fn parse_table(text: &str, header: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let width = header.split(',').count();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        Some((i, first)) => {
            return Err(Error::MalformedRow {
                row: i + 1,
                message: format!("expected header `{header}`, found `{}`", first.trim()),
            })
        }
        None => {
            return Err(Error::MalformedRow {
                row: 1,
                message: "empty file".into(),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != width {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    message: format!("expected {width} columns, found {}", cells.len()),
                });
            }
            cells
                .iter()
                .map(|c| {
                    c.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::MalformedRow {
                            row: i + 1,
                            message: format!("`{c}` is not a finite number"),
                        })
                })
                .collect()
        })
        .collect()
}

/// Infers a uniform grid from sample coordinates. The row reported for a
/// deviation is the file line of the later sample of the offending pair.
fn infer_grid(coords: &[f64]) -> Result<Grid> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
    }
    let dx = (coords[n - 1] - coords[0]) / (n - 1) as f64;
    for (k, pair) in coords.windows(2).enumerate() {
        let deviation = ((pair[1] - pair[0]) - dx).abs() / dx.abs();
        if !(deviation <= SPACING_TOLERANCE) {
            return Err(Error::NonUniformGrid {
                row: k + 3,
                deviation,
            });
        }
    }
    Grid::new(coords[0], dx, n)
}

pub fn parse_field(text: &str) -> Result<SampledField> {
    let rows = parse_table(text, FIELD_HEADER)?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = infer_grid(&xs)?;
    SampledField::new(grid, rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}

pub fn load_field(path: &Path) -> Result<SampledField> {
    parse_field(&fs::read_to_string(path)?)
}

pub fn save_intensity(grid: &Grid, intensity: &[f64], path: &Path) -> Result<()> {
    if intensity.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: intensity.len(),
        });
    }
    write_csv(
        path,
        INTENSITY_HEADER,
        grid.momenta().zip(intensity).map(|(p, i)| format!("{p:.16e},{i:.16e}")),
    )
}

/// Momentum samples and intensities. The momentum grid must be uniform.
pub fn load_intensity(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = parse_table(&fs::read_to_string(path)?, INTENSITY_HEADER)?;
    let ps: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    infer_grid(&ps)?;
    Ok((ps, rows.iter().map(|r| r[1]).collect()))
}

#[derive(Serialize)]
struct PhaseSidecar<'a> {
    tilt: f64,
    c: f64,
    s: f64,
    floor_rel: f64,
    diagnostics: &'a std::collections::BTreeMap<String, f64>,
    warnings: &'a [String],
}

/// Writes `p,phase,valid` rows to `path` and the metadata to `path` with a
/// `.json` extension.
pub fn save_phase_result(
    pr: &PhaseResult,
    grid: &Grid,
    fs: &FilterSpec,
    floor_rel: f64,
    path: &Path,
) -> Result<PathBuf> {
    write_csv(
        path,
        PHASE_HEADER,
        grid.momenta()
            .zip(&pr.phase)
            .zip(&pr.valid)
            .map(|((p, phi), ok)| format!("{p:.16e},{phi:.16e},{}", u8::from(*ok))),
    )?;
    let sidecar = path.with_extension("json");
    write_json(
        &sidecar,
        &PhaseSidecar {
            tilt: pr.tilt,
            c: fs.c,
            s: fs.s,
            floor_rel,
            diagnostics: &pr.diagnostics,
            warnings: &pr.warnings,
        },
    )?;
    Ok(sidecar)
}
