//! CSV and JSON output. Every writer goes through a temporary file in the
//! target directory and a rename, so readers never see half a file.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpticsError, Result};
use crate::field::{ComplexField, GridSpec};
use crate::interferometer::ProbabilityMap;
use crate::wigner::WignerMap;

/// Convention string stored with every Wigner map.
pub const WIGNER_CONVENTION: &str = "1/pi * integral, k = p/hbar";

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| OpticsError::Io(e.error))?;
    Ok(())
}

pub fn field_to_csv(field: &ComplexField) -> String {
    let mut out = String::from("x_m,re,im\n");
    for (i, s) in field.samples().iter().enumerate() {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", field.grid().x(i), s.re, s.im);
    }
    out
}

/// Reads a field written by [`field_to_csv`]; the grid is inferred from the
/// first coordinate and the sample count.
pub fn field_from_csv(text: &str) -> Result<ComplexField> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x_m,re,im" => {}
        _ => return Err(OpticsError::Format("expected header `x_m,re,im`".into())),
    }
    let mut xs = Vec::new();
    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| OpticsError::Format(format!("line {}: `{s}` is not a number", i + 1)))
        };
        if cols.len() != 3 {
            return Err(OpticsError::Format(format!("line {}: expected 3 columns", i + 1)));
        }
        xs.push(parse(cols[0])?);
        samples.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
    }
    let Some(&x0) = xs.first() else {
        return Err(OpticsError::Format("no samples".into()));
    };
    let grid = GridSpec::new(xs.len(), -x0)?;
    let dx = grid.spacing();
    if let Some((i, x)) = xs.iter().enumerate().find(|(i, x)| (grid.x(*i) - **x).abs() > 1e-6 * dx) {
        return Err(OpticsError::Format(format!(
            "sample {i} at x = {x:e} m is off the uniform grid inferred from the first point"
        )));
    }
    ComplexField::from_samples(grid, samples)
}

pub fn write_field_csv(path: &Path, field: &ComplexField) -> Result<()> {
    write_atomic(path, field_to_csv(field).as_bytes())
}

pub fn read_field_csv(path: &Path) -> Result<ComplexField> {
    field_from_csv(&std::fs::read_to_string(path)?)
}

pub fn probability_map_to_csv(map: &ProbabilityMap) -> String {
    let mut out = String::from("phi_rad,x_m,intensity\n");
    for (k, phi) in map.phases.iter().enumerate() {
        for (x, v) in map.x_axis.iter().zip(map.profile(k)) {
            let _ = writeln!(out, "{phi:.16e},{x:.16e},{v:.16e}");
        }
    }
    out
}

pub fn probability_map_to_json(map: &ProbabilityMap) -> Result<String> {
    Ok(serde_json::to_string(map)?)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WignerJson {
    pub x_axis: Vec<f64>,
    pub k_axis: Vec<f64>,
    /// Row-major `[x][k]`.
    pub values: Vec<f64>,
    pub convention: String,
    pub hbar: f64,
}

pub fn wigner_to_json(map: &WignerMap, hbar: f64) -> Result<String> {
    let doc = WignerJson {
        x_axis: map.x_axis.clone(),
        k_axis: map.k_axis.clone(),
        values: map.values.clone(),
        convention: WIGNER_CONVENTION.to_string(),
        hbar,
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn wigner_to_csv(map: &WignerMap) -> String {
    let mut out = String::from("x_m,k_radpm,w\n");
    for (ix, x) in map.x_axis.iter().enumerate() {
        for (k, w) in map.k_axis.iter().zip(map.row(ix)) {
            let _ = writeln!(out, "{x:.16e},{k:.16e},{w:.16e}");
        }
    }
    out
}
