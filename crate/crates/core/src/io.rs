//! File formats.
//!
//! * Mesh CSV: header `i,j,x,y`, one row per node, `j` outer and `i` inner,
//!   one-based indices.
//! * Field CSV: header `ci,cj,cx,cy,value`, one row per cell in the same
//!   order, one-based cell indices, cell centroid and mean.
//! * Report: `key=value` lines (see `RemapReport::to_key_value`).
//! * Legacy ASCII VTK structured grid with a single `CELL_DATA` scalar.
//!
//! Floating-point values are written with 17 significant digits, so they
//! read back bit-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fields::CellField;
use crate::geometry::{polygon_centroid, Point, Polygon};
use crate::mesh::Mesh;
use crate::remap::StepReport;

pub const MESH_HEADER: &str = "i,j,x,y";
pub const FIELD_HEADER: &str = "ci,cj,cx,cy,value";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {error}")]
    Io {
        path: PathBuf,
        error: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn schema(path: &Path, line: usize, message: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        error: source,
    })
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        error: source,
    })
}

pub fn mesh_to_csv(mesh: &Mesh) -> String {
    let mut s = String::with_capacity(48 * mesh.coords().len());
    s.push_str(MESH_HEADER);
    s.push('\n');
    for j in 0..mesh.ny() {
        for i in 0..mesh.nx() {
            let p = mesh.node(i, j);
            let _ = writeln!(s, "{},{},{:.16e},{:.16e}", i + 1, j + 1, p.x, p.y);
        }
    }
    s
}

pub fn field_to_csv(mesh: &Mesh, field: &CellField) -> String {
    let mut s = String::with_capacity(80 * mesh.num_cells());
    s.push_str(FIELD_HEADER);
    s.push('\n');
    for (k, c) in mesh.cells().enumerate() {
        let r = polygon_centroid(&Polygon::new(mesh.cell_corners(c).to_vec()))
            .unwrap_or_else(|_| Point::new(f64::NAN, f64::NAN));
        let _ = writeln!(
            s,
            "{},{},{:.16e},{:.16e},{:.16e}",
            c.ci + 1,
            c.cj + 1,
            r.x,
            r.y,
            field.values()[k]
        );
    }
    s
}

/// Parses the rows of a CSV with the given header into numeric columns.
fn parse_rows(path: &Path, text: &str, header: &str) -> Result<Vec<Vec<f64>>, IoError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => return Err(schema(path, 1, format!("expected header `{header}`, got `{h}`"))),
        None => return Err(schema(path, 1, "empty file")),
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| schema(path, idx + 1, e.to_string()))?;
        if row.len() != width {
            return Err(schema(path, idx + 1, format!("expected {width} columns, got {}", row.len())));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(schema(path, 2, "no data rows"));
    }
    Ok(rows)
}

fn index_dims(path: &Path, rows: &[Vec<f64>]) -> Result<(usize, usize), IoError> {
    let nx = rows.iter().map(|r| r[0]).fold(0.0, f64::max) as usize;
    let ny = rows.iter().map(|r| r[1]).fold(0.0, f64::max) as usize;
    if nx * ny != rows.len() {
        return Err(schema(path, 2, format!("{} rows do not form a {nx}x{ny} grid", rows.len())));
    }
    for (k, r) in rows.iter().enumerate() {
        let (i, j) = (k % nx + 1, k / nx + 1);
        if r[0] != i as f64 || r[1] != j as f64 {
            return Err(schema(path, k + 2, format!("expected index ({i},{j})")));
        }
    }
    Ok((nx, ny))
}

pub fn mesh_from_csv(path: &Path, text: &str) -> Result<Mesh, IoError> {
    let rows = parse_rows(path, text, MESH_HEADER)?;
    let (nx, ny) = index_dims(path, &rows)?;
    let coords = rows.iter().map(|r| Point::new(r[2], r[3])).collect();
    Mesh::new(nx, ny, coords).map_err(|e| schema(path, 2, e.to_string()))
}

pub fn field_from_csv(path: &Path, text: &str) -> Result<CellField, IoError> {
    let rows = parse_rows(path, text, FIELD_HEADER)?;
    let (ncx, ncy) = index_dims(path, &rows)?;
    CellField::new(ncx, ncy, rows.iter().map(|r| r[4]).collect())
        .map_err(|e| schema(path, 2, e.to_string()))
}

pub fn read_mesh(path: &Path) -> Result<Mesh, IoError> {
    mesh_from_csv(path, &read_file(path)?)
}

pub fn read_field(path: &Path) -> Result<CellField, IoError> {
    field_from_csv(path, &read_file(path)?)
}

/// Legacy ASCII VTK structured grid with the field as cell data.
pub fn field_to_vtk(mesh: &Mesh, field: &CellField, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_GRID");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", mesh.nx(), mesh.ny());
    let _ = writeln!(s, "POINTS {} double", mesh.coords().len());
    for p in mesh.coords() {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", p.x, p.y);
    }
    let _ = writeln!(s, "CELL_DATA {}", mesh.num_cells());
    let _ = writeln!(s, "SCALARS value double 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for v in field.values() {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}

pub fn steps_to_csv(steps: &[StepReport]) -> String {
    let mut s = String::from("step,mass_old,mass_new,max_coverage_defect,field_min,field_max,degenerate_gradients\n");
    for r in steps {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.step, r.mass_old, r.mass_new, r.max_coverage_defect, r.field_min, r.field_max, r.degenerate_gradients
        );
    }
    s
}

/// Reads a `key=value` file into an ordered map.
pub fn parse_key_value(path: &Path, text: &str) -> Result<BTreeMap<String, String>, IoError> {
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| schema(path, idx + 1, "expected key=value"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Report values by key.
pub fn report_values(path: &Path, text: &str) -> Result<BTreeMap<String, f64>, IoError> {
    parse_key_value(path, text)?
        .into_iter()
        .map(|(k, v)| {
            v.parse::<f64>()
                .map(|x| (k.clone(), x))
                .map_err(|_| schema(path, 0, format!("{k}: `{v}` is not a number")))
        })
        .collect()
}
