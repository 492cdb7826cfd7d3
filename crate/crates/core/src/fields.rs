//! Cell-mean fields, the test-field initialisers and verification metrics.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{clip_halfplane, polygon_area, Point, Polygon};
use crate::mesh::{CellId, Mesh};
use crate::quadrature::TriangleRule;
use crate::sum::neumaier;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("field has {got} values but the mesh has {expected} cells")]
    SizeMismatch { expected: usize, got: usize },
    #[error("no logical row crosses the transition band ({lo}, {hi})")]
    NoCrossing { lo: f64, hi: f64 },
}

/// Per-cell mean values aligned to a mesh with `ncx x ncy` cells, `ci`
/// varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    ncx: usize,
    ncy: usize,
    values: Vec<f64>,
}

impl CellField {
    pub fn new(ncx: usize, ncy: usize, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != ncx * ncy {
            return Err(FieldError::SizeMismatch {
                expected: ncx * ncy,
                got: values.len(),
            });
        }
        Ok(Self { ncx, ncy, values })
    }

    pub fn for_mesh(mesh: &Mesh, values: Vec<f64>) -> Result<Self, FieldError> {
        let (ncx, ncy) = mesh.cell_dims();
        Self::new(ncx, ncy, values)
    }

    pub fn constant(mesh: &Mesh, k: f64) -> Self {
        let (ncx, ncy) = mesh.cell_dims();
        Self {
            ncx,
            ncy,
            values: vec![k; ncx * ncy],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ncx, self.ncy)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, c: CellId) -> f64 {
        self.values[c.cj * self.ncx + c.ci]
    }

    pub fn matches(&self, mesh: &Mesh) -> Result<(), FieldError> {
        if mesh.cell_dims() != (self.ncx, self.ncy) {
            return Err(FieldError::SizeMismatch {
                expected: mesh.num_cells(),
                got: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ f_c V_c` with compensated summation.
    pub fn mass(&self, volumes: &[f64]) -> f64 {
        neumaier(self.values.iter().zip(volumes).map(|(f, v)| f * v))
    }
}

/// Analytic initial distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    /// `1 + sin(2πx) sin(2πy)`
    Sine,
    /// 1 where `y <= (x - 0.4) / 0.3`, 0 elsewhere.
    Shock,
    /// `a + b x + c y`
    Affine { a: f64, b: f64, c: f64 },
    Constant(f64),
}

impl FieldSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FieldSpec::Sine => "sine",
            FieldSpec::Shock => "shock",
            FieldSpec::Affine { .. } => "affine",
            FieldSpec::Constant(_) => "constant",
        }
    }

    /// Point value of the distribution.
    pub fn eval(&self, p: Point) -> f64 {
        match *self {
            FieldSpec::Sine => 1.0 + (2.0 * PI * p.x).sin() * (2.0 * PI * p.y).sin(),
            FieldSpec::Shock => {
                if p.y <= (p.x - 0.4) / 0.3 {
                    1.0
                } else {
                    0.0
                }
            }
            FieldSpec::Affine { a, b, c } => a + b * p.x + c * p.y,
            FieldSpec::Constant(k) => k,
        }
    }
}

/// Points per direction of the collapsed triangle rule (exact to degree 8).
const INIT_RULE_POINTS: usize = 5;

/// Cell means of `spec` on every cell of `mesh`.
///
/// Smooth fields use Gauss quadrature on the two triangles of each quad; the
/// shock is integrated exactly by clipping each cell against its half-plane.
pub fn init_means(mesh: &Mesh, spec: &FieldSpec) -> CellField {
    let rule = TriangleRule::new(INIT_RULE_POINTS);
    let values = mesh
        .cells()
        .map(|c| {
            let [p0, p1, p2, p3] = mesh.cell_corners(c);
            let quad = Polygon::new(vec![p0, p1, p2, p3]);
            let area = polygon_area(&quad);
            match *spec {
                FieldSpec::Constant(k) => k,
                FieldSpec::Shock => {
                    // x - 0.3 y - 0.4 >= 0 is the left side of (0.4,0) -> (0.7,1).
                    let inside = clip_halfplane(
                        quad.vertices(),
                        Point::new(0.7, 1.0),
                        Point::new(0.4, 0.0),
                    );
                    let part = polygon_area(&Polygon::new(inside));
                    (part / area).clamp(0.0, 1.0)
                }
                _ => {
                    let f = |p| spec.eval(p);
                    (rule.integrate(p0, p1, p2, f) + rule.integrate(p0, p2, p3, f)) / area
                }
            }
        })
        .collect();
    CellField::for_mesh(mesh, values).expect("one value per cell")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Volume-weighted L1 and L2 norms and the max norm of `field - reference`.
pub fn norms(field: &CellField, reference: &CellField, mesh: &Mesh) -> Result<Norms, FieldError> {
    field.matches(mesh)?;
    reference.matches(mesh)?;
    let mut l1 = Vec::with_capacity(mesh.num_cells());
    let mut l2 = Vec::with_capacity(mesh.num_cells());
    let mut linf: f64 = 0.0;
    for (k, c) in mesh.cells().enumerate() {
        let v = polygon_area(&Polygon::new(mesh.cell_corners(c).to_vec()));
        let d = field.values[k] - reference.values[k];
        l1.push(v * d.abs());
        l2.push(v * d * d);
        linf = linf.max(d.abs());
    }
    Ok(Norms {
        l1: neumaier(l1),
        l2: neumaier(l2).sqrt(),
        linf,
    })
}

/// Mean number of cells per logical row with `lo < f < hi`, over rows that
/// contain both a cell at or below `lo` and a cell at or above `hi`.
pub fn interface_width(field: &CellField, lo: f64, hi: f64) -> Result<f64, FieldError> {
    let (ncx, ncy) = field.dims();
    let mut rows = 0usize;
    let mut total = 0usize;
    for cj in 0..ncy {
        let row = &field.values[cj * ncx..(cj + 1) * ncx];
        let low = row.iter().any(|&f| f <= lo);
        let high = row.iter().any(|&f| f >= hi);
        if low && high {
            rows += 1;
            total += row.iter().filter(|&&f| f > lo && f < hi).count();
        }
    }
    if rows == 0 {
        return Err(FieldError::NoCrossing { lo, hi });
    }
    Ok(total as f64 / rows as f64)
}

/// Summary of a complete remap run.
#[derive(Debug, Clone, PartialEq)]
pub struct RemapReport {
    pub steps: usize,
    pub cells: usize,
    pub mass_initial: f64,
    pub mass_final: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub field_min: f64,
    pub field_max: f64,
    pub ref_min: f64,
    pub ref_max: f64,
    pub overshoot: f64,
    pub interface_width: Option<f64>,
}

impl RemapReport {
    /// Builds the report from the final field, its reference and the initial
    /// mass. `width_band` requests the interface width for that `(lo, hi)`.
    pub fn evaluate(
        steps: usize,
        mass_initial: f64,
        final_mesh: &Mesh,
        field: &CellField,
        reference: &CellField,
        width_band: Option<(f64, f64)>,
    ) -> Result<Self, FieldError> {
        let n = norms(field, reference, final_mesh)?;
        let volumes: Vec<f64> = final_mesh
            .cells()
            .map(|c| polygon_area(&Polygon::new(final_mesh.cell_corners(c).to_vec())))
            .collect();
        let (field_min, field_max) = (field.min(), field.max());
        let (ref_min, ref_max) = (reference.min(), reference.max());
        let interface_width = width_band
            .map(|(lo, hi)| interface_width(field, lo, hi))
            .transpose()?;
        Ok(Self {
            steps,
            cells: final_mesh.num_cells(),
            mass_initial,
            mass_final: field.mass(&volumes),
            l1: n.l1,
            l2: n.l2,
            linf: n.linf,
            field_min,
            field_max,
            ref_min,
            ref_max,
            overshoot: (field_max - ref_max).max(0.0) + (ref_min - field_min).max(0.0),
            interface_width,
        })
    }

    pub fn mass_relative_error(&self) -> f64 {
        let scale = self.mass_initial.abs();
        let diff = (self.mass_final - self.mass_initial).abs();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    /// Flat `key=value` text, one entry per line, 17 significant digits.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: f64| {
            let _ = writeln!(s, "{k}={v:.16e}");
        };
        put("mass_initial", self.mass_initial);
        put("mass_final", self.mass_final);
        put("mass_rel_error", self.mass_relative_error());
        put("l1", self.l1);
        put("l2", self.l2);
        put("linf", self.linf);
        put("field_min", self.field_min);
        put("field_max", self.field_max);
        put("ref_min", self.ref_min);
        put("ref_max", self.ref_max);
        put("overshoot", self.overshoot);
        if let Some(w) = self.interface_width {
            put("interface_width", w);
        }
        let _ = writeln!(s, "steps={}", self.steps);
        let _ = writeln!(s, "cells={}", self.cells);
        s
    }
}
