//! Conservative overlay-intersection remap between two meshes of the same
//! logical shape.
//!
//! The new mean of cell `c̃` is
//!
//! ```text
//! f̃ Ṽ = f_c V_c + Σ_{c' ∈ C'(c)} F(c, c')
//! F(c, c') = ∫_{c̃ ∩ c'} f_{c'}(r) dV − ∫_{c̃' ∩ c} f_c(r) dV
//! ```
//!
//! where `f_c(r)` is the limited linear reconstruction of old cell `c` and
//! `C'(c)` is its node neighbourhood. Each exchange `F` is evaluated once per
//! unordered pair and scattered with opposite signs, so the total mass is
//! conserved independently of the clipping accuracy.

use rayon::prelude::*;
use thiserror::Error;

use crate::fields::{CellField, FieldError};
use crate::geometry::{clip_convex_unchecked, integrate_affine, polygon_area, Point, Polygon};
use crate::mesh::{CellId, Mesh, MeshError, MeshGeometry};
use crate::reconstruct::{reconstruct, CellSlope, LimiterConfig, Reconstruction};
use crate::sum::neumaier;

/// Largest tolerated `|Ṽ − Σ |c̃ ∩ c''|| / Ṽ` over `C(c)`.
pub const COVERAGE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RemapError {
    #[error("meshes differ in shape: {old:?} vs {new:?} cells")]
    ShapeMismatch {
        old: (usize, usize),
        new: (usize, usize),
    },
    #[error("locality violated at new cell {cell}{}: coverage defect {defect:e}", step_suffix(*step))]
    LocalityViolated {
        step: Option<usize>,
        cell: CellId,
        defect: f64,
    },
    #[error("step {step}: {error}")]
    Mesh { step: usize, error: MeshError },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("mesh sequence needs at least one mesh")]
    EmptySequence,
}

fn step_suffix(step: Option<usize>) -> String {
    step.map(|s| format!(" (step {s})")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemapResult {
    pub field: CellField,
    pub mass_old: f64,
    pub mass_new: f64,
    pub max_coverage_defect: f64,
}

/// Per-step diagnostics of a remap cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub mass_old: f64,
    pub mass_new: f64,
    pub max_coverage_defect: f64,
    pub field_min: f64,
    pub field_max: f64,
    pub degenerate_gradients: usize,
}

/// Unordered node-neighbour pairs `(a, b)` with `a < b`, in order of `a`.
pub fn neighbor_pairs(mesh: &Mesh) -> Vec<(usize, usize)> {
    let (ncx, ncy) = mesh.cell_dims();
    let mut pairs = Vec::with_capacity(4 * ncx * ncy);
    for cj in 0..ncy {
        for ci in 0..ncx {
            let a = cj * ncx + ci;
            if ci + 1 < ncx {
                pairs.push((a, a + 1));
            }
            if cj + 1 < ncy {
                if ci > 0 {
                    pairs.push((a, a + ncx - 1));
                }
                pairs.push((a, a + ncx));
                if ci + 1 < ncx {
                    pairs.push((a, a + ncx + 1));
                }
            }
        }
    }
    pairs
}

struct Exchange {
    flux: f64,
    /// `|c̃ ∩ c'|`
    new_a_in_old_b: f64,
    /// `|c̃' ∩ c|`
    new_b_in_old_a: f64,
}

/// Copy of `p` in coordinates relative to `origin`.
fn shifted(p: &Polygon, origin: Point) -> Polygon {
    Polygon::new(p.vertices().iter().map(|&v| v - origin).collect())
}

fn integrate_slope(poly: &Polygon, s: &CellSlope, origin: Point) -> f64 {
    integrate_affine(poly, s.mean, s.gradient, s.centroid - origin)
}

// Clipping runs in coordinates local to the pair so that rounding scales with
// the cell size rather than with the distance from the coordinate origin.
fn exchange(
    old: &MeshGeometry,
    new: &MeshGeometry,
    recon: &Reconstruction,
    a: usize,
    b: usize,
) -> Exchange {
    let origin = old.centroids()[a];
    let gain = clip_convex_unchecked(&shifted(new.polygon(a), origin), &shifted(old.polygon(b), origin));
    let loss = clip_convex_unchecked(&shifted(new.polygon(b), origin), &shifted(old.polygon(a), origin));
    Exchange {
        flux: integrate_slope(&gain, &recon.cells[b], origin) - integrate_slope(&loss, &recon.cells[a], origin),
        new_a_in_old_b: polygon_area(&gain),
        new_b_in_old_a: polygon_area(&loss),
    }
}

fn self_overlap(old: &MeshGeometry, new: &MeshGeometry, k: usize) -> f64 {
    let origin = old.centroids()[k];
    polygon_area(&clip_convex_unchecked(
        &shifted(new.polygon(k), origin),
        &shifted(old.polygon(k), origin),
    ))
}

/// Exchange integral `F(c, c')` between old cell `c` and its neighbour `c'`.
pub fn exchange_integral(
    old: &MeshGeometry,
    new: &MeshGeometry,
    recon: &Reconstruction,
    c: CellId,
    c_prime: CellId,
) -> f64 {
    let mesh = old.mesh();
    exchange(old, new, recon, mesh.cell_index(c), mesh.cell_index(c_prime)).flux
}

/// Remaps the reconstructed old field onto the new mesh.
pub fn remap_field(
    old: &MeshGeometry,
    new: &MeshGeometry,
    recon: &Reconstruction,
) -> Result<RemapResult, RemapError> {
    let (om, nm) = (old.mesh(), new.mesh());
    if om.cell_dims() != nm.cell_dims() {
        return Err(RemapError::ShapeMismatch {
            old: om.cell_dims(),
            new: nm.cell_dims(),
        });
    }
    let n = om.num_cells();
    let pairs = neighbor_pairs(om);
    let exchanges: Vec<Exchange> = pairs
        .par_iter()
        .map(|&(a, b)| exchange(old, new, recon, a, b))
        .collect();
    let self_overlap: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| self_overlap(old, new, k))
        .collect();

    let mut content: Vec<f64> = recon
        .cells
        .iter()
        .zip(old.volumes())
        .map(|(s, v)| s.mean * v)
        .collect();
    let mut covered = self_overlap;
    for (&(a, b), x) in pairs.iter().zip(&exchanges) {
        content[a] += x.flux;
        content[b] -= x.flux;
        covered[a] += x.new_a_in_old_b;
        covered[b] += x.new_b_in_old_a;
    }

    let mut max_defect: f64 = 0.0;
    for (k, (&v, &cov)) in new.volumes().iter().zip(&covered).enumerate() {
        let defect = (v - cov).abs() / v;
        if !(defect <= COVERAGE_TOL) {
            return Err(RemapError::LocalityViolated {
                step: None,
                cell: nm.cell_id(k),
                defect,
            });
        }
        max_defect = max_defect.max(defect);
    }

    let values: Vec<f64> = content.iter().zip(new.volumes()).map(|(m, v)| m / v).collect();
    let mass_old = neumaier(recon.cells.iter().zip(old.volumes()).map(|(s, v)| s.mean * v));
    let mass_new = neumaier(content.iter().copied());
    Ok(RemapResult {
        field: CellField::for_mesh(nm, values)?,
        mass_old,
        mass_new,
        max_coverage_defect: max_defect,
    })
}

/// Reconstruct, limit and remap across every consecutive pair of `meshes`.
///
/// `on_step` is called with the step index (1-based) and the field on
/// `meshes[step]` after each remap.
pub fn remap_cycle_with(
    meshes: &[Mesh],
    initial: CellField,
    config: &LimiterConfig,
    mut on_step: impl FnMut(usize, &CellField),
) -> Result<(CellField, Vec<StepReport>), RemapError> {
    let first = meshes.first().ok_or(RemapError::EmptySequence)?;
    initial.matches(first)?;
    let geometry = |step: usize| {
        MeshGeometry::new(meshes[step].clone()).map_err(|source| RemapError::Mesh { step, error: source })
    };
    let mut old = geometry(0)?;
    let mut field = initial;
    let mut reports = Vec::with_capacity(meshes.len().saturating_sub(1));
    for step in 1..meshes.len() {
        let new = geometry(step)?;
        let recon = reconstruct(&old, &field, config);
        let result = remap_field(&old, &new, &recon).map_err(|e| match e {
            RemapError::LocalityViolated { cell, defect, .. } => RemapError::LocalityViolated {
                step: Some(step),
                cell,
                defect,
            },
            other => other,
        })?;
        field = result.field;
        reports.push(StepReport {
            step,
            mass_old: result.mass_old,
            mass_new: result.mass_new,
            max_coverage_defect: result.max_coverage_defect,
            field_min: field.min(),
            field_max: field.max(),
            degenerate_gradients: recon.degenerate.len(),
        });
        on_step(step, &field);
        old = new;
    }
    Ok((field, reports))
}

pub fn remap_cycle(
    meshes: &[Mesh],
    initial: CellField,
    config: &LimiterConfig,
) -> Result<(CellField, Vec<StepReport>), RemapError> {
    remap_cycle_with(meshes, initial, config, |_, _| {})
}
