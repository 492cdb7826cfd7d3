//! Mesh sequences standing in for the rezone phase: an analytic tensor-product
//! deformation that returns to the uniform mesh at the final step, and a
//! randomly perturbed mesh that is relaxed by repeated smoothing.
//!
//! Boundary nodes are pinned to the unit square in both cases.
//!
//! Random meshes are seeded through `ChaCha8Rng::seed_from_u64(seed)`. Each
//! interior node, visited with `i` fastest (`j = 1..ny-2`, `i = 1..nx-2`),
//! draws two `u64`s, one for x then one for y; each is mapped to
//! `u = (bits >> 11) * 2^-53` and `δ = -0.25 + 0.5 u`. In re-randomising mode
//! every member of the series continues the same stream.

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::Point;
use crate::mesh::{Mesh, MeshError};

#[derive(Debug, Error)]
pub enum MeshgenError {
    #[error("invalid mesh series: {0}")]
    InvalidSpec(String),
    #[error("series member {index} (seed {seed}) is not a valid mesh: {error}")]
    InvalidMember {
        index: usize,
        seed: u64,
        error: MeshError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Tensor,
    RandomSmooth,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Tensor => "tensor",
            SeriesKind::RandomSmooth => "random_smooth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSeriesSpec {
    pub kind: SeriesKind,
    pub imax: usize,
    pub jmax: usize,
    /// Number of remap steps; the series has `nmax + 1` meshes.
    pub nmax: usize,
    /// Random perturbation amplitude in units of the cell size.
    pub gamma: f64,
    pub seed: u64,
    /// Draw a fresh random mesh for every member instead of smoothing.
    pub rerandomize: bool,
}

impl Default for MeshSeriesSpec {
    fn default() -> Self {
        Self {
            kind: SeriesKind::Tensor,
            imax: 33,
            jmax: 33,
            nmax: 160,
            gamma: 1.0,
            seed: 0,
            rerandomize: false,
        }
    }
}

impl MeshSeriesSpec {
    pub fn tensor(imax: usize, nmax: usize) -> Self {
        Self {
            kind: SeriesKind::Tensor,
            imax,
            jmax: imax,
            nmax,
            ..Self::default()
        }
    }

    pub fn random_smooth(imax: usize, nmax: usize, seed: u64) -> Self {
        Self {
            kind: SeriesKind::RandomSmooth,
            imax,
            jmax: imax,
            nmax,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), MeshgenError> {
        if self.imax < 3 || self.jmax < 3 {
            return Err(MeshgenError::InvalidSpec(format!(
                "imax and jmax must be >= 3, got {}x{}",
                self.imax, self.jmax
            )));
        }
        if self.nmax < 1 {
            return Err(MeshgenError::InvalidSpec("nmax must be >= 1".into()));
        }
        if !(self.gamma >= 0.0) {
            return Err(MeshgenError::InvalidSpec(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if self.kind == SeriesKind::RandomSmooth && !(self.gamma * 0.25 < 0.5) {
            return Err(MeshgenError::InvalidSpec(format!(
                "gamma * 0.25 must stay below 0.5, got gamma = {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Deformation amplitude `sin(4πt) / 2`.
pub fn theta(t: f64) -> f64 {
    0.5 * (4.0 * PI * t).sin()
}

/// Member `n` of the tensor-product series.
pub fn tensor_mesh(spec: &MeshSeriesSpec, n: usize) -> Mesh {
    let th = theta(n as f64 / spec.nmax as f64);
    let (nx, ny) = (spec.imax, spec.jmax);
    Mesh::from_fn(nx, ny, |i, j| {
        let xi = i as f64 / (nx - 1) as f64;
        let eta = j as f64 / (ny - 1) as f64;
        Point::new(
            (1.0 - th) * xi + th * xi * xi * xi,
            (1.0 - th) * eta + th * eta * eta,
        )
    })
    .expect("series dimensions are at least 3x3")
}

#[inline]
fn unit_draw(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn perturbed(spec: &MeshSeriesSpec, rng: &mut ChaCha8Rng) -> Mesh {
    let (nx, ny) = (spec.imax, spec.jmax);
    let hx = 1.0 / (nx - 1) as f64;
    let hy = 1.0 / (ny - 1) as f64;
    let mut mesh = Mesh::uniform(nx, ny).expect("series dimensions are at least 3x3");
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let dx = -0.25 + 0.5 * unit_draw(rng);
            let dy = -0.25 + 0.5 * unit_draw(rng);
            let p = mesh.node_mut(i, j);
            p.x += spec.gamma * dx * hx;
            p.y += spec.gamma * dy * hy;
        }
    }
    mesh
}

fn checked(mesh: Mesh, index: usize, seed: u64) -> Result<Mesh, MeshgenError> {
    mesh.validate()
        .into_result()
        .map_err(|source| MeshgenError::InvalidMember {
            index,
            seed,
            error: source,
        })?;
    Ok(mesh)
}

/// Uniform mesh with independently perturbed interior nodes.
pub fn random_mesh(spec: &MeshSeriesSpec) -> Result<Mesh, MeshgenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    checked(perturbed(spec, &mut rng), 0, spec.seed)
}

/// One Jacobi sweep of the weighted average
/// `((x[i-1,j] + 2x[i,j] + x[i+1,j]) + (x[i,j-1] + 2x[i,j] + x[i,j+1])) / 8`
/// over interior nodes.
pub fn smooth_mesh(mesh: &Mesh) -> Mesh {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let mut out = mesh.clone();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let c = mesh.node(i, j);
            let row = mesh.node(i - 1, j) + c * 2.0 + mesh.node(i + 1, j);
            let col = mesh.node(i, j - 1) + c * 2.0 + mesh.node(i, j + 1);
            *out.node_mut(i, j) = (row + col) * 0.125;
        }
    }
    out
}

/// All `nmax + 1` members of the series, each validated.
pub fn mesh_series(spec: &MeshSeriesSpec) -> Result<Vec<Mesh>, MeshgenError> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.nmax + 1);
    match spec.kind {
        SeriesKind::Tensor => {
            for n in 0..=spec.nmax {
                out.push(checked(tensor_mesh(spec, n), n, spec.seed)?);
            }
        }
        SeriesKind::RandomSmooth => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut current = checked(perturbed(spec, &mut rng), 0, spec.seed)?;
            for n in 1..=spec.nmax {
                let next = if spec.rerandomize {
                    perturbed(spec, &mut rng)
                } else {
                    smooth_mesh(&current)
                };
                out.push(std::mem::replace(&mut current, checked(next, n, spec.seed)?));
            }
            out.push(current);
        }
    }
    Ok(out)
}
