//! Conservative second-order remapping on logically structured quadrilateral
//! meshes.
//!
//! Cell means are moved from an old mesh to a nearby new mesh by exact
//! polygon intersection of each new cell with the node neighbourhood of its
//! old counterpart, integrating a limited piecewise-linear reconstruction over
//! the pieces. Besides the unlimited and Barth-Jespersen reconstructions, the
//! crate implements a self-adjusting steepness (SAS) limiter: a
//! steepness-adjustable harmonic limiter whose per-cell steepness is chosen
//! from WENO-style smoothness weights, so smooth regions stay second order
//! while discontinuities are steepened instead of smeared.
//!
//! The `run` module drives complete experiments (mesh series, initial field,
//! repeated remap, verification report) and backs the `sasremap` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod fields;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod meshgen;
pub mod quadrature;
pub mod reconstruct;
pub mod remap;
pub mod run;
pub mod sum;

pub use config::{parse_config, RunConfig};
pub use fields::{init_means, interface_width, norms, CellField, FieldSpec, RemapReport};
pub use geometry::{clip_convex, integrate_affine, polygon_area, polygon_centroid, Point, Polygon};
pub use mesh::{CellId, Mesh, MeshGeometry};
pub use meshgen::{mesh_series, MeshSeriesSpec, SeriesKind};
pub use reconstruct::{reconstruct, LimiterConfig, LimiterKind, Reconstruction};
pub use remap::{remap_cycle, remap_field, RemapResult};
