//! Logically structured quadrilateral mesh for a single time level.
//!
//! Nodes are indexed `(i, j)` with `0 <= i < nx`, `0 <= j < ny`, stored with
//! `i` varying fastest. Cell `(ci, cj)` has corners `(ci, cj)`, `(ci+1, cj)`,
//! `(ci+1, cj+1)`, `(ci, cj+1)` in counter-clockwise order. All indices are
//! zero-based in memory; the CSV format uses one-based indices.

use std::fmt;

use thiserror::Error;

use crate::geometry::{polygon_area, polygon_centroid, GeometryError, Point, Polygon};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh needs at least 2x2 nodes, got {nx}x{ny}")]
    TooSmall { nx: usize, ny: usize },
    #[error("expected {expected} node coordinates, got {got}")]
    CoordCount { expected: usize, got: usize },
    #[error("cell {cell} out of range for a {ncx}x{ncy}-cell mesh")]
    OutOfRange { cell: CellId, ncx: usize, ncy: usize },
    #[error("cell {cell}: {error}")]
    DegenerateCell { cell: CellId, error: GeometryError },
    #[error("invalid mesh: {count} bad cell(s), first {first}; min area {min_area:e}, min convexity {min_cross:e}")]
    Invalid {
        count: usize,
        first: CellId,
        min_area: f64,
        min_cross: f64,
    },
}

/// Cell index pair, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub ci: usize,
    pub cj: usize,
}

impl CellId {
    pub const fn new(ci: usize, cj: usize) -> Self {
        Self { ci, cj }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ci, self.cj)
    }
}

/// Cell edges in the fixed order south, east, north, west.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    South,
    East,
    North,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::South, Side::East, Side::North, Side::West];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub side: Side,
    /// Cell across this edge, `None` on the domain boundary.
    pub neighbor: Option<CellId>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    coords: Vec<Point>,
}

impl Mesh {
    pub fn new(nx: usize, ny: usize, coords: Vec<Point>) -> Result<Self, MeshError> {
        if nx < 2 || ny < 2 {
            return Err(MeshError::TooSmall { nx, ny });
        }
        if coords.len() != nx * ny {
            return Err(MeshError::CoordCount {
                expected: nx * ny,
                got: coords.len(),
            });
        }
        Ok(Self { nx, ny, coords })
    }

    /// Uniform mesh on `[0, 1]^2`.
    pub fn uniform(nx: usize, ny: usize) -> Result<Self, MeshError> {
        Self::from_fn(nx, ny, |i, j| {
            Point::new(i as f64 / (nx - 1) as f64, j as f64 / (ny - 1) as f64)
        })
    }

    pub fn from_fn(
        nx: usize,
        ny: usize,
        mut f: impl FnMut(usize, usize) -> Point,
    ) -> Result<Self, MeshError> {
        if nx < 2 || ny < 2 {
            return Err(MeshError::TooSmall { nx, ny });
        }
        let coords = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self::new(nx, ny, coords)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Cells along i and along j.
    pub fn cell_dims(&self) -> (usize, usize) {
        (self.nx - 1, self.ny - 1)
    }

    pub fn num_cells(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        self.coords[j * self.nx + i]
    }

    pub(crate) fn node_mut(&mut self, i: usize, j: usize) -> &mut Point {
        &mut self.coords[j * self.nx + i]
    }

    #[inline]
    pub fn cell_index(&self, c: CellId) -> usize {
        c.cj * (self.nx - 1) + c.ci
    }

    #[inline]
    pub fn cell_id(&self, index: usize) -> CellId {
        CellId::new(index % (self.nx - 1), index / (self.nx - 1))
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.num_cells()).map(|k| self.cell_id(k))
    }

    pub fn contains(&self, c: CellId) -> bool {
        c.ci + 1 < self.nx && c.cj + 1 < self.ny
    }

    fn check(&self, c: CellId) -> Result<(), MeshError> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(MeshError::OutOfRange {
                cell: c,
                ncx: self.nx - 1,
                ncy: self.ny - 1,
            })
        }
    }

    /// Corner nodes of a cell, counter-clockwise from `(ci, cj)`.
    #[inline]
    pub fn cell_corners(&self, c: CellId) -> [Point; 4] {
        [
            self.node(c.ci, c.cj),
            self.node(c.ci + 1, c.cj),
            self.node(c.ci + 1, c.cj + 1),
            self.node(c.ci, c.cj + 1),
        ]
    }

    pub fn cell_polygon(&self, c: CellId) -> Result<Polygon, MeshError> {
        self.check(c)?;
        Ok(Polygon::new(self.cell_corners(c).to_vec()))
    }

    /// Volume (area) and centroid of a cell.
    pub fn cell_volume_centroid(&self, c: CellId) -> Result<(f64, Point), MeshError> {
        let poly = self.cell_polygon(c)?;
        let centroid =
            polygon_centroid(&poly).map_err(|source| MeshError::DegenerateCell { cell: c, error: source })?;
        Ok((polygon_area(&poly), centroid))
    }

    /// Cells sharing at least one node with `c`, excluding `c`, in row-major
    /// order.
    pub fn node_neighborhood(&self, c: CellId) -> Vec<CellId> {
        let (ncx, ncy) = self.cell_dims();
        let mut out = Vec::with_capacity(8);
        for cj in c.cj.saturating_sub(1)..=(c.cj + 1).min(ncy - 1) {
            for ci in c.ci.saturating_sub(1)..=(c.ci + 1).min(ncx - 1) {
                if (ci, cj) != (c.ci, c.cj) {
                    out.push(CellId::new(ci, cj));
                }
            }
        }
        out
    }

    /// Per-edge records in south, east, north, west order.
    pub fn edge_neighbors(&self, c: CellId) -> [EdgeRecord; 4] {
        let (ncx, ncy) = self.cell_dims();
        let [p0, p1, p2, p3] = self.cell_corners(c);
        let across = |side| match side {
            Side::South => (c.cj > 0).then(|| CellId::new(c.ci, c.cj - 1)),
            Side::East => (c.ci + 1 < ncx).then(|| CellId::new(c.ci + 1, c.cj)),
            Side::North => (c.cj + 1 < ncy).then(|| CellId::new(c.ci, c.cj + 1)),
            Side::West => (c.ci > 0).then(|| CellId::new(c.ci - 1, c.cj)),
        };
        let lengths = [p0.distance(p1), p1.distance(p2), p2.distance(p3), p3.distance(p0)];
        Side::ALL.map(|side| EdgeRecord {
            side,
            neighbor: across(side),
            length: lengths[side as usize],
        })
    }

    /// Checks positivity and convexity of every cell.
    pub fn validate(&self) -> MeshDiagnostics {
        let mut diag = MeshDiagnostics {
            min_area: f64::INFINITY,
            min_cross: f64::INFINITY,
            offending: Vec::new(),
        };
        for c in self.cells() {
            let poly = Polygon::new(self.cell_corners(c).to_vec());
            let area = polygon_area(&poly);
            let (cross, scale) = poly.convexity();
            diag.min_area = diag.min_area.min(area);
            diag.min_cross = diag.min_cross.min(cross);
            if !(area > 0.0) || cross < -crate::geometry::CONVEX_TOL * scale {
                diag.offending.push(c);
            }
        }
        diag
    }

    /// Total area of all cells.
    pub fn total_area(&self) -> f64 {
        crate::sum::neumaier(
            self.cells()
                .map(|c| polygon_area(&Polygon::new(self.cell_corners(c).to_vec()))),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshDiagnostics {
    pub min_area: f64,
    pub min_cross: f64,
    pub offending: Vec<CellId>,
}

impl MeshDiagnostics {
    pub fn passed(&self) -> bool {
        self.offending.is_empty()
    }

    pub fn into_result(self) -> Result<(), MeshError> {
        match self.offending.first() {
            None => Ok(()),
            Some(&first) => Err(MeshError::Invalid {
                count: self.offending.len(),
                first,
                min_area: self.min_area,
                min_cross: self.min_cross,
            }),
        }
    }
}

/// Cached per-cell polygons, volumes and centroids of a valid mesh.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    mesh: Mesh,
    polygons: Vec<Polygon>,
    volumes: Vec<f64>,
    centroids: Vec<Point>,
}

impl MeshGeometry {
    pub fn new(mesh: Mesh) -> Result<Self, MeshError> {
        let n = mesh.num_cells();
        let mut polygons = Vec::with_capacity(n);
        let mut volumes = Vec::with_capacity(n);
        let mut centroids = Vec::with_capacity(n);
        for c in mesh.cells() {
            let (v, r) = mesh.cell_volume_centroid(c)?;
            polygons.push(Polygon::new(mesh.cell_corners(c).to_vec()));
            volumes.push(v);
            centroids.push(r);
        }
        Ok(Self {
            mesh,
            polygons,
            volumes,
            centroids,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn into_mesh(self) -> Mesh {
        self.mesh
    }

    pub fn polygon(&self, k: usize) -> &Polygon {
        &self.polygons[k]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn centroids(&self) -> &[Point] {
        &self.centroids
    }
}
