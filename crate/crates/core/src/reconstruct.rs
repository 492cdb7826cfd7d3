//! Piecewise-linear reconstruction with monoslope limiting.
//!
//! Each cell carries one gradient, obtained by least squares over the node
//! neighbourhood and then scaled by a single factor `Φ_c`. Three limiters are
//! available:
//!
//! * `None`: `Φ_c = 1`.
//! * `BarthJespersen`: `Φ_c = min_n min(1, 2 φ_n)`.
//! * `Sas`: `Φ_c = min_n Φ(φ_n; β_c)` with `Φ(φ; β) = (φ + |φ|) / (1/β + φ)`,
//!   where the per-cell steepness `β_c` blends `beta_smooth` and `beta_steep`
//!   through a smoothness score `η_c` built from WENO-style edge weights.
//!
//! `φ_n` is the half-ratio of the admissible increment to the unlimited
//! increment at node `n`, so `2 φ_n` is the classic Barth-Jespersen ratio.

use rayon::prelude::*;
use thiserror::Error;

use crate::fields::CellField;
use crate::geometry::Point;
use crate::mesh::{CellId, Mesh, MeshGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimiterKind {
    None,
    BarthJespersen,
    Sas,
}

impl LimiterKind {
    pub fn name(self) -> &'static str {
        match self {
            LimiterKind::None => "none",
            LimiterKind::BarthJespersen => "barth_jespersen",
            LimiterKind::Sas => "sas",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LimiterConfigError {
    #[error("beta_smooth must be positive, got {0}")]
    BetaSmooth(f64),
    #[error("beta_steep ({steep}) must be >= beta_smooth ({smooth})")]
    BetaOrder { smooth: f64, steep: f64 },
    #[error("p must be >= 1, got {0}")]
    Power(f64),
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub kind: LimiterKind,
    /// Steepness selected in smooth cells (`η = 1`).
    pub beta_smooth: f64,
    /// Steepness selected at discontinuities (`η = 0`).
    pub beta_steep: f64,
    /// Power applied to the smoothness indicators.
    pub p: f64,
    /// Regularisation of the closed-form smoothness score.
    pub epsilon: f64,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            kind: LimiterKind::Sas,
            beta_smooth: 1.0,
            beta_steep: 2.9,
            p: 2.0,
            epsilon: 1e-40,
        }
    }
}

impl LimiterConfig {
    pub fn with_kind(kind: LimiterKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn sas(beta_steep: f64) -> Self {
        Self {
            beta_steep,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LimiterConfigError> {
        if !(self.beta_smooth > 0.0) {
            return Err(LimiterConfigError::BetaSmooth(self.beta_smooth));
        }
        if !(self.beta_steep >= self.beta_smooth) {
            return Err(LimiterConfigError::BetaOrder {
                smooth: self.beta_smooth,
                steep: self.beta_steep,
            });
        }
        if !(self.p >= 1.0) {
            return Err(LimiterConfigError::Power(self.p));
        }
        if !(self.epsilon > 0.0) {
            return Err(LimiterConfigError::Epsilon(self.epsilon));
        }
        Ok(())
    }
}

/// Linear reconstruction of one cell: `f(r) = mean + gradient · (r - centroid)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSlope {
    pub mean: f64,
    pub gradient: Point,
    pub centroid: Point,
}

impl CellSlope {
    #[inline]
    pub fn eval(&self, r: Point) -> f64 {
        self.mean + self.gradient.dot(r - self.centroid)
    }
}

/// Reconstruction of every cell of a mesh, in cell-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub cells: Vec<CellSlope>,
    /// Cells whose least-squares system was rank deficient.
    pub degenerate: Vec<CellId>,
}

/// Least-squares gradient; `degenerate` is set when the normal system was
/// singular and the gradient was zeroed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsGradient {
    pub gradient: Point,
    pub degenerate: bool,
}

/// Relative determinant threshold of the 2x2 normal system.
const LS_RANK_TOL: f64 = 1e-12;

/// Unweighted least-squares gradient over the node neighbourhood centroids.
pub fn unlimited_gradient(geom: &MeshGeometry, field: &CellField, c: CellId) -> LsGradient {
    let mesh = geom.mesh();
    let k = mesh.cell_index(c);
    let rc = geom.centroids()[k];
    let fc = field.values()[k];
    let (mut sxx, mut sxy, mut syy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in mesh.node_neighborhood(c) {
        let kn = mesh.cell_index(n);
        let d = geom.centroids()[kn] - rc;
        let df = field.values()[kn] - fc;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
        bx += d.x * df;
        by += d.y * df;
    }
    let det = sxx * syy - sxy * sxy;
    let trace = sxx + syy;
    if !(det > LS_RANK_TOL * trace * trace) {
        return LsGradient {
            gradient: Point::default(),
            degenerate: true,
        };
    }
    LsGradient {
        gradient: Point::new((syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det),
        degenerate: false,
    }
}

/// Squared jump of the cell means across an edge.
#[inline]
pub fn smoothness_indicator(f_c: f64, f_neighbor: f64) -> f64 {
    let d = f_neighbor - f_c;
    d * d
}

/// Length-proportional weights `l_e / Σ l` of the four edges of `c`
/// (south, east, north, west).
pub fn linear_weights(mesh: &Mesh, c: CellId) -> [f64; 4] {
    let edges = mesh.edge_neighbors(c);
    let total: f64 = edges.iter().map(|e| e.length).sum();
    edges.map(|e| e.length / total)
}

/// Closed-form smoothness score of a cell from its edge lengths and
/// indicators. Only the edges passed in take part; weights are normalised
/// over them.
///
/// The score is `Π ω_e / Π D_e` written as
///
/// ```text
/// (2^E (Π IS^p)^(E-1) + ε) / ((2 Σ_e D_e Π_{s≠e} IS_s^p)^E + ε)
/// ```
///
/// `η` does not change when all indicators are scaled together, so they are
/// divided by their geometric mean first; then `Π IS^p = 1` and the products
/// can neither underflow nor be swamped by `ε`. All-zero indicators give
/// `ε / ε = 1`. If only some indicators vanish the weights collapse onto the
/// flat edges and the score is 0.
pub fn eta_from_edges(lengths: &[f64], indicators: &[f64], p: f64, epsilon: f64) -> f64 {
    debug_assert_eq!(lengths.len(), indicators.len());
    let count = lengths.len();
    if count < 2 {
        return 1.0;
    }
    let zeros = indicators.iter().filter(|&&s| s == 0.0).count();
    if zeros == count {
        return 1.0;
    }
    if zeros > 0 {
        return 0.0;
    }
    let total: f64 = lengths.iter().sum();
    let n = count as i32;
    let log_gm = indicators.iter().map(|s| s.ln()).sum::<f64>() / count as f64;
    // Π_{s≠e} IS_s^p = 1 / IS_e^p once the product is one.
    let weighted: f64 = lengths
        .iter()
        .zip(indicators)
        .map(|(&l, &s)| (l / total) * (p * (log_gm - s.ln())).exp())
        .sum();
    let eta = (2f64.powi(n) + epsilon) / ((2.0 * weighted).powi(n) + epsilon);
    if eta.is_nan() {
        return 0.0;
    }
    eta.clamp(0.0, 1.0)
}

/// Smoothness score `η_c ∈ [0, 1]`; boundary edges are left out.
pub fn eta(mesh: &Mesh, field: &CellField, c: CellId, config: &LimiterConfig) -> f64 {
    let f_c = field.get(c);
    let mut lengths = [0.0; 4];
    let mut indicators = [0.0; 4];
    let mut n = 0;
    for e in mesh.edge_neighbors(c) {
        if let Some(nb) = e.neighbor {
            lengths[n] = e.length;
            indicators[n] = smoothness_indicator(f_c, field.get(nb));
            n += 1;
        }
    }
    eta_from_edges(&lengths[..n], &indicators[..n], config.p, config.epsilon)
}

/// Per-cell steepness `β_c = η β_smooth + (1 - η) β_steep`.
#[inline]
pub fn steepness(eta: f64, config: &LimiterConfig) -> f64 {
    eta * config.beta_smooth + (1.0 - eta) * config.beta_steep
}

/// Admissible half-ratio at a node with unlimited value `f_n`.
#[inline]
pub fn node_ratio(f_c: f64, f_n: f64, f_min: f64, f_max: f64) -> f64 {
    let d = f_n - f_c;
    if d > 0.0 {
        (f_max - f_c) / (2.0 * d)
    } else if d < 0.0 {
        (f_min - f_c) / (2.0 * d)
    } else {
        1.0
    }
}

/// Steepness-adjustable harmonic limiter `(φ + |φ|) / (1/β + φ)`.
#[inline]
pub fn sas_phi(phi: f64, beta: f64) -> f64 {
    if phi <= 0.0 {
        return 0.0;
    }
    2.0 * phi / (1.0 / beta + phi)
}

/// Limited reconstruction of one cell.
pub fn limit_cell(
    geom: &MeshGeometry,
    field: &CellField,
    c: CellId,
    config: &LimiterConfig,
) -> (CellSlope, bool) {
    let mesh = geom.mesh();
    let k = mesh.cell_index(c);
    let f_c = field.values()[k];
    let centroid = geom.centroids()[k];
    let ls = unlimited_gradient(geom, field, c);
    let grad = ls.gradient;

    let factor = match config.kind {
        LimiterKind::None => 1.0,
        _ if grad == Point::default() => 1.0,
        kind => {
            let (mut f_min, mut f_max) = (f_c, f_c);
            for n in mesh.node_neighborhood(c) {
                let v = field.get(n);
                f_min = f_min.min(v);
                f_max = f_max.max(v);
            }
            let ratios = mesh
                .cell_corners(c)
                .map(|r_n| node_ratio(f_c, f_c + grad.dot(r_n - centroid), f_min, f_max));
            match kind {
                LimiterKind::BarthJespersen => ratios
                    .iter()
                    .map(|&phi| (2.0 * phi).min(1.0))
                    .fold(f64::INFINITY, f64::min),
                _ => {
                    let beta = steepness(eta(mesh, field, c, config), config);
                    ratios
                        .iter()
                        .map(|&phi| sas_phi(phi, beta))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    };
    (
        CellSlope {
            mean: f_c,
            gradient: grad * factor,
            centroid,
        },
        ls.degenerate,
    )
}

/// Limited reconstruction of all cells, computed in parallel.
pub fn reconstruct(geom: &MeshGeometry, field: &CellField, config: &LimiterConfig) -> Reconstruction {
    let mesh = geom.mesh();
    let results: Vec<(CellSlope, bool)> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|k| limit_cell(geom, field, mesh.cell_id(k), config))
        .collect();
    let degenerate = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.1)
        .map(|(k, _)| mesh.cell_id(k))
        .collect();
    Reconstruction {
        cells: results.into_iter().map(|r| r.0).collect(),
        degenerate,
    }
}
