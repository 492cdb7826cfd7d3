//! Gauss-Legendre rules and a collapsed-coordinate rule on triangles, used to
//! initialise cell means of smooth fields.

use crate::geometry::{Point, Polygon};

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "need at least one quadrature point");
    let mut rule = Vec::with_capacity(n);
    for k in 0..n {
        // Newton on P_n starting from the Chebyshev-like guess.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((0.5 * (1.0 - x), 0.5 * w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature points and weights on a triangle. With `n` points per direction
/// the rule integrates polynomials up to degree `2n - 2` exactly.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// `(s, t, weight)` on the unit square, weight including the `s` Jacobian.
    points: Vec<(f64, f64, f64)>,
}

impl TriangleRule {
    pub fn new(n: usize) -> Self {
        let gl = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        for &(s, ws) in &gl {
            for &(t, wt) in &gl {
                points.push((s, t, ws * wt * s));
            }
        }
        Self { points }
    }

    /// Integral of `f` over the triangle `(a, b, c)` (orientation-independent).
    pub fn integrate(&self, a: Point, b: Point, c: Point, f: impl Fn(Point) -> f64) -> f64 {
        let twice_area = (b - a).cross(c - a).abs();
        let ab = b - a;
        let bc = c - b;
        let mut acc = 0.0;
        for &(s, t, w) in &self.points {
            let p = a + (ab + bc * t) * s;
            acc += w * f(p);
        }
        acc * twice_area
    }

    /// Integral over a convex polygon by fan triangulation from its first vertex.
    pub fn integrate_polygon(&self, poly: &Polygon, f: impl Fn(Point) -> f64) -> f64 {
        let v = poly.vertices();
        if v.len() < 3 {
            return 0.0;
        }
        (1..v.len() - 1)
            .map(|k| self.integrate(v[0], v[k], v[k + 1], &f))
            .sum()
    }
}
