//! Planar geometry kernel: signed area, centroid, convex-convex clipping and
//! exact integration of an affine function over a convex polygon.
//!
//! Every polygon handled here is counter-clockwise. Clipping is successive
//! half-plane clipping of the subject against each edge of the (convex) clip
//! polygon, so the result of clipping two convex polygons is again convex.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate polygon: |area| = {area:e} is below {eps:e}")]
    Degenerate { area: f64, eps: f64 },
    #[error("{which} polygon is not convex (min edge cross product {cross:e})")]
    NotConvex { which: &'static str, cross: f64 },
}

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Ordered vertex list, counter-clockwise. An empty vertex list is the empty
/// polygon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_xy(points: &[(f64, f64)]) -> Self {
        Self::new(points.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Axis-aligned bounding box as (min corner, max corner).
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (
                Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }

    /// Iterator over directed edges `(v_k, v_{k+1})`, wrapping around.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Minimum cross product of consecutive edge vectors, together with the
    /// squared length of the longest edge (the local scale of that product).
    pub fn convexity(&self) -> (f64, f64) {
        let v = &self.vertices;
        let n = v.len();
        let mut min_cross = f64::INFINITY;
        let mut scale: f64 = 0.0;
        for k in 0..n {
            let e0 = v[(k + 1) % n] - v[k];
            let e1 = v[(k + 2) % n] - v[(k + 1) % n];
            min_cross = min_cross.min(e0.cross(e1));
            scale = scale.max(e0.dot(e0));
        }
        (min_cross, scale)
    }

    /// Convex and counter-clockwise up to `tol_rel` times the squared edge scale.
    pub fn is_convex(&self, tol_rel: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        let (min_cross, scale) = self.convexity();
        min_cross >= -tol_rel * scale
    }
}

/// Relative tolerance for convexity checks, applied to squared edge length.
pub const CONVEX_TOL: f64 = 1e-14;
/// Vertex deduplication distance relative to the bounding-box diagonal.
pub const POINT_EPS_REL: f64 = 1e-12;
/// Sliver threshold relative to the bounding-box area.
pub const AREA_EPS_REL: f64 = 1e-14;

/// Shoelace signed area; positive for counter-clockwise polygons.
pub fn polygon_area(p: &Polygon) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    // Shifting to the first vertex keeps the cancellation small for polygons
    // far from the origin.
    let o = p.vertices[0];
    let mut twice = 0.0;
    for (a, b) in p.edges() {
        twice += (a - o).cross(b - o);
    }
    0.5 * twice
}

/// Area and first moment about `origin`: returns `(A, ∫ (r - origin) dA)`.
fn area_and_moment(p: &Polygon, origin: Point) -> (f64, Point) {
    let mut twice_area = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for (a, b) in p.edges() {
        let a = a - origin;
        let b = b - origin;
        let w = a.cross(b);
        twice_area += w;
        mx += w * (a.x + b.x);
        my += w * (a.y + b.y);
    }
    (0.5 * twice_area, Point::new(mx / 6.0, my / 6.0))
}

fn area_eps(p: &Polygon) -> f64 {
    match p.bounding_box() {
        Some((lo, hi)) => AREA_EPS_REL * (hi.x - lo.x) * (hi.y - lo.y),
        None => 0.0,
    }
}

/// Area-weighted centroid.
pub fn polygon_centroid(p: &Polygon) -> Result<Point, GeometryError> {
    if p.is_empty() {
        return Err(GeometryError::Degenerate {
            area: 0.0,
            eps: 0.0,
        });
    }
    let origin = p.vertices[0];
    let (area, moment) = area_and_moment(p, origin);
    let eps = area_eps(p);
    if area.abs() <= eps || area == 0.0 {
        return Err(GeometryError::Degenerate { area, eps });
    }
    Ok(origin + moment * (1.0 / area))
}

/// Keeps the part of `poly` to the left of the directed line `a -> b`.
pub fn clip_halfplane(poly: &[Point], a: Point, b: Point) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let dir = b - a;
    let side = |p: Point| dir.cross(p - a);
    let mut s = poly[n - 1];
    let mut ds = side(s);
    for &e in poly {
        let de = side(e);
        match (ds >= 0.0, de >= 0.0) {
            (true, true) => out.push(e),
            (true, false) => out.push(intersect(s, e, ds, de)),
            (false, true) => {
                out.push(intersect(s, e, ds, de));
                out.push(e);
            }
            (false, false) => {}
        }
        s = e;
        ds = de;
    }
    out
}

#[inline]
fn intersect(s: Point, e: Point, ds: f64, de: f64) -> Point {
    let t = ds / (ds - de);
    s + (e - s) * t
}

/// Removes consecutive (cyclically) vertices closer than `eps`.
fn dedup(mut v: Vec<Point>, eps: f64) -> Vec<Point> {
    v.dedup_by(|b, a| a.distance(*b) <= eps);
    while v.len() > 1 && v[0].distance(v[v.len() - 1]) <= eps {
        v.pop();
    }
    v
}

/// Intersection of two convex counter-clockwise polygons.
///
/// The result is convex and counter-clockwise; pieces whose area is below
/// `AREA_EPS_REL` times the square of their own largest extent come back empty.
pub fn clip_convex(subject: &Polygon, clip: &Polygon) -> Result<Polygon, GeometryError> {
    for (which, p) in [("subject", subject), ("clip", clip)] {
        if !p.is_empty() && !p.is_convex(CONVEX_TOL) {
            return Err(GeometryError::NotConvex {
                which,
                cross: p.convexity().0,
            });
        }
    }
    Ok(clip_convex_unchecked(subject, clip))
}

/// `clip_convex` without the convexity check on the inputs.
pub(crate) fn clip_convex_unchecked(subject: &Polygon, clip: &Polygon) -> Polygon {
    if subject.is_empty() || clip.is_empty() {
        return Polygon::empty();
    }
    let (Some((slo, shi)), Some((clo, chi))) = (subject.bounding_box(), clip.bounding_box())
    else {
        return Polygon::empty();
    };
    if shi.x < clo.x || chi.x < slo.x || shi.y < clo.y || chi.y < slo.y {
        return Polygon::empty();
    }
    let lo = Point::new(slo.x.min(clo.x), slo.y.min(clo.y));
    let hi = Point::new(shi.x.max(chi.x), shi.y.max(chi.y));
    let extent = hi - lo;

    let mut current = subject.vertices.clone();
    for (a, b) in clip.edges() {
        current = clip_halfplane(&current, a, b);
        if current.len() < 3 {
            return Polygon::empty();
        }
    }
    let current = dedup(current, POINT_EPS_REL * extent.norm());
    if current.len() < 3 {
        return Polygon::empty();
    }
    let result = Polygon::new(current);
    // Slivers are judged against their own extent, so thin but genuine
    // overlaps survive and only collinear vertex noise is dropped.
    let (rlo, rhi) = result.bounding_box().expect("at least three vertices");
    let own = rhi - rlo;
    if polygon_area(&result) <= AREA_EPS_REL * own.x.max(own.y).powi(2) {
        return Polygon::empty();
    }
    result
}

/// Exact integral over `p` of `f_c + grad · (r - r_c)`.
pub fn integrate_affine(p: &Polygon, f_c: f64, grad: Point, r_c: Point) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    let (area, moment) = area_and_moment(p, r_c);
    f_c * area + grad.dot(moment)
}
