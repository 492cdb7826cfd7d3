//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls the library's geometry or reconstruction code.

#![allow(dead_code)]

use rand::Rng;
use sasremap::Point;

pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Signed area by triangle fan from the origin.
pub fn area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Point inside a counter-clockwise convex polygon (boundary included).
pub fn inside(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    (0..n).all(|k| cross(poly[k], poly[(k + 1) % n], p) >= 0.0)
}

fn segment_intersection(p: Point, q: Point, a: Point, b: Point) -> Option<Point> {
    let r = Point::new(q.x - p.x, q.y - p.y);
    let s = Point::new(b.x - a.x, b.y - a.y);
    let denom = r.x * s.y - r.y * s.x;
    if denom.abs() < 1e-300 {
        return None;
    }
    let ap = Point::new(a.x - p.x, a.y - p.y);
    let t = (ap.x * s.y - ap.y * s.x) / denom;
    let u = (ap.x * r.y - ap.y * r.x) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(Point::new(p.x + t * r.x, p.y + t * r.y))
    } else {
        None
    }
}

/// Intersection of two counter-clockwise convex polygons: vertices of each
/// inside the other plus all edge crossings, ordered by angle about their mean.
pub fn intersect(a: &[Point], b: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    pts.extend(a.iter().copied().filter(|&p| inside(b, p)));
    pts.extend(b.iter().copied().filter(|&p| inside(a, p)));
    for i in 0..a.len() {
        for j in 0..b.len() {
            if let Some(p) = segment_intersection(a[i], a[(i + 1) % a.len()], b[j], b[(j + 1) % b.len()]) {
                pts.push(p);
            }
        }
    }
    if pts.len() < 3 {
        return Vec::new();
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    pts.sort_by(|p, q| {
        let ap = (p.y - cy).atan2(p.x - cx);
        let aq = (q.y - cy).atan2(q.x - cx);
        ap.partial_cmp(&aq).unwrap()
    });
    let scale = pts
        .iter()
        .map(|p| (p.x - cx).abs().max((p.y - cy).abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut out: Vec<Point> = Vec::new();
    for p in pts {
        let dup = out
            .iter()
            .any(|q| (p.x - q.x).abs() <= 1e-13 * scale && (p.y - q.y).abs() <= 1e-13 * scale);
        if !dup {
            out.push(p);
        }
    }
    if out.len() < 3 || area(&out).abs() <= 1e-15 * scale * scale {
        return Vec::new();
    }
    out
}

/// Integral of `f` over a convex polygon: fan triangles, each split into
/// `m * m` sub-triangles integrated with the three edge-midpoint rule.
pub fn integrate(poly: &[Point], m: usize, f: impl Fn(Point) -> f64) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 1..poly.len() - 1 {
        total += integrate_triangle(poly[0], poly[k], poly[k + 1], m, &f);
    }
    total
}

fn integrate_triangle(a: Point, b: Point, c: Point, m: usize, f: &impl Fn(Point) -> f64) -> f64 {
    let at = |i: usize, j: usize| {
        let (s, t) = (i as f64 / m as f64, j as f64 / m as f64);
        Point::new(
            a.x + s * (b.x - a.x) + t * (c.x - a.x),
            a.y + s * (b.y - a.y) + t * (c.y - a.y),
        )
    };
    let mid = |p: Point, q: Point| Point::new(0.5 * (p.x + q.x), 0.5 * (p.y + q.y));
    let tri = |p: Point, q: Point, r: Point| {
        let ar = 0.5 * cross(p, q, r);
        ar * (f(mid(p, q)) + f(mid(q, r)) + f(mid(r, p))) / 3.0
    };
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m - i {
            s += tri(at(i, j), at(i + 1, j), at(i, j + 1));
            if i + j + 1 < m {
                s += tri(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            }
        }
    }
    s
}

/// Random convex counter-clockwise quadrilateral around `center`.
pub fn random_convex_quad(rng: &mut impl Rng, center: Point, scale: f64) -> Vec<Point> {
    loop {
        let mut angles: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let quad: Vec<Point> = angles
            .iter()
            .map(|&t| {
                let r = scale * rng.gen_range(0.5..1.0);
                Point::new(center.x + r * t.cos(), center.y + r * t.sin())
            })
            .collect();
        let convex = (0..4).all(|k| cross(quad[k], quad[(k + 1) % 4], quad[(k + 2) % 4]) > 1e-3 * scale * scale);
        if convex {
            return quad;
        }
    }
}

/// Monte Carlo estimate of the area of `a ∩ b` with jittered stratified
/// samples over the bounding box of `a`. Returns the estimate and the
/// binomial standard deviation, which bounds the stratified one.
pub fn mc_intersection_area(a: &[Point], b: &[Point], side: usize, rng: &mut impl Rng) -> (f64, f64) {
    let (x0, x1) = a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    let (y0, y1) = a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
    let box_area = (x1 - x0) * (y1 - y0);
    let mut hits = 0usize;
    for i in 0..side {
        for j in 0..side {
            let p = Point::new(
                x0 + (x1 - x0) * (i as f64 + rng.gen::<f64>()) / side as f64,
                y0 + (y1 - y0) * (j as f64 + rng.gen::<f64>()) / side as f64,
            );
            if inside(a, p) && inside(b, p) {
                hits += 1;
            }
        }
    }
    let n = (side * side) as f64;
    let frac = hits as f64 / n;
    let sigma = box_area * (frac * (1.0 - frac) / n).sqrt();
    (box_area * frac, sigma)
}

/// Least-squares gradient from displacement/jump pairs by Gaussian
/// elimination with partial pivoting on the normal equations.
pub fn dense_ls_gradient(rows: &[(f64, f64, f64)]) -> (f64, f64) {
    let mut m = [[0.0f64; 3]; 2];
    for &(dx, dy, df) in rows {
        let r = [dx, dy];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += r[i] * r[j];
            }
            m[i][2] += r[i] * df;
        }
    }
    if m[1][0].abs() > m[0][0].abs() {
        m.swap(0, 1);
    }
    let factor = m[1][0] / m[0][0];
    let pivot = m[0];
    for (target, p) in m[1].iter_mut().zip(pivot) {
        *target -= factor * p;
    }
    let gy = m[1][2] / m[1][1];
    let gx = (m[0][2] - m[0][1] * gy) / m[0][0];
    (gx, gy)
}

/// Smoothness score from the normalised WENO weights
/// `ω_e = α_e / Σ α`, `α_e = D_e / IS_e^p`, as `Π ω_e / Π D_e`.
/// Requires strictly positive indicators.
pub fn eta_from_weights(lengths: &[f64], indicators: &[f64], p: f64) -> f64 {
    let total: f64 = lengths.iter().sum();
    let d: Vec<f64> = lengths.iter().map(|l| l / total).collect();
    let alpha: Vec<f64> = d.iter().zip(indicators).map(|(d, s)| d / s.powf(p)).collect();
    let sum: f64 = alpha.iter().sum();
    let mut eta = 1.0;
    for (a, d) in alpha.iter().zip(&d) {
        eta *= (a / sum) / d;
    }
    eta
}
