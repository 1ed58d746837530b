//! Planar convex geometry on complex points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::C64;

/// Collinearity tolerance relative to the point-set diameter.
pub const COLLINEAR_TOL: f64 = 1e-10;

/// Convex polygon with counter-clockwise vertices. One vertex is a point,
/// two vertices a segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<C64>,
}

#[inline]
fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Smallest convex polygon containing `points` (Andrew's monotone chain).
///
/// Duplicates and points within `1e-10·diameter` of a hull edge are dropped,
/// as are differences at roundoff level relative to the coordinates.
pub fn convex_hull(points: &[C64]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::domain("convex hull of an empty point set"));
    }
    let mut pts: Vec<C64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let diameter = {
        let (lo, hi) = (pts[0], pts[pts.len() - 1]);
        let (mut min_im, mut max_im) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &pts {
            min_im = min_im.min(p.im);
            max_im = max_im.max(p.im);
        }
        (hi.re - lo.re).hypot(max_im - min_im)
    };
    // Clusters at roundoff scale are a single point.
    let roundoff = 8.0 * f64::EPSILON * pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if diameter <= roundoff {
        return Ok(ConvexPolygon { vertices: vec![pts[0]] });
    }
    let tol = (COLLINEAR_TOL * diameter).max(roundoff);
    pts.dedup_by(|a, b| (*a - *b).norm() <= tol);

    // A turn counts as convex only if the middle point sits more than `tol`
    // off the chord.
    let keeps_left = |o: C64, a: C64, b: C64| {
        let base = (b - o).norm();
        base > 0.0 && cross(o, a, b) > tol * base
    };
    let mut lower: Vec<C64> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && !keeps_left(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<C64> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !keeps_left(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let mut vertices = lower;
    vertices.dedup_by(|a, b| (*a - *b).norm() <= tol);
    if vertices.len() > 1 && (vertices[0] - vertices[vertices.len() - 1]).norm() <= tol {
        vertices.pop();
    }
    Ok(ConvexPolygon { vertices })
}

impl ConvexPolygon {
    pub fn point(z: C64) -> Self {
        ConvexPolygon { vertices: vec![z] }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive vertex pairs, closing the loop. A point yields one
    /// degenerate edge, a segment yields it twice.
    pub fn edges(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let o = self.vertices[0];
        (1..n - 1)
            .map(|k| cross(o, self.vertices[k], self.vertices[k + 1]))
            .sum::<f64>()
            * 0.5
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Support function `h(θ) = max Re(e^{−iθ} v)` over the vertices.
    pub fn support(&self, theta: f64) -> f64 {
        let dir = C64::from_polar(1.0, -theta);
        self.vertices
            .iter()
            .map(|v| (dir * v).re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_modulus(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Euclidean distance from `z` to the polygon (zero inside).
    pub fn distance(&self, z: C64) -> f64 {
        if self.contains(z, 0.0) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(z, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// `true` when `z` lies inside or within `tol` of the boundary.
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 | 2 => {
                let (a, b) = (self.vertices[0], self.vertices[self.vertices.len() - 1]);
                point_segment_distance(z, a, b) <= tol
            }
            _ => self.edges().all(|(a, b)| {
                let len = (b - a).norm();
                cross(a, b, z) >= -tol * len
            }),
        }
    }

    /// `max` signed distance by which `z` violates an edge half-plane.
    /// Negative inside. Meaningful for polygons with ≥ 3 vertices.
    pub fn max_violation(&self, z: C64) -> f64 {
        self.edges()
            .filter_map(|(a, b)| {
                let len = (b - a).norm();
                (len > 0.0).then(|| -cross(a, b, z) / len)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn translate_scale(&self, alpha: C64, beta: C64) -> Result<ConvexPolygon> {
        let pts: Vec<C64> = self.vertices.iter().map(|v| alpha * v + beta).collect();
        convex_hull(&pts)
    }
}

/// Hausdorff distance between two convex polygons.
///
/// For convex sets the distance to the other set is a convex function, so
/// the supremum over each polygon is attained at one of its vertices.
pub fn hausdorff(pa: &ConvexPolygon, pb: &ConvexPolygon) -> Result<f64> {
    if pa.is_empty() || pb.is_empty() {
        return Err(Error::domain("Hausdorff distance of an empty polygon"));
    }
    let ab = pa.vertices.iter().map(|&v| pb.distance(v)).fold(0.0, f64::max);
    let ba = pb.vertices.iter().map(|&v| pa.distance(v)).fold(0.0, f64::max);
    Ok(ab.max(ba))
}

/// Hausdorff distance between a convex polygon and the closed disk
/// `|z − center| ≤ radius`, through `sup_θ |h_P(θ) − h_D(θ)|`.
///
/// `h_P − h_D` is maximised at vertex directions and minimised at edge
/// normals, so both are enumerated exactly.
pub fn hausdorff_to_disk(p: &ConvexPolygon, center: C64, radius: f64) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::domain("Hausdorff distance of an empty polygon"));
    }
    let outward = p
        .vertices
        .iter()
        .map(|v| (v - center).norm() - radius)
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = ConvexPolygon {
        vertices: p.vertices.iter().map(|v| v - center).collect(),
    };
    // Candidate minimisers of h_P: edge normals (where the supporting vertex
    // switches) and directions pointing away from each vertex.
    let mut directions: Vec<f64> = Vec::new();
    for (a, b) in shifted.edges() {
        let e = b - a;
        if e.norm() > 0.0 {
            directions.push((e * C64::new(0.0, -1.0)).arg());
            directions.push((e * C64::new(0.0, 1.0)).arg());
        }
    }
    for v in &shifted.vertices {
        directions.push(v.arg() + std::f64::consts::PI);
    }
    let inward = directions
        .into_iter()
        .map(|theta| radius - shifted.support(theta))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(outward.max(inward).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn triangle_from_three_vertices() {
        let pts = [c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0), c(0.0, 0.0)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 3);
        for v in &pts[..3] {
            assert!(hull.vertices.contains(v));
        }
        assert!(hull.area() > 0.0);
        assert!((hull.area() - 4.5).abs() < 1e-14);
    }

    #[test]
    fn degenerate_hulls() {
        let p = convex_hull(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(p.vertices, vec![c(1.0, 0.0)]);
        let p = convex_hull(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(p.len(), 1);
        let seg = convex_hull(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(seg.len(), 2);
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn square_shift_hausdorff() {
        let sq = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        let a = convex_hull(&sq).unwrap();
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let delta = 0.37;
        let b = convex_hull(&sq.map(|z| z + delta)).unwrap();
        assert!((hausdorff(&a, &b).unwrap() - delta).abs() < 1e-15);
    }

    #[test]
    fn disk_distance() {
        let sq = convex_hull(&[c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0), c(1.0, -1.0)]).unwrap();
        let d = hausdorff_to_disk(&sq, c(0.0, 0.0), 1.0).unwrap();
        assert!((d - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let pt = ConvexPolygon::point(c(0.0, 0.0));
        assert!((hausdorff_to_disk(&pt, c(0.0, 0.0), 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn contains_and_distance() {
        let tri = convex_hull(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]).unwrap();
        assert!(tri.contains(c(0.0, 0.0), 0.0));
        assert!(!tri.contains(c(3.0, 0.0), 1e-9));
        assert!((tri.distance(c(0.0, -2.0)) - 1.0).abs() < 1e-15);
        assert!(tri.max_violation(c(0.0, 0.0)) < 0.0);
    }
}
