use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::Point2;
use crate::{Error, Result};

/// A strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

/// Supporting line of one polygon edge, `normal . q <= offset` inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLine {
    pub normal: Point2,
    pub offset: f64,
}

impl EdgeLine {
    /// Positive outside, negative inside.
    #[inline]
    pub fn signed_distance(&self, q: Point2) -> f64 {
        self.normal.dot(q) - self.offset
    }
}

impl ConvexPolygon {
    /// Validates and stores the vertices. Clockwise input is reversed; any
    /// reflex or collinear corner is rejected.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::NotConvex("fewer than 3 vertices"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite polygon vertex"));
        }
        let n = vertices.len();
        let turns: Vec<f64> = (0..n)
            .map(|k| {
                let a = vertices[k];
                let b = vertices[(k + 1) % n];
                let c = vertices[(k + 2) % n];
                (b - a).cross(c - b)
            })
            .collect();
        let mut vertices = vertices;
        if turns.iter().all(|&t| t < 0.0) {
            vertices.reverse();
        } else if !turns.iter().all(|&t| t > 0.0) {
            return Err(Error::NotConvex("consecutive edges must turn strictly left"));
        }
        // A star polygon turns left at every corner yet winds twice.
        let winding: f64 = (0..n)
            .map(|k| {
                let a = vertices[(k + n - 1) % n];
                let b = vertices[k];
                let c = vertices[(k + 1) % n];
                (b - a).cross(c - b).atan2((b - a).dot(c - b))
            })
            .sum();
        if (winding - core::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::NotConvex("boundary winds more than once"));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(alloc::vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` pairs, counter-clockwise.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn edge_lines(&self) -> impl Iterator<Item = EdgeLine> + '_ {
        self.edges().map(|(a, b)| {
            let normal = (b - a).perp_cw().normalized();
            EdgeLine { normal, offset: normal.dot(a) }
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn centroid(&self) -> Point2 {
        let mut acc = Point2::ZERO;
        let mut area2 = 0.0;
        for (a, b) in self.edges() {
            let w = a.cross(b);
            acc += (a + b) * w;
            area2 += w;
        }
        acc / (3.0 * area2)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (k, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[k + 1..] {
                best = best.max(a.distance(*b));
            }
        }
        best
    }

    /// Largest signed distance of `q` to the edge lines: negative strictly
    /// inside, zero on the boundary.
    pub fn max_edge_distance(&self, q: Point2) -> f64 {
        self.edge_lines()
            .map(|l| l.signed_distance(q))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, q: Point2, slack: f64) -> bool {
        self.max_edge_distance(q) <= slack
    }

    /// Euclidean distance from `q` to the polygon boundary (zero on it).
    pub fn boundary_distance(&self, q: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(q, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closest point of the (closed) polygon to `q`.
    pub fn project(&self, q: Point2) -> Point2 {
        if self.max_edge_distance(q) <= 0.0 {
            return q;
        }
        let mut best = q;
        let mut best_d = f64::INFINITY;
        for (a, b) in self.edges() {
            let p = closest_on_segment(q, a, b);
            let d = p.distance(q);
            if d < best_d {
                best_d = d;
                best = p;
            }
        }
        best
    }

    /// The Minkowski difference of the polygon with a disk of radius `r`:
    /// all centers `q` such that the disk around `q` stays inside.
    ///
    /// For a convex polygon this is the intersection of the inward-offset
    /// edge half-planes.
    pub fn minkowski_erode(&self, r: f64) -> Result<ConvexPolygon> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter("erosion radius must be finite and >= 0"));
        }
        if r == 0.0 {
            return Ok(self.clone());
        }
        let scale = self.diameter().max(1.0);
        let mut pts = self.vertices.clone();
        for line in self.edge_lines().collect::<Vec<_>>() {
            pts = clip_halfplane(&pts, line.normal, line.offset - r);
            if pts.len() < 3 {
                return Err(Error::EmptyErosion { radius: r });
            }
        }
        dedup_ring(&mut pts, 1e-12 * scale);
        let eroded = ConvexPolygon::new(pts).map_err(|_| Error::EmptyErosion { radius: r })?;
        if eroded.area() <= 1e-18 * scale * scale {
            return Err(Error::EmptyErosion { radius: r });
        }
        Ok(eroded)
    }
}

/// Sutherland-Hodgman step against `normal . q <= offset`.
fn clip_halfplane(poly: &[Point2], normal: Point2, offset: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        let da = normal.dot(a) - offset;
        let db = normal.dot(b) - offset;
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let s = da / (da - db);
            out.push(a.lerp(b, s));
        }
    }
    out
}

fn dedup_ring(pts: &mut Vec<Point2>, tol: f64) {
    pts.dedup_by(|b, a| a.distance(*b) <= tol);
    while pts.len() > 1 && pts[0].distance(pts[pts.len() - 1]) <= tol {
        pts.pop();
    }
}

pub(crate) fn closest_on_segment(q: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a;
    }
    let s = ((q - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * s
}

pub(crate) fn segment_distance(q: Point2, a: Point2, b: Point2) -> f64 {
    closest_on_segment(q, a, b).distance(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square(side: f64) -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, side, side).unwrap()
    }

    #[test]
    fn rejects_nonconvex_and_degenerate() {
        let dart = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 1.0),
            Point2::new(4.0, 0.0),
            Point2::new(2.0, 3.0),
        ];
        assert!(matches!(ConvexPolygon::new(dart), Err(Error::NotConvex(_))));
        let collinear = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)];
        assert!(ConvexPolygon::new(collinear).is_err());
        assert!(ConvexPolygon::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let cw = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        let p = ConvexPolygon::new(cw).unwrap();
        assert!((p.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_pentagram() {
        let star: Vec<Point2> = (0..5)
            .map(|k| Point2::from_angle(core::f64::consts::TAU * (2 * k) as f64 / 5.0))
            .collect();
        assert!(ConvexPolygon::new(star).is_err());
    }

    #[test]
    fn erode_square_by_one() {
        let e = square(10.0).minkowski_erode(1.0).unwrap();
        assert_eq!(e.len(), 4);
        for v in e.vertices() {
            assert!((v.x - 1.0).abs() < 1e-12 || (v.x - 9.0).abs() < 1e-12);
            assert!((v.y - 1.0).abs() < 1e-12 || (v.y - 9.0).abs() < 1e-12);
        }
        assert!((e.area() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn erode_zero_is_identity() {
        let sq = square(10.0);
        assert_eq!(sq.minkowski_erode(0.0).unwrap(), sq);
    }

    #[test]
    fn erode_too_far_is_empty() {
        assert!(matches!(square(10.0).minkowski_erode(6.0), Err(Error::EmptyErosion { .. })));
        assert!(matches!(square(10.0).minkowski_erode(5.0), Err(Error::EmptyErosion { .. })));
    }

    #[test]
    fn eroded_vertices_keep_clearance() {
        let hex: Vec<Point2> = (0..6)
            .map(|k| Point2::new(3.0, 2.0) + Point2::from_angle(0.3 + k as f64 * 1.0471975511965976) * 4.0)
            .collect();
        let poly = ConvexPolygon::new(hex).unwrap();
        let e = poly.minkowski_erode(0.75).unwrap();
        for v in e.vertices() {
            for line in poly.edge_lines() {
                assert!(-line.signed_distance(*v) >= 0.75 - 1e-9);
            }
        }
    }

    #[test]
    fn projection_lands_on_boundary() {
        let sq = square(1.0);
        assert_eq!(sq.project(Point2::new(0.5, 0.5)), Point2::new(0.5, 0.5));
        assert_eq!(sq.project(Point2::new(0.5, -1.0)), Point2::new(0.5, 0.0));
        assert_eq!(sq.project(Point2::new(2.0, 2.0)), Point2::new(1.0, 1.0));
    }
}
