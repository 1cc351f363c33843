//! Delaunay adjacency of a point set.
//!
//! A sweep in lexicographic order builds an initial triangulation, then
//! Lawson flips make every interior edge locally Delaunay. The in-circle test
//! uses adaptive exact predicates; exact ties (four cocircular points) are
//! broken by simulation of simplicity: the lifted height of each point is
//! perturbed by an infinitesimal whose magnitude decreases with the point's
//! lexicographic rank, so the result is one consistent Delaunay
//! triangulation of the degenerate input.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use robust::{incircle, orient2d, Coord};

use crate::geometry::Point2;
use crate::{Error, Result};

const DUPLICATE_TOLERANCE: f64 = 1e-9;

#[inline]
fn coord(p: Point2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

struct Predicates<'a> {
    pts: &'a [Point2],
    rank: Vec<usize>,
}

impl Predicates<'_> {
    #[inline]
    fn orient(&self, a: usize, b: usize, c: usize) -> f64 {
        orient2d(coord(self.pts[a]), coord(self.pts[b]), coord(self.pts[c]))
    }

    /// Is `d` strictly inside the circumcircle of counter-clockwise `(a, b, c)`
    /// under the symbolic perturbation?
    fn in_circle(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let v = incircle(coord(self.pts[a]), coord(self.pts[b]), coord(self.pts[c]), coord(self.pts[d]));
        if v != 0.0 {
            return v > 0.0;
        }
        let mut order = [a, b, c, d];
        order.sort_by_key(|&k| self.rank[k]);
        for k in order {
            // Raising the lifted height of `d` pushes it outside; raising a
            // triangle vertex tilts the lifted plane by its barycentric weight at `d`.
            let coefficient = if k == d {
                return false;
            } else if k == a {
                self.orient(d, b, c)
            } else if k == b {
                self.orient(a, d, c)
            } else {
                self.orient(a, b, d)
            };
            if coefficient != 0.0 {
                return coefficient > 0.0;
            }
        }
        false
    }
}

fn lex_cmp(p: Point2, q: Point2) -> Ordering {
    p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
}

/// Delaunay adjacency lists, indexed like `points`.
///
/// Fewer than two points yield no edges. Collinear inputs yield the path
/// through the points in lexicographic order.
pub fn delaunay_neighbors(points: &[Point2]) -> Result<Vec<BTreeSet<usize>>> {
    let n = points.len();
    let mut adjacency = vec![BTreeSet::new(); n];
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("non-finite point"));
    }
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&i, &j| lex_cmp(points[i], points[j]).then(i.cmp(&j)));
    check_duplicates(points, &sorted)?;
    if n < 2 {
        return Ok(adjacency);
    }

    let mut rank = vec![0; n];
    for (r, &i) in sorted.iter().enumerate() {
        rank[i] = r;
    }
    let pred = Predicates { pts: points, rank };

    let Some(apex_pos) = (2..n).find(|&k| pred.orient(sorted[0], sorted[1], sorted[k]) != 0.0) else {
        for w in sorted.windows(2) {
            adjacency[w[0]].insert(w[1]);
            adjacency[w[1]].insert(w[0]);
        }
        return Ok(adjacency);
    };

    let mut tris = Triangulation::default();
    let chain = &sorted[..apex_pos];
    let apex = sorted[apex_pos];
    for w in chain.windows(2) {
        if pred.orient(w[0], w[1], apex) > 0.0 {
            tris.add([w[0], w[1], apex]);
        } else {
            tris.add([w[1], w[0], apex]);
        }
    }
    let mut hull: Vec<usize> = if pred.orient(chain[0], chain[chain.len() - 1], apex) > 0.0 {
        chain.iter().copied().chain(core::iter::once(apex)).collect()
    } else {
        core::iter::once(chain[0]).chain(core::iter::once(apex)).chain(chain[1..].iter().rev().copied()).collect()
    };

    for &p in &sorted[apex_pos + 1..] {
        let h = hull.len();
        let visible: Vec<bool> = (0..h).map(|e| pred.orient(hull[e], hull[(e + 1) % h], p) < 0.0).collect();
        let Some(start) = (0..h).find(|&e| visible[e] && !visible[(e + h - 1) % h]) else {
            // p is lexicographically last, hence outside the hull
            unreachable!("new point sees no hull edge");
        };
        let mut e = start;
        while visible[e] {
            tris.add([hull[(e + 1) % h], hull[e], p]);
            e = (e + 1) % h;
        }
        let end = e; // first vertex after the visible chain
        let mut next = Vec::with_capacity(h + 1);
        let mut k = end;
        loop {
            next.push(hull[k]);
            if k == start {
                break;
            }
            k = (k + 1) % h;
        }
        next.push(p);
        hull = next;
    }

    tris.make_delaunay(&pred);
    for t in tris.tris.iter().flatten() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
    }
    Ok(adjacency)
}

fn check_duplicates(points: &[Point2], sorted: &[usize]) -> Result<()> {
    for (k, &i) in sorted.iter().enumerate() {
        for &j in &sorted[k + 1..] {
            if points[j].x - points[i].x > DUPLICATE_TOLERANCE {
                break;
            }
            if points[i].distance(points[j]) <= DUPLICATE_TOLERANCE {
                return Err(Error::DuplicatePoints { first: i.min(j), second: i.max(j) });
            }
        }
    }
    Ok(())
}

#[derive(Default)]
struct Triangulation {
    tris: Vec<Option<[usize; 3]>>,
    /// Directed edge to the triangle that has it in counter-clockwise order.
    edges: BTreeMap<(usize, usize), usize>,
}

impl Triangulation {
    fn add(&mut self, t: [usize; 3]) {
        let id = self.tris.len();
        self.tris.push(Some(t));
        for k in 0..3 {
            self.edges.insert((t[k], t[(k + 1) % 3]), id);
        }
    }

    fn remove(&mut self, id: usize) {
        if let Some(t) = self.tris[id].take() {
            for k in 0..3 {
                self.edges.remove(&(t[k], t[(k + 1) % 3]));
            }
        }
    }

    fn opposite(&self, id: usize, a: usize, b: usize) -> usize {
        let t = self.tris[id].expect("live triangle");
        t.into_iter().find(|&v| v != a && v != b).expect("triangle has three vertices")
    }

    fn make_delaunay(&mut self, pred: &Predicates<'_>) {
        let mut stack: Vec<(usize, usize)> = self.edges.keys().copied().collect();
        while let Some((a, b)) = stack.pop() {
            let (Some(&t1), Some(&t2)) = (self.edges.get(&(a, b)), self.edges.get(&(b, a))) else {
                continue;
            };
            let c = self.opposite(t1, a, b);
            let d = self.opposite(t2, a, b);
            if !pred.in_circle(a, b, c, d) {
                continue;
            }
            self.remove(t1);
            self.remove(t2);
            self.add([a, d, c]);
            self.add([d, b, c]);
            stack.extend([(a, d), (d, b), (b, c), (c, a)]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&p| p.into()).collect()
    }

    fn edge_count(adj: &[BTreeSet<usize>]) -> usize {
        adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    #[test]
    fn two_points_are_mutual_neighbors() {
        let adj = delaunay_neighbors(&pts(&[(0.0, 0.0), (1.0, 2.0)])).unwrap();
        assert!(adj[0].contains(&1) && adj[1].contains(&0));
    }

    #[test]
    fn triangle_is_complete() {
        let adj = delaunay_neighbors(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.3, 2.0)])).unwrap();
        assert_eq!(edge_count(&adj), 3);
    }

    #[test]
    fn square_gets_exactly_one_diagonal() {
        let adj = delaunay_neighbors(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert_eq!(edge_count(&adj), 5);
        let d02 = adj[0].contains(&2);
        let d13 = adj[1].contains(&3);
        assert!(d02 ^ d13);
    }

    #[test]
    fn collinear_points_form_a_path() {
        let adj = delaunay_neighbors(&pts(&[(2.0, 2.0), (0.0, 0.0), (1.0, 1.0), (3.0, 3.0)])).unwrap();
        assert_eq!(edge_count(&adj), 3);
        assert_eq!(adj[1].iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(adj[2], [0, 1].into_iter().collect());
    }

    #[test]
    fn duplicates_rejected() {
        let err = delaunay_neighbors(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1e-12)])).unwrap_err();
        assert_eq!(err, Error::DuplicatePoints { first: 0, second: 2 });
    }

    #[test]
    fn regular_grid_is_a_triangulation() {
        let mut v = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                v.push((i as f64, j as f64));
            }
        }
        let adj = delaunay_neighbors(&pts(&v)).unwrap();
        // planar triangulation of 16 points with 12 on the hull: 3n - 3 - h edges
        assert_eq!(edge_count(&adj), 3 * 16 - 3 - 12);
    }
}
