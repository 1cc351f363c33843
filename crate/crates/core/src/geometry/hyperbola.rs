use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Disk, Point2};
use crate::{Error, Result};

/// Which of the two branches of the hyperbola with foci `focus_i`,
/// `focus_j` this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchSide {
    /// Branch nearer `focus_i`; bounds the cell of agent `i`.
    TowardI,
    /// Branch nearer `focus_j`; bounds the cell of agent `j`.
    TowardJ,
}

/// One of the two foci of a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Focus {
    I,
    J,
}

/// A hyperbola branch in parametric form
///
/// ```text
/// gamma(t) = R(theta) [s a cosh t, b sinh t]^T + (focus_i + focus_j) / 2
/// ```
///
/// with `s = -1` on the branch nearer `focus_i` and `s = +1` on the other.
/// Every point satisfies `| |q - f_far| - |q - f_near| | = 2a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolaBranch {
    pub focus_i: Point2,
    pub focus_j: Point2,
    /// Semi-major axis, half the distance-difference constant.
    pub a: f64,
    /// Semi-minor axis, `sqrt(c^2 - a^2)`.
    pub b: f64,
    /// Half the focal distance.
    pub c: f64,
    /// Direction of `focus_j - focus_i`.
    pub theta: f64,
    pub side: BranchSide,
}

/// Boundary of the set of points guaranteed closer to any position in `di`
/// than to any position in `dj`: the branch nearer `di.center` of the
/// hyperbola with foci at the centers and `2a = r_i + r_j`.
///
/// Zero radii give the perpendicular bisector.
pub fn hyperbola_branch(di: &Disk, dj: &Disk) -> Result<HyperbolaBranch> {
    let d = dj.center - di.center;
    let distance = d.norm();
    let radius_sum = di.radius + dj.radius;
    if !(radius_sum >= 0.0) {
        return Err(Error::InvalidParameter("negative disk radius"));
    }
    if !(distance > radius_sum) {
        return Err(Error::OverlappingDisks { distance, radius_sum });
    }
    let a = 0.5 * radius_sum;
    let c = 0.5 * distance;
    let b = ((c - a) * (c + a)).sqrt();
    Ok(HyperbolaBranch {
        focus_i: di.center,
        focus_j: dj.center,
        a,
        b,
        c,
        theta: d.angle(),
        side: BranchSide::TowardI,
    })
}

/// `n` points at uniformly spaced parameters in `[t_min, t_max]`.
pub fn sample_branch(h: &HyperbolaBranch, t_min: f64, t_max: f64, n: usize) -> Vec<Point2> {
    debug_assert!(n >= 2 && t_min < t_max);
    let step = (t_max - t_min) / (n - 1) as f64;
    (0..n)
        .map(|k| {
            let t = if k + 1 == n { t_max } else { t_min + step * k as f64 };
            h.point(t)
        })
        .collect()
}

impl HyperbolaBranch {
    /// `-1` for the branch nearer `focus_i`, `+1` otherwise.
    #[inline]
    pub fn sign(&self) -> f64 {
        match self.side {
            BranchSide::TowardI => -1.0,
            BranchSide::TowardJ => 1.0,
        }
    }

    #[inline]
    pub fn center(&self) -> Point2 {
        (self.focus_i + self.focus_j) * 0.5
    }

    /// The focus inside the convex region this branch bounds.
    pub fn owner(&self) -> Point2 {
        match self.side {
            BranchSide::TowardI => self.focus_i,
            BranchSide::TowardJ => self.focus_j,
        }
    }

    /// The focus on the far side of this branch.
    pub fn other(&self) -> Point2 {
        match self.side {
            BranchSide::TowardI => self.focus_j,
            BranchSide::TowardJ => self.focus_i,
        }
    }

    pub fn focus(&self, which: Focus) -> Point2 {
        match which {
            Focus::I => self.focus_i,
            Focus::J => self.focus_j,
        }
    }

    /// The companion branch of the same hyperbola.
    pub fn mirrored(&self) -> Self {
        let side = match self.side {
            BranchSide::TowardI => BranchSide::TowardJ,
            BranchSide::TowardJ => BranchSide::TowardI,
        };
        Self { side, ..*self }
    }

    /// Point in the canonical frame (foci on the x-axis, center at origin).
    #[inline]
    pub fn local_point(&self, t: f64) -> Point2 {
        Point2::new(self.sign() * self.a * t.cosh(), self.b * t.sinh())
    }

    #[inline]
    pub fn point(&self, t: f64) -> Point2 {
        self.local_point(t).rotate(self.theta) + self.center()
    }

    /// `d gamma / dt`.
    #[inline]
    pub fn derivative(&self, t: f64) -> Point2 {
        Point2::new(self.sign() * self.a * t.sinh(), self.b * t.cosh()).rotate(self.theta)
    }

    /// `d^2 gamma / dt^2`.
    #[inline]
    pub fn second_derivative(&self, t: f64) -> Point2 {
        self.local_point(t).rotate(self.theta)
    }

    pub fn vertex(&self) -> Point2 {
        self.point(0.0)
    }

    /// Parameter of the point of the branch sharing `q`'s coordinate along
    /// the minor axis. Exact for points on the branch.
    pub fn param_of(&self, q: Point2) -> f64 {
        let local = (q - self.center()).rotate(-self.theta);
        (local.y / self.b).asinh()
    }

    /// `|q - other| - |q - owner| - 2a`; zero on the branch.
    pub fn distance_difference_residual(&self, q: Point2) -> f64 {
        q.distance(self.other()) - q.distance(self.owner()) - 2.0 * self.a
    }

    /// Implicit function of the convex region bounded by this branch and
    /// containing its owner focus: `<= 0` inside, `> 0` outside.
    #[inline]
    pub fn signed_side(&self, q: Point2) -> f64 {
        q.distance(self.owner()) - q.distance(self.other()) + 2.0 * self.a
    }

    /// Direction of increasing `t` relative to a counter-clockwise walk
    /// around the owner's region: `+1` or `-1`.
    pub fn ccw_direction(&self) -> f64 {
        -self.sign()
    }

    /// Outward unit normal (pointing away from the owner's region) at `t`.
    ///
    /// In the canonical frame this is `(-s b cosh t, a sinh t)` normalized;
    /// it equals the negated unit curvature normal and stays defined in the
    /// straight (bisector) limit.
    pub fn outward_normal(&self, t: f64) -> Point2 {
        Point2::new(-self.sign() * self.b * t.cosh(), self.a * t.sinh())
            .normalized()
            .rotate(self.theta)
    }

    /// Arc length between two parameters, by composite Gauss-Legendre.
    pub fn arc_length(&self, t0: f64, t1: f64) -> f64 {
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let panels = (((hi - lo) * 8.0).ceil() as usize).clamp(1, 4096);
        super::quadrature::gauss_legendre(lo, hi, panels, |t| self.derivative(t).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> HyperbolaBranch {
        hyperbola_branch(
            &Disk::new(Point2::new(0.0, 0.0), 1.0),
            &Disk::new(Point2::new(4.0, 0.0), 1.0),
        )
        .unwrap()
    }

    #[test]
    fn vertex_of_symmetric_pair() {
        let h = pair();
        let v = h.vertex();
        assert!(v.distance(Point2::new(1.0, 0.0)) < 1e-15);
        // farthest point of D_i and nearest point of D_j are both 2 away
        assert!(((v.distance(h.focus_i) + 1.0) - 2.0).abs() < 1e-12);
        assert!(((v.distance(h.focus_j) - 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn max_min_distance_equality_along_branch() {
        let h = pair();
        for p in sample_branch(&h, -3.0, 3.0, 61) {
            let max_to_i = p.distance(h.focus_i) + 1.0;
            let min_to_j = p.distance(h.focus_j) - 1.0;
            assert!((max_to_i - min_to_j).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn zero_radii_give_bisector() {
        let h = hyperbola_branch(
            &Disk::new(Point2::new(0.0, 0.0), 0.0),
            &Disk::new(Point2::new(4.0, 0.0), 0.0),
        )
        .unwrap();
        for p in sample_branch(&h, -2.0, 2.0, 9) {
            assert!((p.x - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overlapping_and_tangent_disks_rejected() {
        let di = Disk::new(Point2::new(0.0, 0.0), 1.0);
        let overlap = hyperbola_branch(&di, &Disk::new(Point2::new(1.0, 0.0), 1.0));
        assert!(matches!(overlap, Err(Error::OverlappingDisks { .. })));
        let tangent = hyperbola_branch(&di, &Disk::new(Point2::new(2.0, 0.0), 1.0));
        assert!(matches!(tangent, Err(Error::OverlappingDisks { .. })));
    }

    #[test]
    fn two_samples_are_the_endpoints() {
        let h = pair();
        let pts = sample_branch(&h, -1.0, 2.0, 2);
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0], h.point(-1.0));
        assert_eq!(pts[1], h.point(2.0));
    }

    #[test]
    fn symmetric_range_is_mirror_symmetric_about_axis() {
        let h = pair();
        let pts = sample_branch(&h, -1.5, 1.5, 11);
        for k in 0..pts.len() {
            let (p, q) = (pts[k], pts[pts.len() - 1 - k]);
            assert!((p.x - q.x).abs() < 1e-12 && (p.y + q.y).abs() < 1e-12);
        }
    }

    #[test]
    fn param_of_inverts_point() {
        let h = hyperbola_branch(
            &Disk::new(Point2::new(1.0, -2.0), 0.3),
            &Disk::new(Point2::new(-2.0, 1.5), 0.5),
        )
        .unwrap();
        for &t in &[-2.0, -0.3, 0.0, 0.7, 2.5] {
            assert!((h.param_of(h.point(t)) - t).abs() < 1e-12);
            assert!((h.mirrored().param_of(h.mirrored().point(t)) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn mirrored_branch_is_reflection_across_bisector() {
        let h = pair();
        let m = h.mirrored();
        assert!(m.vertex().distance(Point2::new(3.0, 0.0)) < 1e-12);
        assert!((m.vertex().distance(h.vertex()) - 2.0).abs() < 1e-12);
        assert!(m.signed_side(h.focus_j) < 0.0 && h.signed_side(h.focus_i) < 0.0);
    }
}
