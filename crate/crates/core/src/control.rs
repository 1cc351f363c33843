//! Gradient control laws and region containment.
//!
//! The gradient of the coverage criterion with respect to an agent's
//! position is a sum of line integrals over the boundary of guaranteed-sensing
//! cells. A boundary point moves with the agent in three ways: sensing arcs
//! translate with it, hyperbolic arcs deform according to the Jacobian of
//! the branch with respect to its foci, and region edges stay put.

#[allow(unused_imports)]
use num_traits::Float;

use crate::agents::{AgentId, Velocity};
use crate::geometry::{
    line_integral, BoundarySegment, BoundaryTag, ConvexPolygon, Curve, Focus, HyperbolaBranch, Mat2, Point2, Tolerances,
};
use crate::objective::Density;
use crate::partition::Partition;
use crate::{Error, Result};

/// Distance within which a position counts as lying on an edge of the
/// admissible region.
pub const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGains {
    /// Positive gain multiplying the gradient.
    pub alpha: f64,
    /// Look-ahead distance factor used to detect velocities leaving the
    /// admissible region.
    pub epsilon_probe: f64,
}

impl Default for ControlGains {
    fn default() -> Self {
        Self { alpha: 1.0, epsilon_probe: 1e-6 }
    }
}

/// Outward unit normal of the cell bounded by `h` at `gamma(t)`.
pub fn branch_normal(h: &HyperbolaBranch, t: f64) -> Point2 {
    h.outward_normal(t)
}

/// Gradients of the branch orientation `theta` and half focal distance `c`
/// with respect to one focus.
fn focus_gradients(h: &HyperbolaBranch, which: Focus) -> (Point2, Point2) {
    let e = Point2::from_angle(h.theta);
    let sign = match which {
        Focus::I => -1.0,
        Focus::J => 1.0,
    };
    (e.perp() * (sign / (2.0 * h.c)), e * (0.5 * sign))
}

/// Transpose Jacobian `(d gamma(t) / d focus)^T` at fixed `t` and fixed
/// radii.
pub fn branch_jacobian(h: &HyperbolaBranch, t: f64, which: Focus) -> Mat2 {
    let (g_theta, g_c) = focus_gradients(h, which);
    let d_theta = h.local_point(t).perp().rotate(h.theta);
    let d_c = Point2::new(0.0, t.sinh() * h.c / h.b).rotate(h.theta);
    let jacobian = Mat2::outer(d_theta, g_theta) + Mat2::outer(d_c, g_c) + Mat2::IDENTITY * 0.5;
    jacobian.transpose()
}

/// `integral of branch_jacobian(t) * n ds` from `t0` to `t1`, for a branch
/// traversed counter-clockwise around its owner.
fn hyperbolic_flux_uniform(h: &HyperbolaBranch, t0: f64, t1: f64, which: Focus) -> Point2 {
    let (g_theta, g_c) = focus_gradients(h, which);
    let sinh2 = |t: f64| t.sinh() * t.sinh();
    let s_int = |t: f64| 0.5 * (t.sinh() * t.cosh() - t);
    let theta_part = -h.c * h.c * 0.5 * (sinh2(t1) - sinh2(t0));
    let c_part = -(h.c * h.sign() * h.a / h.b) * (s_int(t1) - s_int(t0));
    g_theta * theta_part + g_c * c_part + (h.point(t1) - h.point(t0)).perp_cw() * 0.5
}

fn quadrature_panel<D: Density + ?Sized>(phi: &D, tol: &Tolerances) -> f64 {
    phi.resolution().map_or(tol.sample_spacing(), |r| r.min(tol.sample_spacing()))
}

/// `integral of n phi ds` along a segment that moves rigidly with the agent.
fn translating_flux<D: Density + ?Sized>(seg: &BoundarySegment, phi: &D, tol: &Tolerances) -> Point2 {
    if seg.is_full_circle() {
        return Point2::ZERO;
    }
    match phi.uniform_value() {
        Some(v) => (seg.end() - seg.start()).perp_cw() * v,
        None => line_integral(seg, quadrature_panel(phi, tol), |s| s.normal * phi.value(s.point)),
    }
}

/// `integral of upsilon n phi ds` along a hyperbolic segment.
fn hyperbolic_flux<D: Density + ?Sized>(seg: &BoundarySegment, which: Focus, phi: &D, tol: &Tolerances) -> Point2 {
    let Curve::Hyperbolic { branch, t_start, t_end } = seg.curve else {
        return Point2::ZERO;
    };
    match phi.uniform_value() {
        Some(v) => hyperbolic_flux_uniform(&branch, t_start, t_end, which) * v,
        None => line_integral(seg, quadrature_panel(phi, tol), |s| {
            branch_jacobian(&branch, s.param, which) * s.normal * phi.value(s.point)
        }),
    }
}

fn sensing_term<D: Density + ?Sized>(i: AgentId, partition: &Partition, phi: &D, tol: &Tolerances) -> Result<Option<Point2>> {
    let gs = partition.gs_cells.get(&i).ok_or(Error::UnknownAgent(i))?;
    if gs.is_empty() {
        return Ok(None);
    }
    Ok(Some(
        gs.segments_tagged(BoundaryTag::SensingCircle(i))
            .map(|s| translating_flux(s, phi, tol))
            .sum(),
    ))
}

/// Gradient-ascent law: `alpha` times the gradient of the coverage
/// criterion with respect to the agent's position.
///
/// An agent with an empty guaranteed-sensing cell stalls at zero velocity.
pub fn optimal_law<D: Density + ?Sized>(
    i: AgentId,
    partition: &Partition,
    phi: &D,
    gains: &ControlGains,
    tol: &Tolerances,
) -> Result<Velocity> {
    let Some(mut acc) = sensing_term(i, partition, phi, tol)? else {
        return Ok(Velocity::ZERO);
    };
    let own = &partition.gs_cells[&i];
    let empty = Default::default();
    let neighbors = partition.neighbor_sets.guaranteed.get(&i).unwrap_or(&empty);
    for &j in neighbors {
        for seg in own.segments_tagged(BoundaryTag::HyperbolicArc(i, j)) {
            acc += hyperbolic_flux(seg, Focus::I, phi, tol);
        }
        let theirs = partition
            .gs_cells
            .get(&j)
            .ok_or(Error::MissingNeighborCell { agent: i, neighbor: j })?;
        for seg in theirs.segments_tagged(BoundaryTag::HyperbolicArc(j, i)) {
            acc += hyperbolic_flux(seg, Focus::J, phi, tol);
        }
    }
    Ok(Velocity(acc * gains.alpha))
}

/// Free-arc law: only the sensing-circle part of the gradient. Zero when
/// that part is a full circle or absent.
pub fn suboptimal_law<D: Density + ?Sized>(
    i: AgentId,
    partition: &Partition,
    phi: &D,
    gains: &ControlGains,
    tol: &Tolerances,
) -> Result<Velocity> {
    Ok(Velocity(sensing_term(i, partition, phi, tol)?.unwrap_or(Point2::ZERO) * gains.alpha))
}

/// Keeps `q` inside `omega_s`: a velocity that would leave the region from
/// its boundary is replaced by its projection onto the boundary tangent. At
/// a vertex the projection onto either adjacent edge is used if it does not
/// leave through the other; otherwise the agent stops.
pub fn constrain(i: AgentId, u: Velocity, q: Point2, omega_s: &ConvexPolygon, gains: &ControlGains) -> Result<Velocity> {
    let _ = i;
    if omega_s.max_edge_distance(q) > EDGE_SLACK {
        return Err(Error::OutsideRegion { x: q.x, y: q.y });
    }
    let active: alloc::vec::Vec<_> = omega_s.edge_lines().filter(|e| e.signed_distance(q) >= -EDGE_SLACK).collect();
    let leaves = |v: Point2| {
        let probe = q + v * gains.epsilon_probe;
        active
            .iter()
            .any(|e| e.normal.dot(v) > 1e-12 * u.norm() && e.signed_distance(probe) > 0.0)
    };
    if !leaves(u.0) {
        return Ok(u);
    }
    let mut best: Option<Point2> = None;
    for e in active.iter().filter(|e| e.normal.dot(u.0) > 0.0) {
        let tangent = e.normal.perp();
        let v = tangent * tangent.dot(u.0);
        if !leaves(v) && best.map_or(true, |b| v.norm() > b.norm()) {
            best = Some(v);
        }
    }
    Ok(Velocity(best.unwrap_or(Point2::ZERO)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Agent;
    use crate::geometry::{hyperbola_branch, Disk};
    use crate::partition::build_partition;

    fn branch(qi: (f64, f64), ri: f64, qj: (f64, f64), rj: f64) -> HyperbolaBranch {
        hyperbola_branch(&Disk::new(qi.into(), ri), &Disk::new(qj.into(), rj)).unwrap()
    }

    fn moved(h: &HyperbolaBranch, which: Focus, delta: Point2) -> HyperbolaBranch {
        let (mut fi, mut fj) = (h.focus_i, h.focus_j);
        match which {
            Focus::I => fi += delta,
            Focus::J => fj += delta,
        }
        let mut out = hyperbola_branch(&Disk::new(fi, h.a), &Disk::new(fj, h.a)).unwrap();
        out.side = h.side;
        out
    }

    fn fd_jacobian(h: &HyperbolaBranch, t: f64, which: Focus) -> Mat2 {
        let eps = 1e-6;
        let col = |d: Point2| (moved(h, which, d).point(t) - moved(h, which, d * -1.0).point(t)) / (2.0 * eps);
        let cx = col(Point2::new(eps, 0.0));
        let cy = col(Point2::new(0.0, eps));
        // rows of the transpose are the columns of the Jacobian
        Mat2([[cx.x, cx.y], [cy.x, cy.y]])
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = branch((0.3, -0.2), 0.4, (3.1, 1.7), 0.4);
        for side in [h, h.mirrored()] {
            for &t in &[-1.7, -0.4, 0.0, 0.9, 2.2] {
                for which in [Focus::I, Focus::J] {
                    let diff = branch_jacobian(&side, t, which) - fd_jacobian(&side, t, which);
                    assert!(diff.max_abs() < 1e-6, "{t} {which:?} {diff:?}");
                }
            }
        }
    }

    #[test]
    fn jacobians_sum_to_identity() {
        let h = branch((1.0, 2.0), 0.2, (-1.5, 0.5), 0.6);
        for &t in &[-2.0, 0.0, 1.3] {
            let sum = branch_jacobian(&h, t, Focus::I) + branch_jacobian(&h, t, Focus::J);
            assert!((sum - Mat2::IDENTITY).max_abs() < 1e-12);
        }
    }

    #[test]
    fn vertex_jacobian_of_axis_aligned_pair() {
        // the vertex moves half as far as the focus along the axis; sideways
        // motion also rotates the branch about the midpoint
        let h = branch((0.0, 0.0), 0.5, (4.0, 0.0), 0.5);
        let v = branch_jacobian(&h, 0.0, Focus::I);
        assert!((v - Mat2([[0.5, 0.0], [0.0, 0.5 + h.a / (2.0 * h.c)]])).max_abs() < 1e-15);
    }

    #[test]
    fn normal_at_vertex_points_away_from_owner() {
        let h = branch((0.0, 0.0), 1.0, (4.0, 0.0), 1.0);
        assert!(branch_normal(&h, 0.0).distance(Point2::new(1.0, 0.0)) < 1e-15);
        for &t in &[-2.0, -0.5, 0.7, 3.0] {
            let n = branch_normal(&h, t);
            assert!((n.norm() - 1.0).abs() < 1e-12);
            assert!(n.dot(h.derivative(t)).abs() < 1e-9 * h.derivative(t).norm());
        }
    }

    #[test]
    fn closed_form_flux_matches_quadrature() {
        let h = branch((0.2, 0.1), 0.3, (2.5, 1.4), 0.2);
        for side in [h, h.mirrored()] {
            let seg = BoundarySegment {
                curve: Curve::Hyperbolic { branch: side, t_start: 1.1, t_end: -0.8 },
                tag: BoundaryTag::HyperbolicArc(AgentId(0), AgentId(1)),
            };
            for which in [Focus::I, Focus::J] {
                let exact = hyperbolic_flux_uniform(&side, 1.1, -0.8, which);
                let quad = line_integral(&seg, 1e-3, |s| branch_jacobian(&side, s.param, which) * s.normal);
                assert!(exact.distance(quad) < 1e-10, "{exact:?} {quad:?}");
            }
        }
    }

    #[test]
    fn isolated_agent_is_at_equilibrium() {
        let region = ConvexPolygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap();
        let agents = [Agent::new(0, Point2::new(5.0, 5.0), 0.1, 1.0)];
        let tol = Tolerances::default();
        let p = build_partition(&agents, &region, &tol).unwrap();
        let phi = crate::ScalarField::Uniform(1.0);
        let u = optimal_law(AgentId(0), &p, &phi, &ControlGains::default(), &tol).unwrap();
        assert_eq!(u, Velocity::ZERO);
        let u = suboptimal_law(AgentId(0), &p, &phi, &ControlGains::default(), &tol).unwrap();
        assert_eq!(u, Velocity::ZERO);
    }

    #[test]
    fn agent_cut_by_wall_moves_inward() {
        let region = ConvexPolygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap();
        let agents = [Agent::new(0, Point2::new(0.5, 5.0), 0.1, 1.1)];
        let tol = Tolerances::default();
        let p = build_partition(&agents, &region, &tol).unwrap();
        let phi = crate::ScalarField::Uniform(1.0);
        let u = suboptimal_law(AgentId(0), &p, &phi, &ControlGains::default(), &tol).unwrap();
        // the free arc spans the chord x = 0 of half-length sqrt(1 - 0.25)
        assert!(u.0.distance(Point2::new(2.0 * 0.75f64.sqrt(), 0.0)) < 1e-9, "{u:?}");
    }

    #[test]
    fn constrain_projects_on_edge() {
        let omega = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let g = ControlGains::default();
        let id = AgentId(0);
        let u = constrain(id, Velocity::new(0.3, -0.4), Point2::new(0.5, 0.0), &omega, &g).unwrap();
        assert!(u.0.distance(Point2::new(0.3, 0.0)) < 1e-15);
        let inside = constrain(id, Velocity::new(0.3, -0.4), Point2::new(0.5, 0.5), &omega, &g).unwrap();
        assert_eq!(inside, Velocity::new(0.3, -0.4));
        let inward = constrain(id, Velocity::new(0.3, 0.4), Point2::new(0.5, 0.0), &omega, &g).unwrap();
        assert_eq!(inward, Velocity::new(0.3, 0.4));
    }

    #[test]
    fn constrain_at_corner() {
        let omega = ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let g = ControlGains::default();
        let id = AgentId(0);
        let stuck = constrain(id, Velocity::new(-0.3, -0.4), Point2::ZERO, &omega, &g).unwrap();
        assert_eq!(stuck, Velocity::ZERO);
        let slide = constrain(id, Velocity::new(0.3, -0.4), Point2::ZERO, &omega, &g).unwrap();
        assert!(slide.0.distance(Point2::new(0.3, 0.0)) < 1e-15);
        assert!(matches!(
            constrain(id, Velocity::ZERO, Point2::new(-0.1, 0.5), &omega, &g),
            Err(Error::OutsideRegion { .. })
        ));
    }
}
