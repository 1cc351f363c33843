//! Convex regions bounded by line segments, circular arcs and hyperbolic
//! arcs, kept in exact parametric form.
//!
//! Every boundary is a closed loop traversed counter-clockwise, so the
//! outward normal of a segment is its unit tangent rotated clockwise. Each
//! segment carries a [`BoundaryTag`] saying where it came from: an edge of the
//! surveyed polygon, an agent's sensing circle, or the hyperbola between two
//! agents.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use super::quadrature::{for_each_gl_node, triangle_integral};
use super::{ConvexPolygon, Disk, HyperbolaBranch, Point2, Tolerances};
use crate::agents::AgentId;
use crate::objective::Density;

/// Origin of a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Edge `k` of the surveyed polygon.
    OmegaEdge(usize),
    /// Guaranteed sensing circle of an agent.
    SensingCircle(AgentId),
    /// Branch of the hyperbola between `.0` and `.1` bounding the cell of `.0`.
    HyperbolicArc(AgentId, AgentId),
}

/// Geometry of one boundary piece. Arcs store their native parameters in
/// traversal order, so `t_end < t_start` is legal for hyperbolic arcs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Line { start: Point2, end: Point2 },
    Hyperbolic { branch: HyperbolaBranch, t_start: f64, t_end: f64 },
    /// Counter-clockwise circular arc, `angle_end > angle_start`.
    Circular { center: Point2, radius: f64, angle_start: f64, angle_end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub curve: Curve,
    pub tag: BoundaryTag,
}

/// Point on a boundary segment handed to line-integral integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: Point2,
    /// Outward unit normal of the region.
    pub normal: Point2,
    /// Native curve parameter (`t` for hyperbolas, angle for circles, `[0, 1]` for lines).
    pub param: f64,
}

impl BoundarySegment {
    pub fn line(start: Point2, end: Point2, tag: BoundaryTag) -> Self {
        Self { curve: Curve::Line { start, end }, tag }
    }

    /// Native parameter at normalized position `u` in `[0, 1]`.
    #[inline]
    pub fn native(&self, u: f64) -> f64 {
        match self.curve {
            Curve::Line { .. } => u,
            Curve::Hyperbolic { t_start, t_end, .. } => t_start + (t_end - t_start) * u,
            Curve::Circular { angle_start, angle_end, .. } => angle_start + (angle_end - angle_start) * u,
        }
    }

    #[inline]
    pub fn point_at(&self, u: f64) -> Point2 {
        match self.curve {
            Curve::Line { start, end } => start.lerp(end, u),
            Curve::Hyperbolic { branch, .. } => branch.point(self.native(u)),
            Curve::Circular { center, radius, .. } => center + Point2::from_angle(self.native(u)) * radius,
        }
    }

    /// `d point / du`.
    #[inline]
    pub fn velocity(&self, u: f64) -> Point2 {
        match self.curve {
            Curve::Line { start, end } => end - start,
            Curve::Hyperbolic { branch, t_start, t_end } => branch.derivative(self.native(u)) * (t_end - t_start),
            Curve::Circular { radius, angle_start, angle_end, .. } => {
                Point2::from_angle(self.native(u)).perp() * (radius * (angle_end - angle_start))
            }
        }
    }

    pub fn start(&self) -> Point2 {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point2 {
        match self.curve {
            Curve::Line { end, .. } => end,
            _ => self.point_at(1.0),
        }
    }

    pub fn is_full_circle(&self) -> bool {
        matches!(self.curve, Curve::Circular { angle_start, angle_end, .. } if angle_end - angle_start >= TAU)
    }

    pub fn length(&self) -> f64 {
        match self.curve {
            Curve::Line { start, end } => start.distance(end),
            Curve::Hyperbolic { branch, t_start, t_end } => branch.arc_length(t_start, t_end),
            Curve::Circular { radius, angle_start, angle_end, .. } => radius * (angle_end - angle_start),
        }
    }

    /// Restriction to the normalized sub-range `[u0, u1]`.
    pub fn sub(&self, u0: f64, u1: f64) -> Self {
        let curve = match self.curve {
            Curve::Line { .. } => Curve::Line { start: self.point_at(u0), end: self.point_at(u1) },
            Curve::Hyperbolic { branch, .. } => Curve::Hyperbolic {
                branch,
                t_start: self.native(u0),
                t_end: self.native(u1),
            },
            Curve::Circular { center, radius, .. } => Curve::Circular {
                center,
                radius,
                angle_start: self.native(u0),
                angle_end: self.native(u1),
            },
        };
        Self { curve, tag: self.tag }
    }

    /// `1/2 * integral of cross(q - origin, dq)` along the segment, in
    /// closed form. Summed over a closed loop this is the enclosed area.
    pub fn green_term(&self, origin: Point2) -> f64 {
        match self.curve {
            Curve::Line { start, end } => 0.5 * (start - origin).cross(end - origin),
            Curve::Circular { center, radius, angle_start, angle_end } => {
                let c = center - origin;
                let (s0, c0) = angle_start.sin_cos();
                let (s1, c1) = angle_end.sin_cos();
                0.5 * (radius * radius * (angle_end - angle_start) + radius * (c.x * (s1 - s0) - c.y * (c1 - c0)))
            }
            Curve::Hyperbolic { branch, t_start, t_end } => {
                let m = branch.center() - origin;
                let chord = branch.point(t_end) - branch.point(t_start);
                0.5 * (branch.sign() * branch.a * branch.b * (t_end - t_start) + m.cross(chord))
            }
        }
    }

    /// Number of chords needed so that no chord deviates more than `tol`
    /// from the curve.
    fn chord_count(&self, tol: f64) -> usize {
        let max_chord = |rho: f64| (8.0 * rho * tol).sqrt().max(1e-12);
        let n = match self.curve {
            Curve::Line { .. } => 1.0,
            Curve::Circular { radius, .. } => self.length() / max_chord(radius),
            Curve::Hyperbolic { branch, .. } => {
                if branch.a <= 0.0 {
                    1.0
                } else {
                    // minimum radius of curvature is at the vertex
                    self.length() / max_chord(branch.b * branch.b / branch.a)
                }
            }
        };
        (n.ceil() as usize).clamp(1, 100_000)
    }

    /// Parameter-space panels so that each panel spans at most about
    /// `resolution` of arc length.
    fn panel_count(&self, resolution: f64) -> usize {
        ((self.length() / resolution).ceil() as usize).clamp(1, 1_000_000)
    }
}

/// Composite Gauss-Legendre line integral of a vector field along one
/// segment, with panels of about `resolution` arc length.
pub fn line_integral<F>(seg: &BoundarySegment, resolution: f64, mut f: F) -> Point2
where
    F: FnMut(&BoundarySample) -> Point2,
{
    let mut acc = Point2::ZERO;
    for_each_gl_node(0.0, 1.0, seg.panel_count(resolution), |u, w| {
        let v = seg.velocity(u);
        let speed = v.norm();
        if speed == 0.0 {
            return;
        }
        let sample = BoundarySample {
            point: seg.point_at(u),
            normal: v.perp_cw() / speed,
            param: seg.native(u),
        };
        acc += f(&sample) * (w * speed);
    });
    acc
}

/// A closed convex region with a tagged, exact boundary. The empty region
/// has no segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurvedRegion {
    segments: Vec<BoundarySegment>,
}

impl CurvedRegion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_segments(segments: Vec<BoundarySegment>) -> Self {
        Self { segments }
    }

    pub fn from_polygon(poly: &ConvexPolygon) -> Self {
        let segments = poly
            .edges()
            .enumerate()
            .map(|(k, (a, b))| BoundarySegment::line(a, b, BoundaryTag::OmegaEdge(k)))
            .collect();
        Self { segments }
    }

    pub fn from_disk(disk: &Disk, tag: BoundaryTag) -> Self {
        if disk.is_empty() {
            return Self::empty();
        }
        Self { segments: alloc::vec![full_circle(disk, tag)] }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> &[BoundarySegment] {
        &self.segments
    }

    /// Segments carrying `tag`.
    pub fn segments_tagged(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundarySegment> + '_ {
        self.segments.iter().filter(move |s| s.tag == tag)
    }

    pub fn tagged_length(&self, tag: BoundaryTag) -> f64 {
        self.segments_tagged(tag).map(BoundarySegment::length).sum()
    }

    /// Exact area via Green's theorem.
    pub fn area(&self) -> f64 {
        match self.segments.first() {
            None => 0.0,
            Some(first) => {
                let origin = first.start();
                self.segments.iter().map(|s| s.green_term(origin)).sum::<f64>().max(0.0)
            }
        }
    }

    /// Largest gap between the end of a segment and the start of the next.
    pub fn closure_gap(&self) -> f64 {
        let n = self.segments.len();
        (0..n)
            .map(|k| self.segments[k].end().distance(self.segments[(k + 1) % n].start()))
            .fold(0.0, f64::max)
    }

    /// Inscribed polygon whose chords stay within `tol` of the boundary.
    pub fn flatten(&self, tol: f64) -> Vec<Point2> {
        let mut pts = Vec::new();
        for seg in &self.segments {
            let n = seg.chord_count(tol);
            for k in 0..n {
                pts.push(seg.point_at(k as f64 / n as f64));
            }
        }
        pts
    }

    /// Point membership against the flattened boundary. Points within
    /// `tol` of a curved arc may be reported outside.
    pub fn contains(&self, q: Point2, tol: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let pts = self.flatten(tol);
        let n = pts.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|k| {
            let a = pts[k];
            let b = pts[(k + 1) % n];
            let len = a.distance(b);
            len == 0.0 || (b - a).cross(q - a) >= -1e-12 * len
        })
    }

    /// Intersection with the convex side of `h` that contains its owner
    /// focus. New boundary pieces get `tag`.
    pub fn clip_halfregion(&self, h: &HyperbolaBranch, tag: BoundaryTag, tol: &Tolerances) -> CurvedRegion {
        clip(self, &HalfRegion(*h), tag, tol)
    }

    /// Intersection with a closed disk. New boundary pieces get `tag`.
    pub fn clip_disk(&self, disk: &Disk, tag: BoundaryTag, tol: &Tolerances) -> CurvedRegion {
        if disk.is_empty() {
            return Self::empty();
        }
        clip(self, disk, tag, tol)
    }

    /// Integral of a density over the region.
    ///
    /// Uniform densities use the exact area. Otherwise the boundary is
    /// flattened with chord deviation `tol.arc`, the inscribed polygon is
    /// fan-triangulated from its vertex centroid (triangles subdivided down to
    /// the density's resolution), and the thin caps between chords and arcs
    /// are added as exact cap area times the density at the cap.
    pub fn integrate<D: Density + ?Sized>(&self, phi: &D, tol: &Tolerances) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if let Some(v) = phi.uniform_value() {
            return v * self.area();
        }
        let resolution = phi.resolution().unwrap_or(f64::INFINITY);
        let mut chords: Vec<(Point2, Point2)> = Vec::new();
        let mut caps = 0.0;
        for seg in &self.segments {
            let n = seg.chord_count(tol.arc);
            for k in 0..n {
                let (u0, u1) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
                let (p0, p1) = (seg.point_at(u0), seg.point_at(u1));
                chords.push((p0, p1));
                if !matches!(seg.curve, Curve::Line { .. }) {
                    let cap = seg.sub(u0, u1).green_term(p0);
                    let at = (seg.point_at(0.5 * (u0 + u1)) + (p0 + p1) * 0.5) * 0.5;
                    caps += cap * phi.value(at);
                }
            }
        }
        let hub = chords.iter().map(|c| c.0).sum::<Point2>() / chords.len() as f64;
        let mut acc = caps;
        for (p0, p1) in chords {
            let longest = hub.distance(p0).max(hub.distance(p1)).max(p0.distance(p1));
            let k = if resolution.is_finite() {
                ((longest / resolution).ceil() as usize).clamp(1, 256)
            } else {
                1
            };
            acc += triangle_integral(hub, p0, p1, k, |q| phi.value(q));
        }
        acc
    }
}

/// Full counter-clockwise circle starting at angle zero.
fn full_circle(disk: &Disk, tag: BoundaryTag) -> BoundarySegment {
    BoundarySegment {
        curve: Curve::Circular {
            center: disk.center,
            radius: disk.radius,
            angle_start: 0.0,
            angle_end: TAU,
        },
        tag,
    }
}

/// A closed convex set used as a clipping operand.
trait ClipSet {
    /// Implicit function, `<= 0` inside, Lipschitz constant at most
    /// [`ClipSet::LIPSCHITZ`].
    fn signed(&self, q: Point2) -> f64;
    const LIPSCHITZ: f64;
    /// Counter-clockwise boundary piece from `from` to `to` (both on the boundary).
    fn connect(&self, from: Point2, to: Point2, tag: BoundaryTag) -> BoundarySegment;
    /// Whole boundary, for bounded sets.
    fn full(&self, tag: BoundaryTag) -> Option<BoundarySegment>;
    fn interior_point(&self) -> Point2;
}

struct HalfRegion(HyperbolaBranch);

impl ClipSet for HalfRegion {
    const LIPSCHITZ: f64 = 2.0;

    fn signed(&self, q: Point2) -> f64 {
        self.0.signed_side(q)
    }

    fn connect(&self, from: Point2, to: Point2, tag: BoundaryTag) -> BoundarySegment {
        let h = self.0;
        BoundarySegment {
            curve: Curve::Hyperbolic { branch: h, t_start: h.param_of(from), t_end: h.param_of(to) },
            tag,
        }
    }

    fn full(&self, _tag: BoundaryTag) -> Option<BoundarySegment> {
        None
    }

    fn interior_point(&self) -> Point2 {
        self.0.owner()
    }
}

impl ClipSet for Disk {
    const LIPSCHITZ: f64 = 1.0;

    fn signed(&self, q: Point2) -> f64 {
        q.distance(self.center) - self.radius
    }

    fn connect(&self, from: Point2, to: Point2, tag: BoundaryTag) -> BoundarySegment {
        let a0 = (from - self.center).angle();
        let mut a1 = (to - self.center).angle();
        while a1 <= a0 {
            a1 += TAU;
        }
        BoundarySegment {
            curve: Curve::Circular { center: self.center, radius: self.radius, angle_start: a0, angle_end: a1 },
            tag,
        }
    }

    fn full(&self, tag: BoundaryTag) -> Option<BoundarySegment> {
        Some(full_circle(self, tag))
    }

    fn interior_point(&self) -> Point2 {
        self.center
    }
}

#[derive(Debug, Clone, Copy)]
struct Crossing {
    seg: usize,
    u: f64,
    point: Point2,
    entering: bool,
}

/// Crossing search along region boundary segments.
struct Scan {
    crossings: Vec<Crossing>,
    /// Sampled value of largest magnitude.
    dominant: f64,
}

impl Scan {
    fn observe(&mut self, f: f64) {
        if f.abs() > self.dominant.abs() {
            self.dominant = f;
        }
    }

    /// Finds the crossings of `seg` restricted to `[ua, ub]`, in order.
    ///
    /// Intervals whose endpoint values are too large for the implicit
    /// function to reach zero in between (by its Lipschitz bound) are
    /// skipped; others are halved down to the sample spacing, where a sign
    /// change is bisected and an excursion to the other side is searched
    /// for.
    fn interval<S: ClipSet, F: Fn(usize, f64) -> f64>(
        &mut self,
        seg: &BoundarySegment,
        k: usize,
        (ua, fa): (f64, f64),
        (ub, fb): (f64, f64),
        eval: &F,
        tol: &Tolerances,
    ) {
        let inside_a = fa <= 0.0;
        let inside_b = fb <= 0.0;
        // speed is largest at an endpoint for lines, circles and hyperbolas
        let reach = (ub - ua) * seg.velocity(ua).norm().max(seg.velocity(ub).norm());
        if inside_a == inside_b && fa.abs() + fb.abs() > S::LIPSCHITZ * reach * 1.01 {
            return;
        }
        if reach > tol.sample_spacing() {
            let um = 0.5 * (ua + ub);
            let fm = eval(k, um);
            self.observe(fm);
            self.interval::<S, F>(seg, k, (ua, fa), (um, fm), eval, tol);
            self.interval::<S, F>(seg, k, (um, fm), (ub, fb), eval, tol);
            return;
        }
        if inside_a != inside_b {
            self.crossings.push(bisect(seg, k, ua, ub, inside_a, eval, tol));
            return;
        }
        let sign = if inside_a { 1.0 } else { -1.0 };
        let slope = S::LIPSCHITZ * reach / (ub - ua);
        let (u_star, g_star) = golden_max(|u| sign * eval(k, u), ua, ub, slope);
        let crossed = if inside_a { g_star > 0.0 } else { g_star >= 0.0 };
        if crossed {
            self.crossings.push(bisect(seg, k, ua, u_star, inside_a, eval, tol));
            self.crossings.push(bisect(seg, k, u_star, ub, !inside_a, eval, tol));
        }
    }
}

fn clip<S: ClipSet>(region: &CurvedRegion, set: &S, tag: BoundaryTag, tol: &Tolerances) -> CurvedRegion {
    let segs = &region.segments;
    if segs.is_empty() {
        return CurvedRegion::empty();
    }

    let eval = |k: usize, u: f64| set.signed(segs[k].point_at(u));
    let mut scan = Scan { crossings: Vec::new(), dominant: 0.0 };
    for (k, seg) in segs.iter().enumerate() {
        let pieces = 8;
        let mut fa = eval(k, 0.0);
        scan.observe(fa);
        for m in 0..pieces {
            let (ua, ub) = (m as f64 / pieces as f64, (m + 1) as f64 / pieces as f64);
            let fb = eval(k, ub);
            scan.observe(fb);
            scan.interval::<S, _>(seg, k, (ua, fa), (ub, fb), &eval, tol);
            fa = fb;
        }
    }
    let Scan { mut crossings, dominant } = scan;

    // Touching contacts show up as an entry and exit at the same place.
    let mut changed = true;
    while changed && crossings.len() >= 2 {
        changed = false;
        let n = crossings.len();
        for m in 0..n {
            let (a, b) = (crossings[m], crossings[(m + 1) % n]);
            if a.entering != b.entering && a.point.distance(b.point) <= tol.touch {
                let hi = m.max((m + 1) % n);
                let lo = m.min((m + 1) % n);
                crossings.remove(hi);
                crossings.remove(lo);
                changed = true;
                break;
            }
        }
    }

    if crossings.is_empty() {
        if dominant <= 0.0 {
            return region.clone();
        }
        return match set.full(tag) {
            Some(full) if region.contains(set.interior_point(), tol.arc) => {
                CurvedRegion { segments: alloc::vec![full] }
            }
            _ => CurvedRegion::empty(),
        };
    }

    // Keep alternation even if noise produced two entries in a row.
    crossings.dedup_by(|b, a| a.entering == b.entering);
    if crossings.len() >= 2 && crossings[0].entering == crossings[crossings.len() - 1].entering {
        crossings.pop();
    }
    if crossings.len() < 2 {
        return CurvedRegion::empty();
    }

    let n = crossings.len();
    let first_entry = (0..n).find(|&m| crossings[m].entering).unwrap_or(0);
    let mut out: Vec<BoundarySegment> = Vec::new();
    let mut m = first_entry;
    loop {
        let entry = crossings[m];
        let exit = crossings[(m + 1) % n];
        let next_entry = crossings[(m + 2) % n];
        append_run(&mut out, segs, entry, exit, tol);
        if exit.point.distance(next_entry.point) > tol.touch {
            out.push(set.connect(exit.point, next_entry.point, tag));
        }
        m = (m + 2) % n;
        if m == first_entry {
            break;
        }
    }
    CurvedRegion { segments: out }
}

/// Appends the region boundary from `entry` to `exit`, walking forward.
fn append_run(out: &mut Vec<BoundarySegment>, segs: &[BoundarySegment], entry: Crossing, exit: Crossing, tol: &Tolerances) {
    let mut push = |s: BoundarySegment| {
        let long_arc = matches!(s.curve, Curve::Circular { angle_start, angle_end, .. } if angle_end - angle_start > 1.0);
        if long_arc || s.start().distance(s.end()) > tol.touch {
            out.push(s);
        }
    };
    if entry.seg == exit.seg && exit.u >= entry.u {
        push(segs[entry.seg].sub(entry.u, exit.u));
        return;
    }
    let n = segs.len();
    push(segs[entry.seg].sub(entry.u, 1.0));
    let mut k = (entry.seg + 1) % n;
    while k != exit.seg {
        push(segs[k]);
        k = (k + 1) % n;
    }
    push(segs[exit.seg].sub(0.0, exit.u));
}

fn bisect<F: Fn(usize, f64) -> f64>(
    seg: &BoundarySegment,
    k: usize,
    mut ua: f64,
    mut ub: f64,
    inside_a: bool,
    eval: &F,
    tol: &Tolerances,
) -> Crossing {
    for _ in 0..200 {
        if seg.point_at(ua).distance(seg.point_at(ub)) <= tol.root {
            break;
        }
        let mid = 0.5 * (ua + ub);
        if mid <= ua || mid >= ub {
            break;
        }
        if (eval(k, mid) <= 0.0) == inside_a {
            ua = mid;
        } else {
            ub = mid;
        }
    }
    let u = 0.5 * (ua + ub);
    Crossing { seg: k, u, point: seg.point_at(u), entering: !inside_a }
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Stops early once the maximum is known to be positive, or once `slope`
/// (a Lipschitz bound of `f`) shows it cannot reach zero.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, slope: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        let best = f1.max(f2);
        if best > 0.0 || best + slope * (hi - lo) < 0.0 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
