//! Geometric kernel: polygons, disks, hyperbola branches and curved convex
//! regions with exact boundaries.

mod disk;
mod hyperbola;
mod point;
mod polygon;
pub mod quadrature;
mod region;

pub use disk::Disk;
pub use hyperbola::{hyperbola_branch, sample_branch, BranchSide, Focus, HyperbolaBranch};
pub use point::{Mat2, Point2};
pub use polygon::{ConvexPolygon, EdgeLine};
pub use region::{line_integral, BoundarySample, BoundarySegment, BoundaryTag, Curve, CurvedRegion};

use crate::objective::Density;
use crate::Result;

/// Numerical tolerances of the kernel, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Chord deviation for flattening and panel length for line quadrature.
    pub arc: f64,
    /// Bisection stops once the bracketing points are this close.
    pub root: f64,
    /// Crossings closer than this are merged; boundary pieces shorter than
    /// this are dropped.
    pub touch: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { arc: 1e-3, root: 1e-10, touch: 1e-9 }
    }
}

impl Tolerances {
    pub fn with_arc(arc: f64) -> Self {
        Self { arc, ..Self::default() }
    }

    /// Spacing of the sign samples taken along a boundary before bisection.
    pub fn sample_spacing(&self) -> f64 {
        8.0 * self.arc
    }
}

/// `region` intersected with the side of `h` containing its owner focus.
pub fn clip_halfregion(region: &CurvedRegion, h: &HyperbolaBranch, tag: BoundaryTag, tol: &Tolerances) -> CurvedRegion {
    region.clip_halfregion(h, tag, tol)
}

/// `region` intersected with `disk`.
pub fn clip_disk(region: &CurvedRegion, disk: &Disk, tag: BoundaryTag, tol: &Tolerances) -> CurvedRegion {
    region.clip_disk(disk, tag, tol)
}

/// Integral of `phi` over `region`.
pub fn region_area_integral<D: Density + ?Sized>(region: &CurvedRegion, phi: &D, tol: &Tolerances) -> f64 {
    region.integrate(phi, tol)
}

/// Inward offset of a convex polygon; see [`ConvexPolygon::minkowski_erode`].
pub fn minkowski_erode(poly: &ConvexPolygon, r: f64) -> Result<ConvexPolygon> {
    poly.minkowski_erode(r)
}
