use core::f64::consts::PI;

use super::Point2;

/// Closed disk. A radius of zero is the empty-sensing sentinel: it has no
/// area and clips every region to nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub const fn new(center: Point2, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn is_empty(&self) -> bool {
        !(self.radius > 0.0)
    }

    pub fn area(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            PI * self.radius * self.radius
        }
    }

    pub fn contains(&self, q: Point2) -> bool {
        q.distance(self.center) <= self.radius
    }

    pub fn point_at(&self, angle: f64) -> Point2 {
        self.center + Point2::from_angle(angle) * self.radius
    }

    /// `true` when the two closed disks share at least one point.
    pub fn touches(&self, other: &Disk) -> bool {
        self.center.distance(other.center) <= self.radius + other.radius
    }
}
