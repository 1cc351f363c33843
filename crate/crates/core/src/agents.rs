//! Agent state and single-integrator dynamics.

use core::fmt;

use crate::geometry::{Disk, Point2};

/// Stable agent identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Velocity command in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity(pub Point2);

impl Velocity {
    pub const ZERO: Velocity = Velocity(Point2::ZERO);

    pub fn new(x: f64, y: f64) -> Self {
        Self(Point2::new(x, y))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// An agent as seen by the partition: reported position plus the radius of
/// the disk that certainly contains the true position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    /// Reported position.
    pub q: Point2,
    /// Localization uncertainty radius.
    pub r_u: f64,
    /// Sensing radius.
    pub r_s: f64,
    /// Uncertainty used for the guaranteed sensing disk when it differs from
    /// `r_u`, e.g. when `r_u` is padded by the robot footprint for
    /// partitioning and containment only.
    pub sensing_r_u: Option<f64>,
}

impl Agent {
    pub fn new(id: u32, q: Point2, r_u: f64, r_s: f64) -> Self {
        Self { id: AgentId(id), q, r_u, r_s, sensing_r_u: None }
    }

    pub fn uncertainty_disk(&self) -> Disk {
        Disk::new(self.q, self.r_u)
    }

    pub fn guaranteed_sensing_disk(&self) -> Disk {
        guaranteed_sensing_disk(self)
    }
}

/// The region sensed from every possible true position: a disk of radius
/// `r_s - r_u`, or the zero-radius empty sentinel when `r_u > r_s`.
pub fn guaranteed_sensing_disk(a: &Agent) -> Disk {
    let r_u = a.sensing_r_u.unwrap_or(a.r_u);
    Disk::new(a.q, if a.r_s >= r_u { a.r_s - r_u } else { 0.0 })
}

/// Explicit Euler step of `q' = u`.
pub fn integrate(a: &Agent, u: Velocity, dt: f64) -> Agent {
    Agent { q: a.q + u.0 * dt, ..*a }
}
