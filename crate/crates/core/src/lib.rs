//! Coverage control for mobile agents with bounded localization uncertainty.
//!
//! Each agent reports a position `q_i` that is only known to lie within an
//! uncertainty disk of radius `r_u`. The region of interest is split into
//! Guaranteed Voronoi (GV) cells: the points that are closer to agent `i`
//! than to every other agent for *every* realization of the uncertain
//! positions. For disks these cells are bounded by hyperbola branches.
//! Each agent is credited with the part of its cell it is guaranteed to sense,
//! and two gradient-type control laws move the agents so that the sensed
//! area grows.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! - [`geometry`]: convex polygons, disks, hyperbola branches, curved regions
//!   with exact parametric boundaries, clipping and quadrature.
//! - [`agents`]: agent state and single-integrator dynamics.
//! - [`partition`]: Delaunay neighbors, GV cells, guaranteed-sensing cells.
//! - [`objective`]: importance densities and the coverage criterion.
//! - [`control`]: the gradient law, the free-arc law and region containment.
//! - [`sim`]: the time-stepped engine and the differential-drive adapter.
#![no_std]
// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod agents;
pub mod control;
mod error;
pub mod geometry;
pub mod objective;
pub mod partition;
pub mod sim;

pub use agents::{Agent, AgentId, Velocity};
pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, CurvedRegion, Disk, HyperbolaBranch, Point2, Tolerances};
pub use objective::{CoverageReport, Density, ScalarField};
pub use partition::{NeighborSets, Partition};
pub use sim::{ControlLaw, SimConfig, SimState};
