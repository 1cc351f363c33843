use crate::agents::AgentId;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("uncertainty disks overlap or touch (center distance {distance}, radius sum {radius_sum})")]
    OverlappingDisks { distance: f64, radius_sum: f64 },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("Minkowski erosion by {radius} leaves an empty region")]
    EmptyErosion { radius: f64 },

    #[error("cell of neighbor {neighbor} is required by agent {agent} but missing from the partition")]
    MissingNeighborCell { agent: AgentId, neighbor: AgentId },

    #[error("point ({x}, {y}) lies outside the admissible region")]
    OutsideRegion { x: f64, y: f64 },

    #[error("region not convex: {0}")]
    NotConvex(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
}
