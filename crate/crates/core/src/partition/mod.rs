//! Guaranteed Voronoi partition of a convex region among uncertain agents.
//!
//! Each cell is the region clipped by the hyperbolic half-regions of the
//! agent's classic Delaunay neighbors; the guaranteed neighbors are then read
//! off the arcs that survive. Agents whose uncertainty disk meets another
//! disk get an empty cell. Whatever no cell claims is the neutral region.

mod delaunay;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

pub use delaunay::delaunay_neighbors;

use crate::agents::{guaranteed_sensing_disk, Agent, AgentId};
use crate::geometry::{hyperbola_branch, BoundaryTag, ConvexPolygon, CurvedRegion, Disk, Tolerances};
use crate::{Error, Result};

/// Adjacency information of a partition, keyed by agent id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborSets {
    /// Classic Delaunay neighbors of the reported positions.
    pub delaunay: BTreeMap<AgentId, BTreeSet<AgentId>>,
    /// Neighbors sharing a hyperbolic arc of positive length with a cell.
    pub guaranteed: BTreeMap<AgentId, BTreeSet<AgentId>>,
    /// Union of the guaranteed neighbors of an agent's guaranteed neighbors:
    /// the agents whose state the gradient law of an agent depends on.
    pub two_hop: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

/// Guaranteed Voronoi cells, their guaranteed-sensing parts and neighbor sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Partition {
    pub cells: BTreeMap<AgentId, CurvedRegion>,
    /// Each cell intersected with its agent's guaranteed sensing disk.
    pub gs_cells: BTreeMap<AgentId, CurvedRegion>,
    /// Guaranteed sensing disk of every agent.
    pub gsr: BTreeMap<AgentId, Disk>,
    pub neighbor_sets: NeighborSets,
}

impl Partition {
    pub fn total_cell_area(&self) -> f64 {
        self.cells.values().map(CurvedRegion::area).sum()
    }
}

fn check_ids(agents: &[Agent]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for a in agents {
        if !seen.insert(a.id) {
            return Err(Error::InvalidParameter("duplicate agent id"));
        }
        if !(a.r_u >= 0.0) || !(a.r_s >= 0.0) || !a.q.is_finite() {
            return Err(Error::InvalidParameter("agent radii must be non-negative and positions finite"));
        }
    }
    Ok(())
}

fn delaunay_by_index(agents: &[Agent]) -> Result<Vec<BTreeSet<usize>>> {
    let points: Vec<_> = agents.iter().map(|a| a.q).collect();
    delaunay_neighbors(&points)
}

/// Cell of `agents[i]` given the Delaunay neighbor indices of every agent.
fn cell_of(i: usize, agents: &[Agent], neighbors: &BTreeSet<usize>, base: &CurvedRegion, tol: &Tolerances) -> CurvedRegion {
    let me = agents[i].uncertainty_disk();
    let overlapping = agents
        .iter()
        .enumerate()
        .any(|(k, other)| k != i && me.touches(&other.uncertainty_disk()));
    if overlapping {
        return CurvedRegion::empty();
    }
    let mut cell = base.clone();
    for &j in neighbors {
        if cell.is_empty() {
            break;
        }
        let Ok(h) = hyperbola_branch(&me, &agents[j].uncertainty_disk()) else {
            return CurvedRegion::empty();
        };
        cell = cell.clip_halfregion(&h, BoundaryTag::HyperbolicArc(agents[i].id, agents[j].id), tol);
    }
    cell
}

/// Guaranteed Voronoi cell of agent `i` inside `region`.
pub fn gv_cell(i: AgentId, agents: &[Agent], region: &ConvexPolygon, tol: &Tolerances) -> Result<CurvedRegion> {
    check_ids(agents)?;
    let idx = agents.iter().position(|a| a.id == i).ok_or(Error::UnknownAgent(i))?;
    let nbrs = delaunay_by_index(agents)?;
    Ok(cell_of(idx, agents, &nbrs[idx], &CurvedRegion::from_polygon(region), tol))
}

/// Guaranteed neighbors of `i` recorded in `partition`.
pub fn guaranteed_neighbors(i: AgentId, partition: &Partition) -> BTreeSet<AgentId> {
    partition.neighbor_sets.guaranteed.get(&i).cloned().unwrap_or_default()
}

/// Builds every cell, guaranteed-sensing cell and neighbor set.
///
/// `j` is a guaranteed neighbor of `i` when the arc between them is longer
/// than `tol.arc` on the boundary of either cell, so the relation is symmetric.
pub fn build_partition(agents: &[Agent], region: &ConvexPolygon, tol: &Tolerances) -> Result<Partition> {
    check_ids(agents)?;
    let nbrs = delaunay_by_index(agents)?;
    let base = CurvedRegion::from_polygon(region);
    let ids: Vec<AgentId> = agents.iter().map(|a| a.id).collect();

    let mut partition = Partition::default();
    let mut sets = NeighborSets::default();
    for (i, a) in agents.iter().enumerate() {
        let cell = cell_of(i, agents, &nbrs[i], &base, tol);
        let gsr = guaranteed_sensing_disk(a);
        let gs_cell = cell.clip_disk(&gsr, BoundaryTag::SensingCircle(a.id), tol);
        sets.delaunay.insert(a.id, nbrs[i].iter().map(|&j| ids[j]).collect());
        sets.guaranteed.insert(a.id, BTreeSet::new());
        partition.cells.insert(a.id, cell);
        partition.gs_cells.insert(a.id, gs_cell);
        partition.gsr.insert(a.id, gsr);
    }
    for (i, &id) in ids.iter().enumerate() {
        for &j in &nbrs[i] {
            let other = ids[j];
            if partition.cells[&id].tagged_length(BoundaryTag::HyperbolicArc(id, other)) > tol.arc {
                sets.guaranteed.entry(id).or_default().insert(other);
                sets.guaranteed.entry(other).or_default().insert(id);
            }
        }
    }
    for &id in &ids {
        let hop: BTreeSet<AgentId> = sets.guaranteed[&id]
            .iter()
            .flat_map(|j| sets.guaranteed[j].iter().copied())
            .collect();
        sets.two_hop.insert(id, hop);
    }
    partition.neighbor_sets = sets;
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use core::f64::consts::PI;

    fn square(side: f64) -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, side, side).unwrap()
    }

    fn agent(id: u32, x: f64, y: f64, r_u: f64, r_s: f64) -> Agent {
        Agent::new(id, Point2::new(x, y), r_u, r_s)
    }

    #[test]
    fn overlapping_pair_has_empty_cells() {
        let agents = [agent(0, 3.0, 5.0, 1.0, 2.0), agent(1, 4.0, 5.0, 1.0, 2.0)];
        let p = build_partition(&agents, &square(10.0), &Tolerances::default()).unwrap();
        assert!(p.cells.values().all(CurvedRegion::is_empty));
        assert!(p.neighbor_sets.guaranteed.values().all(BTreeSet::is_empty));
    }

    #[test]
    fn exact_positions_tessellate() {
        let agents = [
            agent(0, 2.0, 2.0, 0.0, 1.0),
            agent(1, 7.0, 3.0, 0.0, 1.0),
            agent(2, 4.0, 8.0, 0.0, 1.0),
            agent(3, 8.5, 8.0, 0.0, 1.0),
        ];
        let p = build_partition(&agents, &square(10.0), &Tolerances::default()).unwrap();
        assert!((p.total_cell_area() - 100.0).abs() < 1e-6);
    }

    #[test]
    fn two_agent_cells_split_at_hyperbola_vertices() {
        let agents = [agent(0, 3.0, 5.0, 0.5, 1.0), agent(1, 7.0, 5.0, 0.5, 1.0)];
        let p = build_partition(&agents, &square(10.0), &Tolerances::default()).unwrap();
        let c0 = &p.cells[&AgentId(0)];
        assert!(c0.contains(Point2::new(4.4, 5.0), 1e-6));
        assert!(!c0.contains(Point2::new(4.6, 5.0), 1e-6));
        assert!(p.total_cell_area() < 100.0);
        assert!(p.neighbor_sets.guaranteed[&AgentId(0)].contains(&AgentId(1)));
    }

    #[test]
    fn isolated_agent_gs_cell_is_its_disk() {
        let agents = [agent(0, 5.0, 5.0, 0.1, 1.1)];
        let p = build_partition(&agents, &square(10.0), &Tolerances::default()).unwrap();
        assert!((p.gs_cells[&AgentId(0)].area() - PI).abs() < 1e-12);
    }

    #[test]
    fn gv_cell_matches_partition() {
        let agents = [agent(0, 3.0, 5.0, 0.5, 1.0), agent(1, 7.0, 5.0, 0.2, 1.0), agent(2, 5.0, 1.0, 0.3, 1.0)];
        let region = square(10.0);
        let tol = Tolerances::default();
        let p = build_partition(&agents, &region, &tol).unwrap();
        for a in &agents {
            assert_eq!(gv_cell(a.id, &agents, &region, &tol).unwrap(), p.cells[&a.id]);
        }
        assert_eq!(gv_cell(AgentId(9), &agents, &region, &tol), Err(Error::UnknownAgent(AgentId(9))));
    }

    #[test]
    fn delaunay_neighbor_need_not_be_guaranteed() {
        let pts = [(8.5, 6.5), (6.0, 6.0), (6.0, 3.0), (7.5, 7.0), (1.0, 1.0), (4.0, 4.0)];
        let agents: Vec<Agent> = pts.iter().enumerate().map(|(k, &(x, y))| agent(k as u32 + 1, x, y, 0.4, 1.0)).collect();
        let p = build_partition(&agents, &square(10.0), &Tolerances::default()).unwrap();
        let (a, b) = (AgentId(1), AgentId(2));
        assert!(p.neighbor_sets.delaunay[&a].contains(&b));
        assert!(!p.neighbor_sets.guaranteed[&a].contains(&b));
        assert!(!p.neighbor_sets.guaranteed[&b].contains(&a));
        assert!(p.cells.values().all(|c| !c.is_empty()));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let agents = [agent(0, 3.0, 5.0, 0.5, 1.0), agent(0, 7.0, 5.0, 0.5, 1.0)];
        assert!(build_partition(&agents, &square(10.0), &Tolerances::default()).is_err());
    }
}
