//! Importance densities and the coverage criterion.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::agents::AgentId;
use crate::geometry::{BoundaryTag, CurvedRegion, Point2, Tolerances};
use crate::partition::Partition;
use crate::{Error, Result};

/// A non-negative importance density over the plane.
pub trait Density {
    fn value(&self, q: Point2) -> f64;

    /// `Some(v)` when the density is the constant `v` everywhere; enables
    /// exact area-based integrals.
    fn uniform_value(&self) -> Option<f64> {
        None
    }

    /// Length scale over which the density varies appreciably. Quadrature
    /// is refined down to it.
    fn resolution(&self) -> Option<f64> {
        None
    }
}

impl<F: Fn(Point2) -> f64> Density for F {
    fn value(&self, q: Point2) -> f64 {
        self(q)
    }
}

/// A closure density with an explicit resolution.
#[derive(Debug, Clone, Copy)]
pub struct Resolved<F> {
    pub f: F,
    pub resolution: f64,
}

impl<F: Fn(Point2) -> f64> Density for Resolved<F> {
    fn value(&self, q: Point2) -> f64 {
        (self.f)(q)
    }

    fn resolution(&self) -> Option<f64> {
        Some(self.resolution)
    }
}

/// Bilinearly interpolated samples on a regular grid. Sample `(row, col)`
/// sits at `origin + (col, row) * cell_size`; queries outside the grid are
/// clamped to the border.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    origin: Point2,
    cell_size: f64,
    cols: usize,
    rows: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(origin: Point2, cell_size: f64, rows: Vec<Vec<f64>>) -> Result<Self> {
        if !(cell_size > 0.0) || !origin.is_finite() {
            return Err(Error::InvalidParameter("grid cell size must be positive"));
        }
        let cols = rows.first().map_or(0, Vec::len);
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("grid rows must be non-empty and of equal length"));
        }
        let n_rows = rows.len();
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("density values must be finite and non-negative"));
        }
        Ok(Self { origin, cell_size, cols, rows: n_rows, values })
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    fn sample(&self, q: Point2) -> f64 {
        let axis = |v: f64, n: usize| -> (usize, usize, f64) {
            let max = (n - 1) as f64;
            let s = v.clamp(0.0, max);
            let i0 = (s.floor() as usize).min(n - 1);
            let i1 = (i0 + 1).min(n - 1);
            (i0, i1, s - i0 as f64)
        };
        let local = (q - self.origin) / self.cell_size;
        let (c0, c1, fx) = axis(local.x, self.cols);
        let (r0, r1, fy) = axis(local.y, self.rows);
        let bottom = self.at(r0, c0) * (1.0 - fx) + self.at(r0, c1) * fx;
        let top = self.at(r1, c0) * (1.0 - fx) + self.at(r1, c1) * fx;
        bottom * (1.0 - fy) + top * fy
    }
}

/// Importance density `phi`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Uniform(f64),
    Grid(GridField),
}

impl Default for ScalarField {
    fn default() -> Self {
        Self::Uniform(1.0)
    }
}

impl ScalarField {
    /// The field multiplied by `k >= 0`.
    pub fn scaled(&self, k: f64) -> Self {
        match self {
            Self::Uniform(v) => Self::Uniform(v * k),
            Self::Grid(g) => Self::Grid(GridField { values: g.values.iter().map(|v| v * k).collect(), ..g.clone() }),
        }
    }
}

impl Density for ScalarField {
    fn value(&self, q: Point2) -> f64 {
        match self {
            Self::Uniform(v) => *v,
            Self::Grid(g) => g.sample(q),
        }
    }

    fn uniform_value(&self) -> Option<f64> {
        match self {
            Self::Uniform(v) => Some(*v),
            Self::Grid(_) => None,
        }
    }

    fn resolution(&self) -> Option<f64> {
        match self {
            Self::Uniform(_) => None,
            Self::Grid(g) => Some(g.cell_size),
        }
    }
}

/// Value of the coverage criterion for one partition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoverageReport {
    /// Density integral over each agent's guaranteed-sensing cell.
    pub per_agent: BTreeMap<AgentId, f64>,
    pub total: f64,
    /// Sum of the density integrals over the guaranteed sensing disks; the
    /// best value attainable if those disks can be packed into the region.
    pub h_max: f64,
    /// `total / h_max`, or zero when `h_max` is zero.
    pub fraction: f64,
}

/// Coverage criterion: the density integrated over every guaranteed-sensing cell.
pub fn coverage<D: Density + ?Sized>(partition: &Partition, phi: &D, tol: &Tolerances) -> CoverageReport {
    let per_agent: BTreeMap<AgentId, f64> = partition
        .gs_cells
        .iter()
        .map(|(&id, cell)| (id, cell.integrate(phi, tol)))
        .collect();
    let total = per_agent.values().sum();
    let h_max = partition
        .gsr
        .iter()
        .map(|(&id, disk)| match phi.uniform_value() {
            Some(v) => v * disk.area(),
            None => CurvedRegion::from_disk(disk, BoundaryTag::SensingCircle(id)).integrate(phi, tol),
        })
        .sum::<f64>();
    let fraction = if h_max > 0.0 { total / h_max } else { 0.0 };
    CoverageReport { per_agent, total, h_max, fraction }
}
