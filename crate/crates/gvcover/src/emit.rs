//! Run outputs: trajectory and coverage CSV files, SVG snapshots and a JSON
//! summary.
//!
//! Reals are written with 17 significant digits, so parsing a file back
//! reproduces the simulated values bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use gvcover_core::partition::build_partition;
use gvcover_core::sim::StepRecord;
use gvcover_core::{ControlLaw, CurvedRegion, Point2, SimConfig, SimState};
use serde::{Deserialize, Serialize};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const H_SERIES_FILE: &str = "h_series.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const COMPARISON_FILE: &str = "compare.csv";

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("rebuilding the partition for a snapshot: {0}")]
    Geometry(#[from] gvcover_core::Error),
}

/// Which recorded steps to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Snapshot {
    Step(usize),
    Final,
}

impl std::str::FromStr for Snapshot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "final" | "last" => Ok(Self::Final),
            n => n.parse().map(Self::Step).map_err(|_| format!("`{n}` is neither a step number nor `final`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub law: String,
    pub mode: String,
    pub agents: usize,
    pub steps: usize,
    pub converged: bool,
    pub initial_h: f64,
    pub final_h: f64,
    pub h_max: f64,
    pub initial_fraction: f64,
    pub final_fraction: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub trajectory: PathBuf,
    pub h_series: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub summary: Summary,
}

/// One row of the trajectory file. `ux, uy` is the velocity realized over
/// the step that ended at this row (zero at step 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub t: f64,
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub ux: f64,
    pub uy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HRow {
    pub step: usize,
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub step: usize,
    pub t: f64,
    pub law: String,
    #[serde(rename = "H")]
    pub h: f64,
    pub fraction: f64,
}

pub fn law_name(law: ControlLaw) -> &'static str {
    match law {
        ControlLaw::Optimal => "optimal",
        ControlLaw::Suboptimal => "suboptimal",
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn records(state: &SimState) -> impl Iterator<Item = &StepRecord> {
    std::iter::once(&state.initial).chain(&state.history)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> EmitError + '_ {
    move |source| EmitError::Io { path: path.to_owned(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> EmitError + '_ {
    move |source| EmitError::Csv { path: path.to_owned(), source }
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), EmitError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_trajectory(state: &SimState, path: &Path) -> Result<(), EmitError> {
    let rows = records(state).flat_map(|r| {
        state.agents.iter().zip(&r.positions).zip(&r.controls).map(move |((a, q), u)| {
            vec![r.step.to_string(), real(r.t), a.id.0.to_string(), real(q.x), real(q.y), real(u.0.x), real(u.0.y)]
        })
    });
    write_rows(path, &["step", "t", "id", "x", "y", "ux", "uy"], rows)
}

pub fn write_h_series(state: &SimState, path: &Path) -> Result<(), EmitError> {
    let rows = records(state).map(|r| vec![r.step.to_string(), real(r.t), real(r.h), real(r.fraction)]);
    write_rows(path, &["step", "t", "H", "fraction"], rows)
}

/// Long-format coverage series of several runs of one scenario.
pub fn write_comparison(runs: &[(ControlLaw, &SimState)], path: &Path) -> Result<(), EmitError> {
    let rows = runs.iter().flat_map(|&(law, state)| {
        records(state).map(move |r| vec![r.step.to_string(), real(r.t), law_name(law).to_owned(), real(r.h), real(r.fraction)])
    });
    write_rows(path, &["step", "t", "law", "H", "fraction"], rows)
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, EmitError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>, EmitError> {
    read_rows(path)
}

pub fn read_h_series(path: &Path) -> Result<Vec<HRow>, EmitError> {
    read_rows(path)
}

pub fn read_comparison(path: &Path) -> Result<Vec<ComparisonRow>, EmitError> {
    read_rows(path)
}

pub fn summarize(state: &SimState, config: &SimConfig, mode: &str, wall_time: Duration) -> Summary {
    Summary {
        law: law_name(config.law).to_owned(),
        mode: mode.to_owned(),
        agents: state.agents.len(),
        steps: state.step,
        converged: state.converged,
        initial_h: state.initial.h,
        final_h: state.report.total,
        h_max: state.report.h_max,
        initial_fraction: state.initial.fraction,
        final_fraction: state.report.fraction,
        wall_time_s: wall_time.as_secs_f64(),
    }
}

/// Recorded step numbers for `requested`, in order and without repeats.
/// Steps past the end of the run map to the final step.
pub fn resolve_snapshots(state: &SimState, requested: &[Snapshot]) -> Vec<usize> {
    let mut steps: Vec<usize> = requested
        .iter()
        .map(|s| match *s {
            Snapshot::Step(k) => k.min(state.step),
            Snapshot::Final => state.step,
        })
        .collect();
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// Writes every output of a finished run into `out_dir`.
pub fn emit(
    state: &SimState,
    config: &SimConfig,
    mode: &str,
    out_dir: &Path,
    snapshots: &[Snapshot],
    wall_time: Duration,
) -> Result<RunOutputs, EmitError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let trajectory = out_dir.join(TRAJECTORY_FILE);
    write_trajectory(state, &trajectory)?;
    let h_series = out_dir.join(H_SERIES_FILE);
    write_h_series(state, &h_series)?;

    let mut snapshot_paths = Vec::new();
    for step in resolve_snapshots(state, snapshots) {
        let record = if step == 0 { &state.initial } else { &state.history[step - 1] };
        let path = out_dir.join(format!("snapshot_{step:06}.svg"));
        fs::write(&path, render_svg(state, config, record)?).map_err(io_err(&path))?;
        snapshot_paths.push(path);
    }

    let summary = summarize(state, config, mode, wall_time);
    let summary_path = out_dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_path, json + "\n").map_err(io_err(&summary_path))?;
    Ok(RunOutputs { trajectory, h_series, snapshots: snapshot_paths, summary_path, summary })
}

/// SVG drawing of the partition at one recorded step: the region, the
/// guaranteed Voronoi cells (blue), guaranteed sensing disks (red) and
/// uncertainty disks (black).
pub fn render_svg(state: &SimState, config: &SimConfig, record: &StepRecord) -> Result<String, EmitError> {
    let mut agents = state.agents.clone();
    for (a, q) in agents.iter_mut().zip(&record.positions) {
        a.q = *q;
    }
    let tol = config.tolerances();
    let partition = build_partition(&agents, &config.region, &tol)?;

    let verts = config.region.vertices();
    let (mut lo, mut hi) = (verts[0], verts[0]);
    for v in verts {
        lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let margin = 0.05 * extent;
    let scale = 800.0 / (extent + 2.0 * margin);
    let width = (hi.x - lo.x + 2.0 * margin) * scale;
    let height = (hi.y - lo.y + 2.0 * margin) * scale;
    let px = |p: Point2| ((p.x - lo.x + margin) * scale, (hi.y - p.y + margin) * scale);
    let ring = |pts: &[Point2]| -> String {
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            let (x, y) = px(*p);
            let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { " L" });
        }
        d.push_str(" Z");
        d
    };
    let flatten = |r: &CurvedRegion| r.flatten((0.5 / scale).max(tol.arc));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{:.0}" viewBox="0 0 {width:.2} {:.2}">"#,
        height + 24.0,
        height + 24.0
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r##"<path d="{}" fill="#f7f7f7" stroke="#444" stroke-width="2"/>"##, ring(verts));
    for a in &agents {
        let gs = flatten(&partition.gs_cells[&a.id]);
        if gs.len() >= 3 {
            let _ = writeln!(s, r##"<path d="{}" fill="#f3c4c4" fill-opacity="0.6" stroke="none"/>"##, ring(&gs));
        }
    }
    for a in &agents {
        let cell = flatten(&partition.cells[&a.id]);
        if cell.len() >= 3 {
            let _ = writeln!(s, r##"<path d="{}" fill="none" stroke="#1f4fd1" stroke-width="1.5"/>"##, ring(&cell));
        }
    }
    for a in &agents {
        let (cx, cy) = px(a.q);
        let gsr = partition.gsr[&a.id];
        if gsr.radius > 0.0 {
            let _ = writeln!(
                s,
                r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="#d11f1f" stroke-width="1"/>"##,
                gsr.radius * scale
            );
        }
        let _ = writeln!(
            s,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="black" stroke-width="1"/>"##,
            (a.r_u * scale).max(1.0)
        );
        let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="1.5" fill="black"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="sans-serif">{}</text>"#, cx + 3.0, cy - 3.0, a.id);
    }
    let _ = writeln!(
        s,
        r#"<text x="6" y="{:.2}" font-size="14" font-family="sans-serif">step {}  t = {:.3} s  H = {:.5}  fraction = {:.4}</text>"#,
        height + 17.0,
        record.step,
        record.t,
        record.h,
        record.fraction
    );
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_specs_parse() {
        assert_eq!("final".parse::<Snapshot>(), Ok(Snapshot::Final));
        assert_eq!(" 12".parse::<Snapshot>(), Ok(Snapshot::Step(12)));
        assert!("soon".parse::<Snapshot>().is_err());
    }

    #[test]
    fn reals_use_seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(0.1).parse::<f64>().unwrap(), 0.1);
        let v = std::f64::consts::PI * 1e-7;
        assert_eq!(real(v).parse::<f64>().unwrap(), v);
    }
}
