//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! [region]
//! vertices = [[0, 0], [10, 0], [10, 10], [0, 10]]
//!
//! [[agents]]
//! position = [2.0, 3.0]
//! r_u = 0.2
//! r_s = 1.5
//!
//! [phi]                  # optional, defaults to uniform = 1
//! grid = "density.csv"   # or: uniform = 2.0
//!
//! [sim]                  # every key optional
//! law = "optimal"
//! dt = 0.01
//! ```
//!
//! The full schema is documented in the repository README.

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use gvcover_core::objective::GridField;
use gvcover_core::sim::DriveParams;
use gvcover_core::{Agent, AgentId, ConvexPolygon, ControlLaw, Point2, ScalarField, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("invalid scenario: {0}")]
    Validation(String),
}

/// How agents move between control evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// Single-integrator Euler steps.
    #[default]
    Integrator,
    /// Differential-drive robots tracking waypoints.
    Waypoint,
}

/// A loaded and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SimConfig,
    pub mode: RunMode,
    pub drive: DriveParams,
    /// Legal but suspicious settings, e.g. an agent without a guaranteed
    /// sensing region.
    pub warnings: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    region: RawRegion,
    #[serde(default)]
    agents: Vec<RawAgent>,
    random_agents: Option<RawRandomAgents>,
    phi: Option<RawPhi>,
    #[serde(default)]
    sim: RawSim,
    #[serde(default)]
    drive: RawDrive,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    id: Option<u32>,
    position: [f64; 2],
    r_u: f64,
    r_s: f64,
    sensing_r_u: Option<f64>,
    heading: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRandomAgents {
    count: usize,
    r_u: f64,
    r_s: f64,
    /// Extra clearance between uncertainty disks.
    #[serde(default)]
    min_gap: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhi {
    uniform: Option<f64>,
    grid: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    law: Option<LawName>,
    mode: Option<RunMode>,
    dt: Option<f64>,
    alpha: Option<f64>,
    max_steps: Option<usize>,
    conv_tol: Option<f64>,
    eps_arc: Option<f64>,
    eps_probe: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    d_t: Option<f64>,
    v_max: Option<f64>,
    omega_max: Option<f64>,
    max_periods_per_target: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LawName {
    Optimal,
    Suboptimal,
}

impl From<LawName> for ControlLaw {
    fn from(l: LawName) -> Self {
        match l {
            LawName::Optimal => ControlLaw::Optimal,
            LawName::Suboptimal => ControlLaw::Suboptimal,
        }
    }
}

/// Reads, parses and validates a scenario file. Relative paths inside it are
/// resolved against the file's directory.
pub fn load_config(path: &Path) -> Result<Scenario, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario(&text, path, base)
}

/// Parses scenario text; `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &Path, base: &Path) -> Result<Scenario, ConfigError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s));
        ConfigError::Parse { path: origin.to_owned(), line, column, message: e.message().trim().to_owned() }
    })?;
    build(raw, base)
}

fn line_col(text: &str, span: Range<usize>) -> (usize, usize) {
    let before = &text[..span.start.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

fn build(raw: RawScenario, base: &Path) -> Result<Scenario, ConfigError> {
    let vertices: Vec<Point2> = raw.region.vertices.iter().map(|&[x, y]| Point2::new(x, y)).collect();
    let region = ConvexPolygon::new(vertices).map_err(|e| match e {
        gvcover_core::Error::NotConvex(_) => invalid("region not convex"),
        other => invalid(format!("region: {other}")),
    })?;

    let mut warnings = Vec::new();
    let mut agents = Vec::new();
    let mut headings = Vec::new();
    for (k, a) in raw.agents.iter().enumerate() {
        let id = a.id.unwrap_or(k as u32);
        let mut agent = Agent::new(id, Point2::new(a.position[0], a.position[1]), a.r_u, a.r_s);
        agent.sensing_r_u = a.sensing_r_u;
        agents.push(agent);
        headings.push(a.heading);
    }
    let seed = raw.sim.seed.unwrap_or(0);
    if let Some(r) = &raw.random_agents {
        let first_id = agents.iter().map(|a| a.id.0 + 1).max().unwrap_or(0);
        let placed = place_random(&region, &agents, r, first_id, seed)?;
        headings.extend(placed.iter().map(|_| None));
        agents.extend(placed);
    }
    validate_agents(&region, &agents, &mut warnings)?;

    let drive_headings = match headings.iter().filter(|h| h.is_some()).count() {
        0 => None,
        n if n == agents.len() => Some(headings.iter().map(|h| h.unwrap_or_default()).collect()),
        _ => return Err(invalid("either every agent or no agent must have a heading")),
    };

    let phi = match raw.phi {
        None => ScalarField::Uniform(1.0),
        Some(RawPhi { uniform: Some(v), grid: None }) => {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid("phi.uniform must be finite and non-negative"));
            }
            ScalarField::Uniform(v)
        }
        Some(RawPhi { uniform: None, grid: Some(file) }) => ScalarField::Grid(load_grid(&base.join(file))?),
        Some(_) => return Err(invalid("phi needs exactly one of `uniform` or `grid`")),
    };

    let mut config = SimConfig::new(region, agents);
    config.phi = phi;
    let s = &raw.sim;
    config.law = s.law.map(Into::into).unwrap_or_default();
    config.dt = s.dt.unwrap_or(config.dt);
    config.alpha = s.alpha.unwrap_or(config.alpha);
    config.max_steps = s.max_steps.unwrap_or(config.max_steps);
    config.conv_tol = s.conv_tol.unwrap_or(config.conv_tol);
    config.eps_arc = s.eps_arc.unwrap_or(config.eps_arc);
    config.eps_probe = s.eps_probe.unwrap_or(config.eps_probe);
    config.seed = seed;
    config.validate().map_err(|e| invalid(e.to_string()))?;

    let defaults = DriveParams::default();
    let drive = DriveParams {
        d_t: raw.drive.d_t.unwrap_or(defaults.d_t),
        v_max: raw.drive.v_max.unwrap_or(defaults.v_max),
        omega_max: raw.drive.omega_max.unwrap_or(defaults.omega_max),
        headings: drive_headings,
        max_periods_per_target: raw.drive.max_periods_per_target.unwrap_or(defaults.max_periods_per_target),
    };
    if !(drive.d_t > 0.0) || !(drive.v_max > 0.0) || !(drive.omega_max > 0.0) || drive.max_periods_per_target == 0 {
        return Err(invalid("drive parameters must be positive"));
    }
    Ok(Scenario { config, mode: s.mode.unwrap_or_default(), drive, warnings })
}

fn validate_agents(region: &ConvexPolygon, agents: &[Agent], warnings: &mut Vec<String>) -> Result<(), ConfigError> {
    if agents.is_empty() {
        return Err(invalid("at least one agent is required"));
    }
    for (k, a) in agents.iter().enumerate() {
        if agents[..k].iter().any(|b| b.id == a.id) {
            return Err(invalid(format!("duplicate agent id {}", a.id)));
        }
        if !a.q.is_finite() || !(a.r_u >= 0.0) || !a.r_u.is_finite() || !(a.r_s > 0.0) || !a.r_s.is_finite() {
            return Err(invalid(format!("agent {}: needs a finite position, r_u >= 0 and r_s > 0", a.id)));
        }
        if a.sensing_r_u.is_some_and(|r| !(r >= 0.0)) {
            return Err(invalid(format!("agent {}: sensing_r_u must be >= 0", a.id)));
        }
        let admissible = region
            .minkowski_erode(a.r_u)
            .map_err(|_| invalid(format!("agent {}: uncertainty radius {} does not fit in the region", a.id, a.r_u)))?;
        if admissible.max_edge_distance(a.q) > 1e-9 {
            return Err(invalid(format!("agent {}: uncertainty disk not inside the region", a.id)));
        }
        if a.sensing_r_u.unwrap_or(a.r_u) > a.r_s {
            warnings.push(format!("agent {}: r_u exceeds r_s, so its guaranteed sensing region is empty", a.id));
        }
        for b in &agents[..k] {
            if a.q.distance(b.q) <= a.r_u + b.r_u {
                warnings.push(format!("agents {} and {}: uncertainty disks overlap, both cells start empty", b.id, a.id));
            }
        }
    }
    Ok(())
}

fn place_random(
    region: &ConvexPolygon,
    existing: &[Agent],
    spec: &RawRandomAgents,
    first_id: u32,
    seed: u64,
) -> Result<Vec<Agent>, ConfigError> {
    if !(spec.r_u >= 0.0) || !(spec.r_s > 0.0) || !(spec.min_gap >= 0.0) {
        return Err(invalid("random_agents: needs r_u >= 0, r_s > 0, min_gap >= 0"));
    }
    let admissible = region
        .minkowski_erode(spec.r_u)
        .map_err(|_| invalid("random_agents: uncertainty radius does not fit in the region"))?;
    let v = admissible.vertices();
    let (x0, x1) = v.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    let (y0, y1) = v.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed: Vec<Agent> = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    while placed.len() < spec.count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(invalid("random_agents: could not place the agents without overlap"));
        }
        let q = Point2::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1));
        if admissible.max_edge_distance(q) > 0.0 {
            continue;
        }
        let clear = existing
            .iter()
            .chain(&placed)
            .all(|b| q.distance(b.q) > spec.r_u + b.r_u + spec.min_gap);
        if clear {
            placed.push(Agent { id: AgentId(first_id + placed.len() as u32), ..Agent::new(0, q, spec.r_u, spec.r_s) });
        }
    }
    Ok(placed)
}

/// Reads a density grid: a header line `origin_x,origin_y,cell_size`, one
/// line with those three values, then one line per grid row starting at
/// `y = origin_y` and moving up by `cell_size`.
pub fn load_grid(path: &Path) -> Result<GridField, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_grid(&text, path)
}

pub fn parse_grid(text: &str, origin: &Path) -> Result<GridField, ConfigError> {
    let parse_err = |line: usize, message: String| ConfigError::Parse { path: origin.to_owned(), line, column: 1, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["origin_x", "origin_y", "cell_size"] {
        return Err(parse_err(1, "expected header `origin_x,origin_y,cell_size`".into()));
    }
    let mut numbers = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| parse_err(line, format!("`{f}`: {e}"))))
            .collect::<Result<Vec<f64>, _>>()?;
        numbers.push((line, row));
    }
    let Some((line, meta)) = numbers.first() else {
        return Err(parse_err(2, "missing origin_x,origin_y,cell_size values".into()));
    };
    let &[ox, oy, h] = meta.as_slice() else {
        return Err(parse_err(*line, "expected three values".into()));
    };
    let rows = numbers.into_iter().skip(1).map(|(_, r)| r).collect();
    GridField::new(Point2::new(ox, oy), h, rows).map_err(|e| invalid(format!("density grid: {e}")))
}
