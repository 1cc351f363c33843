//! Time-stepped simulation: partition, control, containment, integration.
//!
//! All controls of a step are computed from the partition at the start of
//! the step and applied together. After the Euler update each position is
//! projected back onto its admissible region, which only acts when a step
//! would overshoot an edge; the recorded velocity is the one actually
//! realized.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::agents::{Agent, AgentId, Velocity};
use crate::control::{constrain, optimal_law, suboptimal_law, ControlGains};
use crate::geometry::{ConvexPolygon, Point2, Tolerances};
use crate::objective::{coverage, CoverageReport, ScalarField};
use crate::partition::{build_partition, Partition};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ControlLaw {
    #[default]
    Optimal,
    Suboptimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub region: ConvexPolygon,
    pub agents: Vec<Agent>,
    pub phi: ScalarField,
    pub law: ControlLaw,
    /// Integration step, s.
    pub dt: f64,
    pub alpha: f64,
    pub max_steps: usize,
    /// The run stops once every realized speed is below this, m/s.
    pub conv_tol: f64,
    pub eps_arc: f64,
    pub eps_probe: f64,
    /// Recorded for reproducibility of generated scenarios; the engine itself
    /// is deterministic.
    pub seed: u64,
}

impl SimConfig {
    /// Configuration with default parameters.
    pub fn new(region: ConvexPolygon, agents: Vec<Agent>) -> Self {
        Self {
            region,
            agents,
            phi: ScalarField::Uniform(1.0),
            law: ControlLaw::Optimal,
            dt: 0.01,
            alpha: 1.0,
            max_steps: 20_000,
            conv_tol: 1e-4,
            eps_arc: 1e-3,
            eps_probe: 1e-6,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be positive"));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidParameter("max_steps must be at least 1"));
        }
        if !(self.conv_tol >= 0.0) {
            return Err(Error::InvalidParameter("conv_tol must be non-negative"));
        }
        if !(self.alpha > 0.0) || !(self.eps_arc > 0.0) || !(self.eps_probe > 0.0) {
            return Err(Error::InvalidParameter("alpha, eps_arc and eps_probe must be positive"));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::with_arc(self.eps_arc)
    }

    pub fn gains(&self) -> ControlGains {
        ControlGains { alpha: self.alpha, epsilon_probe: self.eps_probe }
    }
}

/// State after one step, or the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    /// Positions in agent order.
    pub positions: Vec<Point2>,
    /// Realized velocities over the step that led here, in agent order.
    pub controls: Vec<Velocity>,
    pub h: f64,
    pub fraction: f64,
    pub two_hop: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: usize,
    pub t: f64,
    pub agents: Vec<Agent>,
    pub partition: Partition,
    pub report: CoverageReport,
    /// Admissible region of each agent: the region eroded by its uncertainty.
    pub omega_s: Vec<ConvexPolygon>,
    pub initial: StepRecord,
    /// One record per completed step.
    pub history: Vec<StepRecord>,
    pub converged: bool,
}

impl SimState {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let tol = config.tolerances();
        let omega_s = config
            .agents
            .iter()
            .map(|a| config.region.minkowski_erode(a.r_u))
            .collect::<Result<Vec<_>>>()?;
        for (a, region) in config.agents.iter().zip(&omega_s) {
            if region.max_edge_distance(a.q) > crate::control::EDGE_SLACK {
                return Err(Error::OutsideRegion { x: a.q.x, y: a.q.y });
            }
        }
        let partition = build_partition(&config.agents, &config.region, &tol)?;
        let report = coverage(&partition, &config.phi, &tol);
        let initial = record(0, 0.0, &config.agents, alloc::vec![Velocity::ZERO; config.agents.len()], &partition, &report);
        Ok(Self {
            step: 0,
            t: 0.0,
            agents: config.agents.clone(),
            partition,
            report,
            omega_s,
            initial,
            history: Vec::new(),
            converged: false,
        })
    }

    /// H after each step, preceded by the initial value.
    pub fn h_series(&self) -> Vec<f64> {
        core::iter::once(self.initial.h).chain(self.history.iter().map(|r| r.h)).collect()
    }

    /// Moves every agent to `targets` (projected onto its admissible
    /// region), rebuilds the partition and appends a record.
    fn move_to(&mut self, targets: &[Point2], dt: f64, config: &SimConfig) -> Result<Vec<Velocity>> {
        let tol = config.tolerances();
        let mut realized = Vec::with_capacity(targets.len());
        for ((agent, region), &target) in self.agents.iter_mut().zip(&self.omega_s).zip(targets) {
            let q = if region.max_edge_distance(target) > 0.0 { region.project(target) } else { target };
            realized.push(Velocity((q - agent.q) / dt));
            agent.q = q;
        }
        self.partition = build_partition(&self.agents, &config.region, &tol)?;
        self.report = coverage(&self.partition, &config.phi, &tol);
        self.step += 1;
        self.t = self.step as f64 * config.dt;
        self.history
            .push(record(self.step, self.t, &self.agents, realized.clone(), &self.partition, &self.report));
        Ok(realized)
    }

    /// One synchronous Euler step; returns the realized velocities.
    pub fn advance(&mut self, config: &SimConfig) -> Result<Vec<Velocity>> {
        let u = controls(self, config)?;
        let targets: Vec<Point2> = self.agents.iter().zip(&u).map(|(a, v)| a.q + v.0 * config.dt).collect();
        self.move_to(&targets, config.dt, config)
    }
}

fn record(step: usize, t: f64, agents: &[Agent], controls: Vec<Velocity>, p: &Partition, r: &CoverageReport) -> StepRecord {
    StepRecord {
        step,
        t,
        positions: agents.iter().map(|a| a.q).collect(),
        controls,
        h: r.total,
        fraction: r.fraction,
        two_hop: p.neighbor_sets.two_hop.clone(),
    }
}

/// Constrained control of every agent for the current partition.
pub fn controls(state: &SimState, config: &SimConfig) -> Result<Vec<Velocity>> {
    let gains = config.gains();
    let tol = config.tolerances();
    state
        .agents
        .iter()
        .zip(&state.omega_s)
        .map(|(a, region)| {
            let u = match config.law {
                ControlLaw::Optimal => optimal_law(a.id, &state.partition, &config.phi, &gains, &tol)?,
                ControlLaw::Suboptimal => suboptimal_law(a.id, &state.partition, &config.phi, &gains, &tol)?,
            };
            constrain(a.id, u, a.q, region, &gains)
        })
        .collect()
}

/// Advances a copy of `state` by one step.
pub fn step(state: &SimState, config: &SimConfig) -> Result<SimState> {
    let mut next = state.clone();
    next.advance(config)?;
    Ok(next)
}

fn max_speed(u: &[Velocity]) -> f64 {
    u.iter().map(Velocity::norm).fold(0.0, f64::max)
}

/// Steps until every realized speed drops below `conv_tol` or `max_steps`
/// is reached.
pub fn run(config: &SimConfig) -> Result<SimState> {
    let mut state = SimState::new(config)?;
    while state.step < config.max_steps {
        let u = state.advance(config)?;
        if max_speed(&u) < config.conv_tol {
            state.converged = true;
            break;
        }
    }
    Ok(state)
}

/// Velocity pair for a differential-drive robot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveCommand {
    /// Translational velocity, m/s.
    pub v: f64,
    /// Rotational velocity, rad/s.
    pub omega: f64,
}

/// Wraps an angle to `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Steers a robot at `q` with heading `theta` toward `target`: the speed is
/// scaled by the cosine of the heading error and the turn rate by its sine,
/// each saturated. A target exactly behind the robot gives no turn.
pub fn diff_drive_command(q: Point2, theta: f64, target: Point2, dt: f64, v_max: f64, omega_max: f64) -> DriveCommand {
    let d = target - q;
    let dist = d.norm();
    if dist == 0.0 {
        return DriveCommand::default();
    }
    let d_theta = wrap_angle(d.angle() - theta);
    DriveCommand {
        v: (dist / dt).min(v_max) * d_theta.cos(),
        omega: (d_theta.abs() / dt).min(omega_max) * d_theta.sin(),
    }
}

/// Exact unicycle motion under a constant command for `dt`.
pub fn unicycle(q: Point2, theta: f64, cmd: DriveCommand, dt: f64) -> (Point2, f64) {
    let turn = cmd.omega * dt;
    let q_next = if turn.abs() < 1e-9 {
        q + Point2::from_angle(theta + 0.5 * turn) * (cmd.v * dt)
    } else {
        let r = cmd.v / cmd.omega;
        q + Point2::new((theta + turn).sin() - theta.sin(), theta.cos() - (theta + turn).cos()) * r
    };
    (q_next, wrap_angle(theta + turn))
}

/// Parameters of the waypoint-tracking loop.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveParams {
    /// Robots count as arrived within this distance of their target, m.
    pub d_t: f64,
    pub v_max: f64,
    pub omega_max: f64,
    /// Initial headings in agent order; `None` points every robot at its
    /// first target.
    pub headings: Option<Vec<f64>>,
    /// Loop periods allowed for reaching one set of targets.
    pub max_periods_per_target: usize,
}

impl Default for DriveParams {
    fn default() -> Self {
        Self { d_t: 0.02, v_max: 0.3, omega_max: PI, headings: None, max_periods_per_target: 200 }
    }
}

/// Waypoint loop with unicycle robots: targets `q + u dt` are computed from
/// the control law, robots are driven toward them with
/// [`diff_drive_command`] at period `dt` until all are within `d_t`, then
/// new targets are computed. Every period is one recorded step. The run
/// converges when every new target is already within `d_t`.
pub fn waypoint_tracking_run(config: &SimConfig, drive: &DriveParams) -> Result<SimState> {
    if !(drive.d_t > 0.0) || !(drive.v_max > 0.0) || !(drive.omega_max > 0.0) {
        return Err(Error::InvalidParameter("d_t, v_max and omega_max must be positive"));
    }
    let mut state = SimState::new(config)?;
    let mut headings: Option<Vec<f64>> = drive.headings.clone();
    if headings.as_ref().is_some_and(|h| h.len() != state.agents.len()) {
        return Err(Error::InvalidParameter("one heading per agent required"));
    }
    'rounds: while state.step < config.max_steps {
        let u = controls(&state, config)?;
        let targets: Vec<Point2> = state
            .agents
            .iter()
            .zip(&u)
            .zip(&state.omega_s)
            .map(|((a, v), region)| region.project(a.q + v.0 * config.dt))
            .collect();
        let pending = |s: &SimState| s.agents.iter().zip(&targets).any(|(a, t)| a.q.distance(*t) > drive.d_t);
        if !pending(&state) {
            state.converged = true;
            break;
        }
        let theta = headings.get_or_insert_with(|| {
            state.agents.iter().zip(&targets).map(|(a, t)| (*t - a.q).angle()).collect()
        });
        for _ in 0..drive.max_periods_per_target {
            let mut next = Vec::with_capacity(targets.len());
            for (k, (a, &target)) in state.agents.iter().zip(&targets).enumerate() {
                if a.q.distance(target) <= drive.d_t {
                    next.push(a.q);
                    continue;
                }
                let cmd = diff_drive_command(a.q, theta[k], target, config.dt, drive.v_max, drive.omega_max);
                let (q, th) = unicycle(a.q, theta[k], cmd, config.dt);
                theta[k] = th;
                next.push(q);
            }
            state.move_to(&next, config.dt, config)?;
            if state.step >= config.max_steps {
                break 'rounds;
            }
            if !pending(&state) {
                break;
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, side, side).unwrap()
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(0.1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn drive_command_examples() {
        let q = Point2::new(1.0, 1.0);
        assert_eq!(diff_drive_command(q, 0.3, q, 0.1, 0.5, 1.0), DriveCommand::default());
        let ahead = diff_drive_command(q, 0.0, Point2::new(5.0, 1.0), 0.1, 0.5, 1.0);
        assert_eq!(ahead, DriveCommand { v: 0.5, omega: 0.0 });
        let behind = diff_drive_command(q, 0.0, Point2::new(-3.0, 1.0), 0.1, 0.5, 1.0);
        assert!((behind.v + 0.5).abs() < 1e-15 && behind.omega.abs() < 1e-15);
        let near = diff_drive_command(q, 0.0, Point2::new(1.01, 1.0), 0.1, 0.5, 1.0);
        assert!((near.v - 0.1).abs() < 1e-12);
        let left = diff_drive_command(q, 0.0, Point2::new(1.0, 3.0), 0.1, 0.5, 1.0);
        assert!(left.v.abs() < 1e-12 && (left.omega - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unicycle_straight_and_arc() {
        let (q, th) = unicycle(Point2::ZERO, 0.0, DriveCommand { v: 1.0, omega: 0.0 }, 0.5);
        assert_eq!((q, th), (Point2::new(0.5, 0.0), 0.0));
        // quarter circle of radius 1
        let (q, th) = unicycle(Point2::ZERO, 0.0, DriveCommand { v: PI / 2.0, omega: PI / 2.0 }, 1.0);
        assert!(q.distance(Point2::new(1.0, 1.0)) < 1e-12 && (th - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn resting_agent_stays_put() {
        let config = SimConfig::new(square(10.0), alloc::vec![Agent::new(0, Point2::new(5.0, 5.0), 0.1, 1.0)]);
        let s0 = SimState::new(&config).unwrap();
        let s1 = step(&s0, &config).unwrap();
        assert_eq!(s1.agents, s0.agents);
        assert_eq!(s1.history.len(), 1);
        assert!((s1.t - 0.01).abs() < 1e-15);
        let done = run(&config).unwrap();
        assert!(done.converged && done.step == 1);
        assert!((done.report.fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_agent_near_wall_converges() {
        let mut config = SimConfig::new(square(4.0), alloc::vec![Agent::new(0, Point2::new(0.5, 0.7), 0.2, 1.0)]);
        config.dt = 0.05;
        let s = run(&config).unwrap();
        assert!(s.converged);
        assert!(s.report.fraction > 0.999, "{}", s.report.fraction);
        for r in &s.history {
            let moved = r.controls[0].norm() * config.dt;
            assert!(moved <= 0.05 * 2.0 + 1e-12);
        }
    }

    #[test]
    fn starting_outside_admissible_region_is_an_error() {
        let config = SimConfig::new(square(4.0), alloc::vec![Agent::new(0, Point2::new(0.1, 2.0), 0.2, 1.0)]);
        assert!(matches!(SimState::new(&config), Err(Error::OutsideRegion { .. })));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut config = SimConfig::new(square(4.0), Vec::new());
        config.dt = 0.0;
        assert!(config.validate().is_err());
    }
}
