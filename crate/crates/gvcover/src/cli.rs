//! Command line interface.
//!
//! Exit codes: 0 on success, 1 for unusable arguments or scenario files,
//! 2 when the simulation or output emission fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gvcover_core::{ControlLaw, SimState};

use crate::config::{load_config, RunMode, Scenario};
use crate::emit::{emit, law_name, write_comparison, Snapshot, COMPARISON_FILE};
use crate::{execute, mode_name};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "gvcover", version, about = "Guaranteed Voronoi coverage control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LawArg {
    Optimal,
    Suboptimal,
}

impl From<LawArg> for ControlLaw {
    fn from(l: LawArg) -> Self {
        match l {
            LawArg::Optimal => ControlLaw::Optimal,
            LawArg::Suboptimal => ControlLaw::Suboptimal,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scenario and write its outputs.
    Run {
        config: PathBuf,
        /// Overrides the law in the scenario file.
        #[arg(long, value_enum)]
        law: Option<LawArg>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Comma-separated step numbers to draw; `final` is the last step.
        #[arg(long, value_delimiter = ',', default_value = "0,final")]
        snapshots: Vec<Snapshot>,
        /// Drive differential-drive robots through waypoints instead of
        /// integrating the control directly.
        #[arg(long)]
        waypoint: bool,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Simulate both laws and write their coverage series side by side.
    Compare {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Check a scenario file without simulating.
    Validate { config: PathBuf },
}

enum Failure {
    Config(String),
    Runtime(String),
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run { config, law, out, snapshots, waypoint, max_steps } => {
            cmd_run(&config, law, &out, &snapshots, waypoint, max_steps)
        }
        Command::Compare { config, out, max_steps } => cmd_compare(&config, &out, max_steps),
        Command::Validate { config } => cmd_validate(&config),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn load(path: &Path, max_steps: Option<usize>) -> Result<Scenario, Failure> {
    let mut scenario = load_config(path).map_err(|e| Failure::Config(e.to_string()))?;
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(n) = max_steps {
        if n == 0 {
            return Err(Failure::Config("--max-steps must be at least 1".into()));
        }
        scenario.config.max_steps = n;
    }
    Ok(scenario)
}

fn timed(scenario: &Scenario) -> Result<(SimState, std::time::Duration), Failure> {
    let start = Instant::now();
    let state = execute(scenario).map_err(|e| Failure::Runtime(format!("simulation failed: {e}")))?;
    Ok((state, start.elapsed()))
}

fn report(label: &str, state: &SimState) {
    println!(
        "{label}: {} steps, {}, H = {:.6} ({:.2}% of {:.6})",
        state.step,
        if state.converged { "converged" } else { "step limit reached" },
        state.report.total,
        100.0 * state.report.fraction,
        state.report.h_max,
    );
}

fn cmd_run(
    path: &Path,
    law: Option<LawArg>,
    out: &Path,
    snapshots: &[Snapshot],
    waypoint: bool,
    max_steps: Option<usize>,
) -> Result<(), Failure> {
    let mut scenario = load(path, max_steps)?;
    if let Some(law) = law {
        scenario.config.law = law.into();
    }
    if waypoint {
        scenario.mode = RunMode::Waypoint;
    }
    let (state, wall) = timed(&scenario)?;
    let outputs = emit(&state, &scenario.config, mode_name(scenario.mode), out, snapshots, wall)
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    report(law_name(scenario.config.law), &state);
    println!("wrote {} and {} snapshot(s) to {}", outputs.trajectory.display(), outputs.snapshots.len(), out.display());
    Ok(())
}

fn cmd_compare(path: &Path, out: &Path, max_steps: Option<usize>) -> Result<(), Failure> {
    let base = load(path, max_steps)?;
    let laws = [ControlLaw::Optimal, ControlLaw::Suboptimal];
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = laws
            .iter()
            .map(|&law| {
                let mut scenario = base.clone();
                scenario.config.law = law;
                s.spawn(move || timed(&scenario).map(|r| (scenario, r)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let mut runs = Vec::new();
    for r in results {
        let (scenario, (state, wall)) = r?;
        let dir = out.join(law_name(scenario.config.law));
        emit(&state, &scenario.config, mode_name(scenario.mode), &dir, &[Snapshot::Step(0), Snapshot::Final], wall)
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        report(law_name(scenario.config.law), &state);
        runs.push((scenario.config.law, state));
    }
    let refs: Vec<_> = runs.iter().map(|(law, s)| (*law, s)).collect();
    let file = out.join(COMPARISON_FILE);
    write_comparison(&refs, &file).map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("wrote {}", file.display());
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let scenario = load(path, None)?;
    let state = SimState::new(&scenario.config).map_err(|e| Failure::Config(e.to_string()))?;
    println!(
        "{}: {} agents, law {}, mode {}, initial H = {:.6} ({:.2}% of {:.6})",
        path.display(),
        state.agents.len(),
        law_name(scenario.config.law),
        mode_name(scenario.mode),
        state.report.total,
        100.0 * state.report.fraction,
        state.report.h_max,
    );
    Ok(())
}
