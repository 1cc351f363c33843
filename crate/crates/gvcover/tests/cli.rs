use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use gvcover::cli::{main_with_args, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};
use gvcover::emit::{read_comparison, read_h_series, read_trajectory, Snapshot};
use gvcover::{emit, execute, load_config};
use gvcover_core::SimState;

const SCENARIO: &str = "
[region]
vertices = [[0, 0], [6, 0], [7, 4], [1, 5]]

[[agents]]
position = [2.0, 2.0]
r_u = 0.1
r_s = 1.0

[[agents]]
position = [2.8, 2.2]
r_u = 0.2
r_s = 1.1

[sim]
dt = 0.02
max_steps = 150
";

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn cli(args: &[&str]) -> u8 {
    main_with_args(std::iter::once("gvcover").chain(args.iter().copied()))
}

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn run_writes_outputs_that_parse_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("out");
    let code = cli(&["run", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--snapshots", "0,10,final,9999"]);
    assert_eq!(code, EXIT_OK);

    let scenario = load_config(&config).unwrap();
    let state = execute(&scenario).unwrap();
    let traj = read_trajectory(&out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.len(), (state.step + 1) * state.agents.len());
    let records: Vec<_> = std::iter::once(&state.initial).chain(&state.history).collect();
    for (row, (rec, k)) in traj.iter().zip(records.iter().flat_map(|r| (0..r.positions.len()).map(move |k| (*r, k)))) {
        assert_eq!(row.step, rec.step);
        assert_eq!(row.t, rec.t);
        assert_eq!((row.x, row.y), (rec.positions[k].x, rec.positions[k].y));
        assert_eq!((row.ux, row.uy), (rec.controls[k].0.x, rec.controls[k].0.y));
        assert_eq!(row.id, state.agents[k].id.0);
    }
    let h = read_h_series(&out.join("h_series.csv")).unwrap();
    assert_eq!(h.iter().map(|r| r.h).collect::<Vec<_>>(), state.h_series());

    let mut svgs: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".svg"))
        .collect();
    svgs.sort();
    assert_eq!(svgs, ["snapshot_000000.svg".to_owned(), "snapshot_000010.svg".to_owned(), format!("snapshot_{:06}.svg", state.step)]);
    let svg = fs::read_to_string(out.join("snapshot_000000.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("#1f4fd1") && svg.contains("#d11f1f") && svg.contains("stroke=\"black\""));

    let summary: gvcover::Summary = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.steps, state.step);
    assert_eq!(summary.final_fraction, state.report.fraction);
}

#[test]
fn emission_is_repeatable_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = load_config(&write_scenario(dir.path(), "s.toml", SCENARIO)).unwrap();
    let state = execute(&scenario).unwrap();
    let snaps = [Snapshot::Step(0), Snapshot::Final];
    let a = emit(&state, &scenario.config, "integrator", &dir.path().join("a"), &snaps, Duration::from_millis(5)).unwrap();
    let b = emit(&state, &scenario.config, "integrator", &dir.path().join("b"), &snaps, Duration::from_millis(5)).unwrap();
    let files = |o: &gvcover::RunOutputs| {
        let mut v = vec![o.trajectory.clone(), o.h_series.clone(), o.summary_path.clone()];
        v.extend(o.snapshots.iter().cloned());
        v
    };
    for (x, y) in files(&a).iter().zip(files(&b).iter()) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn unstepped_state_emits_initial_rows_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = load_config(&write_scenario(dir.path(), "s.toml", SCENARIO)).unwrap();
    let state = SimState::new(&scenario.config).unwrap();
    let out = emit(&state, &scenario.config, "integrator", dir.path(), &[Snapshot::Final], Duration::ZERO).unwrap();
    let traj = fs::read_to_string(&out.trajectory).unwrap();
    assert_eq!(traj.lines().next(), Some("step,t,id,x,y,ux,uy"));
    assert_eq!(traj.lines().count(), 1 + state.agents.len());
    assert_eq!(fs::read_to_string(&out.h_series).unwrap().lines().count(), 2);
    assert_eq!(out.snapshots, [dir.path().join("snapshot_000000.svg")]);
}

#[test]
fn compare_writes_both_laws() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_scenario(dir.path(), "s.toml", SCENARIO);
    let out = dir.path().join("cmp");
    assert_eq!(cli(&["compare", config.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_OK);
    let rows = read_comparison(&out.join("compare.csv")).unwrap();
    for law in ["optimal", "suboptimal"] {
        assert!(rows.iter().any(|r| r.law == law && r.step == 0));
        assert!(out.join(law).join("trajectory.csv").exists());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_scenario(dir.path(), "good.toml", SCENARIO);
    let concave = write_scenario(dir.path(), "concave.toml", &SCENARIO.replace("[7, 4]", "[3, 1]"));
    let broken = write_scenario(dir.path(), "broken.toml", "[region\n");
    assert_eq!(cli(&["validate", good.to_str().unwrap()]), EXIT_OK);
    assert_eq!(cli(&["validate", concave.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(cli(&["validate", broken.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(cli(&["validate", dir.path().join("missing.toml").to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(cli(&["run", good.to_str().unwrap(), "--law", "greedy"]), EXIT_CONFIG);
    // output directory path occupied by a file
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    assert_eq!(cli(&["run", good.to_str().unwrap(), "--out", blocker.to_str().unwrap(), "--max-steps", "2"]), EXIT_RUNTIME);
}

#[test]
fn binary_validates_shipped_scenarios() {
    for name in ["case_study_1.toml", "case_study_2.toml", "experiment_1.toml", "experiment_2.toml"] {
        let status = Command::new(env!("CARGO_BIN_EXE_gvcover")).arg("validate").arg(shipped(name)).output().unwrap();
        assert!(status.status.success(), "{name}: {}", String::from_utf8_lossy(&status.stderr));
    }
    let status = Command::new(env!("CARGO_BIN_EXE_gvcover")).arg("validate").arg("/nonexistent.toml").status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn grid_density_and_waypoint_mode() {
    let dir = tempfile::tempdir().unwrap();
    let mut grid = String::from("origin_x,origin_y,cell_size\n0,0,1\n");
    for r in 0..6 {
        let row: Vec<String> = (0..8).map(|c| format!("{}", 1.0 + 0.25 * c as f64 + 0.1 * r as f64)).collect();
        grid.push_str(&row.join(","));
        grid.push('\n');
    }
    fs::write(dir.path().join("phi.csv"), grid).unwrap();
    let text = SCENARIO.replace("[sim]", "[phi]\ngrid = \"phi.csv\"\n\n[sim]\nmode = \"waypoint\"\nalpha = 3.0");
    let scenario = load_config(&write_scenario(dir.path(), "g.toml", &text)).unwrap();
    assert!(matches!(scenario.config.phi, gvcover_core::ScalarField::Grid(_)));
    assert_eq!(scenario.mode, gvcover::RunMode::Waypoint);
    let state = execute(&scenario).unwrap();
    assert!(state.report.fraction > state.initial.fraction);
    assert!(state.report.h_max > 0.0);
}
