//! End-to-end tests of the command-line surface: flags, file outputs and the
//! exit-code contract (0 success, 2 input/schema, 3 statistical
//! precondition, 4 I/O).

use std::path::Path;
use std::process::{Command, Output};

fn loomsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loomsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("LOOMSIM_OUT")
        .output()
        .expect("binary runs")
}

fn assert_code(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn simulate_writes_episode_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = loomsim(
        &["simulate", "--seed", "3", "--n-episodes", "2", "--out", "run"],
        dir.path(),
    );
    assert_code(&out, 0);
    let run = dir.path().join("run");
    assert!(run.join("manifest.json").is_file());
    assert!(run.join("episode_000/switches.csv").is_file());
    assert!(run.join("episode_001/switches.csv").is_file());
    assert!(run.join("episode_000/a000.csv").is_file());

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 3);
    assert!(manifest["outputs"].as_array().unwrap().len() > 2);

    // Episodes differ (independent sub-seeds).
    let a = std::fs::read(run.join("episode_000/a000.csv")).unwrap();
    let b = std::fs::read(run.join("episode_001/a000.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn simulate_zero_episodes_writes_manifest_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = loomsim(
        &["simulate", "--seed", "1", "--n-episodes", "0", "--out", "empty"],
        dir.path(),
    );
    assert_code(&out, 0);
    let entries: Vec<_> = std::fs::read_dir(dir.path().join("empty"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries, vec![std::ffi::OsString::from("manifest.json")]);
}

#[test]
fn default_ensemble_contains_followers() {
    // At the reference arrival rate, pairs form and at least one agent runs
    // a follow phase.
    let dir = tempfile::tempdir().unwrap();
    let out = loomsim(&["simulate", "--seed", "7", "--out", "run"], dir.path());
    assert_code(&out, 0);
    let switches =
        std::fs::read_to_string(dir.path().join("run/episode_000/switches.csv")).unwrap();
    assert!(
        switches.contains("follow"),
        "no follow phase in switch log"
    );
}

#[test]
fn malformed_scenario_is_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"schema_version\": 99}").unwrap();
    let out = loomsim(
        &["simulate", "--scenario", "bad.json", "--out", "x"],
        dir.path(),
    );
    assert_code(&out, 2);
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = loomsim(
        &["simulate", "--scenario", "nope.json", "--out", "x"],
        dir.path(),
    );
    assert_code(&out, 4);
}

#[test]
fn small_ensemble_is_statistical_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("one.csv"),
        "t,x,y\n0.0,0.0,0.0\n0.01,0.1,0.0\n0.02,0.2,0.0\n0.03,0.3,0.0\n0.04,0.4,0.0\n",
    )
    .unwrap();
    let out = loomsim(&["stats", "one.csv", "--out", "x"], dir.path());
    assert_code(&out, 3);
}

#[test]
fn unwritable_out_dir_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    // A file where the out directory should be.
    std::fs::write(dir.path().join("blocked"), "x").unwrap();
    let out = loomsim(
        &["simulate", "--seed", "1", "--out", "blocked"],
        dir.path(),
    );
    assert_code(&out, 4);
}

#[test]
fn emergence_with_too_few_arrivals_fails_statistically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("times.csv"), "t\n1.0\n2.0\n3.0\n").unwrap();
    let out = loomsim(
        &["emergence", "--times", "times.csv", "--out", "x"],
        dir.path(),
    );
    assert_code(&out, 3);
}

#[test]
fn emergence_uniform_grid_passes_with_small_statistic() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t\n");
    for i in 0..50 {
        csv.push_str(&format!("{}\n", 100.0 * (i + 1) as f64 / 51.0));
    }
    std::fs::write(dir.path().join("grid.csv"), csv).unwrap();
    let out = loomsim(
        &[
            "emergence",
            "--times",
            "grid.csv",
            "--window-len",
            "20",
            "--out",
            "em",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("em/ks_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["pass_5pct"], true);
    assert!(report["statistic"].as_f64().unwrap() < 0.05);
    assert!(dir.path().join("em/rate_curve.csv").is_file());
    assert!(dir.path().join("em/interval_probabilities.csv").is_file());
}

#[test]
fn emergence_reference_rate_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let out = loomsim(
        &[
            "emergence", "--rate", "0.961", "--window", "0", "200", "--seed", "1", "--out", "em",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let probs =
        std::fs::read_to_string(dir.path().join("em/interval_probabilities.csv")).unwrap();
    let row = probs.lines().nth(1).unwrap();
    let vals: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
    assert!((vals[1] - 0.3825).abs() < 1e-4);
    assert!((vals[2] - 0.3676).abs() < 1e-4);
    assert!((vals[3] - 0.2499).abs() < 1e-4);
}

#[test]
fn classify_pair_mode_and_chain_counts() {
    let dir = tempfile::tempdir().unwrap();
    // Three straight tracks in a chain, 0.3 s (about 3 m) apart.
    for (name, emergence, x0) in [("a", 0.0, 6.0), ("b", 0.3, 3.0), ("c", 0.6, 0.0)] {
        let mut csv = String::from("t,x,y\n");
        for i in 0..300 {
            let t = emergence + i as f64 / 131.5;
            csv.push_str(&format!("{},{},0.0\n", t, x0 + 10.17 * (t - emergence)));
        }
        std::fs::write(dir.path().join(format!("{name}.csv")), csv).unwrap();
    }

    // Auto-pairing over the chain: roles C2/C3/C4.
    let out = loomsim(
        &["classify", "a.csv", "b.csv", "c.csv", "--out", "auto"],
        dir.path(),
    );
    assert_code(&out, 0);
    let counts =
        std::fs::read_to_string(dir.path().join("auto/role_counts.csv")).unwrap();
    assert_eq!(counts.lines().nth(1).unwrap(), "0,1,1,1");

    // Explicit pair mode classifies and writes the angle series.
    let out = loomsim(
        &["classify", "--pair", "a.csv", "b.csv", "--out", "pair"],
        dir.path(),
    );
    assert_code(&out, 0);
    let pursuit = std::fs::read_to_string(dir.path().join("pair/pursuit.csv")).unwrap();
    assert_eq!(pursuit.lines().count(), 2);
    assert!(dir.path().join("pair/angles_000.csv").is_file());

    // A lone track has no pairs: every pursuit row empty, role C1.
    let out = loomsim(&["classify", "a.csv", "--out", "lone"], dir.path());
    assert_code(&out, 0);
    let pursuit = std::fs::read_to_string(dir.path().join("lone/pursuit.csv")).unwrap();
    assert_eq!(pursuit.lines().count(), 1, "header only");
    let counts =
        std::fs::read_to_string(dir.path().join("lone/role_counts.csv")).unwrap();
    assert_eq!(counts.lines().nth(1).unwrap(), "1,0,0,0");

    // Far-separated tracks in pair mode: no qualifying pair.
    let mut csv = String::from("t,x,y\n");
    for i in 0..300 {
        let t = 0.3 + i as f64 / 131.5;
        csv.push_str(&format!("{},{},15.0\n", t, 10.17 * (t - 0.3)));
    }
    std::fs::write(dir.path().join("far.csv"), csv).unwrap();
    let out = loomsim(
        &["classify", "--pair", "a.csv", "far.csv", "--out", "none"],
        dir.path(),
    );
    assert_code(&out, 3);
}

#[test]
fn classify_recovers_pursuit_laws_from_track_files() {
    // Synthesized pursuit pairs written to CSV and re-ingested (frames are
    // rebuilt by finite differences) still classify as their law.
    use loomsim_core::kinematics::VehicleState;
    use loomsim_core::synth::{synthesize_pair, PairLaw};
    use nalgebra::Vector2;

    let dir = tempfile::tempdir().unwrap();
    let east = |x: f64, y: f64| {
        VehicleState::new(Vector2::new(x, y), Vector2::new(1.0, 0.0), 10.17).unwrap()
    };
    let setpoint: f64 = 0.3;
    let fixtures: Vec<(&str, _, f64, PairLaw, f64)> = vec![
        ("classical", east(6.0, 3.0), 0.0, PairLaw::ClassicalPursuit { k: 2.0 }, 6.0),
        (
            "constant_bearing",
            east(7.0 * setpoint.cos(), 7.0 * setpoint.sin()),
            0.0,
            PairLaw::ConstantBearing { k: 2.0, setpoint },
            6.0,
        ),
        ("motion_camouflage", east(5.0, 5.5), 0.05, PairLaw::MotionCamouflage { k: 3.0 }, 3.0),
    ];
    for (name, leader0, u_l, law, duration) in fixtures {
        let (leader, follower) =
            synthesize_pair(leader0, |_| u_l, east(0.0, 0.0), law, 1.0 / 131.5, duration)
                .unwrap();
        for (tag, traj) in [("leader", &leader), ("follower", &follower)] {
            let mut csv = String::from("t,x,y\n");
            for s in &traj.samples {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    s.time, s.state.position.x, s.state.position.y
                ));
            }
            std::fs::write(dir.path().join(format!("{name}_{tag}.csv")), csv).unwrap();
        }
        let out = loomsim(
            &[
                "classify",
                "--pair",
                &format!("{name}_leader.csv"),
                &format!("{name}_follower.csv"),
                "--out",
                name,
            ],
            dir.path(),
        );
        assert_code(&out, 0);
        let pursuit =
            std::fs::read_to_string(dir.path().join(name).join("pursuit.csv")).unwrap();
        let row = pursuit.lines().nth(1).unwrap();
        assert!(
            row.split(',').any(|field| field == name),
            "fixture {name} misclassified: {row}"
        );
    }
}

#[test]
fn out_dir_env_variable_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_loomsim"))
        .args(["simulate", "--seed", "1", "--n-episodes", "0"])
        .current_dir(dir.path())
        .env("LOOMSIM_OUT", "env-out")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("env-out/manifest.json").is_file());
}
