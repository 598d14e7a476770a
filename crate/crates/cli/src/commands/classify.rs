//! `loomsim classify`: leader/follower roles and pursuit-law tests.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use loomsim_core::analysis::{
    build_pairs, classify_pursuit, classify_roles, pair_metrics, pair_up, PairRecord,
    PairingParams,
};
use loomsim_core::error::{Error, Result};
use serde::Serialize;

use crate::commands::stats::load_tracks;
use crate::util::{collect_csv_paths, resolve_out_dir, write_atomic, RunManifest};

#[derive(Args)]
pub struct ClassifyArgs {
    /// Track CSV files or directories; pairs form by the co-visibility and
    /// separation criteria.
    #[arg(required_unless_present = "pair", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Explicit leader and follower CSV instead of auto-pairing.
    #[arg(long, num_args = 2, value_names = ["LEADER", "FOLLOWER"])]
    pub pair: Option<Vec<PathBuf>>,
    /// Maximum leader-follower separation in meters.
    #[arg(long, default_value_t = 10.0)]
    pub max_separation: f64,
    /// Minimum co-visibility in seconds (default: 20 frames at 131.5 Hz).
    #[arg(long, default_value_t = 20.0 / 131.5)]
    pub min_covisibility: f64,
    /// Classical-pursuit tolerance on mean |bearing| (radians).
    #[arg(long, default_value_t = 0.1)]
    pub tol_bearing: f64,
    /// Constant-bearing / camouflage tolerance on angle std (radians).
    #[arg(long, default_value_t = 0.1)]
    pub tol_std: f64,
    /// Cubic smoothing-spline factor applied before classification.
    #[arg(long, default_value_t = 0.85)]
    pub smooth: f64,
    /// Shared x range for per-pair route comparisons: start end (meters).
    #[arg(long, num_args = 2, value_names = ["START", "END"], default_values_t = [0.0, 12.0])]
    pub x_range: Vec<f64>,
    /// Output directory (default: $LOOMSIM_OUT or ./loomsim-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ClassifyManifestConfig {
    inputs: Vec<String>,
    pair_mode: bool,
    max_separation: f64,
    min_covisibility: f64,
    tol_bearing: f64,
    tol_std: f64,
    smooth: f64,
    x_range: (f64, f64),
}

fn write_angle_series(
    out_dir: &std::path::Path,
    index: usize,
    pair: &PairRecord,
    manifest_outputs: &mut Vec<String>,
) -> Result<()> {
    let mut text = String::from("t,baseline_angle,bearing_angle\n");
    for (t, baseline, bearing) in &pair.angle_series {
        let _ = writeln!(text, "{t},{baseline},{bearing}");
    }
    let name = format!("angles_{index:03}.csv");
    write_atomic(&out_dir.join(&name), text.as_bytes())?;
    manifest_outputs.push(name);
    Ok(())
}

pub fn run(args: ClassifyArgs) -> Result<()> {
    let params = PairingParams {
        max_separation: args.max_separation,
        min_covisibility: args.min_covisibility,
    };
    params.validate()?;

    let (tracks, pair_mode, input_names) = if let Some(pair_paths) = &args.pair {
        let names = pair_paths.iter().map(|p| p.display().to_string()).collect();
        (load_tracks(pair_paths, args.smooth)?, true, names)
    } else {
        let paths = collect_csv_paths(&args.inputs)?;
        let names = paths.iter().map(|p| p.display().to_string()).collect();
        (load_tracks(&paths, args.smooth)?, false, names)
    };

    let pairs: Vec<PairRecord> = if pair_mode {
        if tracks.len() != 2 {
            return Err(Error::Config(format!(
                "--pair expects exactly one track per file, got {} tracks",
                tracks.len()
            )));
        }
        match pair_up(&tracks[0], &tracks[1], &params) {
            Some(p) => vec![p],
            None => {
                return Err(Error::InsufficientData(
                    "given tracks do not satisfy the pairing criteria".into(),
                ))
            }
        }
    } else {
        build_pairs(&tracks, &params)
    };

    let out_dir = resolve_out_dir(args.out)?;
    let mut manifest = RunManifest::new(
        "classify",
        None,
        ClassifyManifestConfig {
            inputs: input_names,
            pair_mode,
            max_separation: args.max_separation,
            min_covisibility: args.min_covisibility,
            tol_bearing: args.tol_bearing,
            tol_std: args.tol_std,
            smooth: args.smooth,
            x_range: (args.x_range[0], args.x_range[1]),
        },
    );

    // Per-pair pursuit classification, with route-comparison metrics where
    // both tracks span the shared x range.
    let x_range = (args.x_range[0], args.x_range[1]);
    let mut pursuit_csv = String::from(
        "leader,follower,initial_distance,covis_start,covis_end,class,delta_mean_y,delta_route_length\n",
    );
    for (i, pair) in pairs.iter().enumerate() {
        let class = classify_pursuit(pair, args.tol_bearing, args.tol_std)?;
        let (delta_y, delta_len) = match pair_metrics(pair, x_range) {
            Ok(m) => (m.delta_mean_y.to_string(), m.delta_route_length.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        let _ = writeln!(
            pursuit_csv,
            "{},{},{},{},{},{},{},{}",
            pair.leader_traj.agent_id,
            pair.follower_traj.agent_id,
            pair.initial_distance,
            pair.covisibility.0,
            pair.covisibility.1,
            class.as_str(),
            delta_y,
            delta_len
        );
        println!(
            "pair {} -> {}: {}",
            pair.leader_traj.agent_id,
            pair.follower_traj.agent_id,
            class.as_str()
        );
        write_angle_series(&out_dir, i, pair, &mut manifest.outputs)?;
    }
    write_atomic(&out_dir.join("pursuit.csv"), pursuit_csv.as_bytes())?;
    manifest.outputs.push("pursuit.csv".into());

    // Role classes over the whole ensemble.
    let roles = classify_roles(&tracks, &params);
    let mut roles_csv = String::from("agent_id,class,group\n");
    for (id, class) in &roles.classes {
        let _ = writeln!(
            roles_csv,
            "{},{},{:?}",
            id,
            class.as_str(),
            class.group()
        );
    }
    write_atomic(&out_dir.join("roles.csv"), roles_csv.as_bytes())?;
    manifest.outputs.push("roles.csv".into());

    let counts_csv = format!(
        "C1,C2,C3,C4\n{},{},{},{}\n",
        roles.counts[0], roles.counts[1], roles.counts[2], roles.counts[3]
    );
    write_atomic(&out_dir.join("role_counts.csv"), counts_csv.as_bytes())?;
    manifest.outputs.push("role_counts.csv".into());

    manifest.write(&out_dir)?;
    println!(
        "{} pairs; roles C1={} C2={} C3={} C4={} -> {}",
        pairs.len(),
        roles.counts[0],
        roles.counts[1],
        roles.counts[2],
        roles.counts[3],
        out_dir.display()
    );
    Ok(())
}
