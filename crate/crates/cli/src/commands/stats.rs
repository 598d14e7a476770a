//! `loomsim stats`: arc-length path statistics over a track ensemble.

use std::path::PathBuf;

use clap::Args;
use loomsim_core::analysis::{ensemble_stats, smooth};
use loomsim_core::error::Result;
use loomsim_core::io as core_io;
use loomsim_core::kinematics::Trajectory;
use loomsim_core::strategy::Scenario;
use loomsim_core::svg::render_stats;
use serde::Serialize;

use crate::util::{collect_csv_paths, resolve_out_dir, write_atomic, RunManifest};

#[derive(Args)]
pub struct StatsArgs {
    /// Track CSV files or directories of them (columns t, x, y[, agent_id]).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Arc-length resampling step in meters.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Cubic smoothing-spline factor in [0, 1]; 1 interpolates.
    #[arg(long, default_value_t = 0.85)]
    pub smooth: f64,
    /// Scenario JSON to draw under the statistics in the SVG.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output directory (default: $LOOMSIM_OUT or ./loomsim-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct StatsManifestConfig {
    inputs: Vec<String>,
    step: f64,
    smooth: f64,
}

/// Load, smooth and pool all tracks from the input set.
pub fn load_tracks(paths: &[PathBuf], smoothing: f64) -> Result<Vec<Trajectory>> {
    let mut tracks = Vec::new();
    for path in paths {
        let fallback = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "track".into());
        let file = std::fs::File::open(path)?;
        for track in core_io::read_trajectories_csv(file, &fallback)? {
            tracks.push(smooth(&track, smoothing)?);
        }
    }
    Ok(tracks)
}

pub fn run(args: StatsArgs) -> Result<()> {
    let paths = collect_csv_paths(&args.inputs)?;
    let tracks = load_tracks(&paths, args.smooth)?;
    let stats = ensemble_stats(&tracks, args.step)?;

    let scenario = match &args.scenario {
        Some(path) => Some(Scenario::from_json(&std::fs::read_to_string(path)?)?),
        None => None,
    };

    let out_dir = resolve_out_dir(args.out)?;
    let mut manifest = RunManifest::new(
        "stats",
        None,
        StatsManifestConfig {
            inputs: paths.iter().map(|p| p.display().to_string()).collect(),
            step: args.step,
            smooth: args.smooth,
        },
    );

    let mut buf = Vec::new();
    core_io::write_stats_csv(&mut buf, &stats)?;
    write_atomic(&out_dir.join("stats.csv"), &buf)?;
    manifest.outputs.push("stats.csv".into());

    let svg = render_stats(&stats, scenario.as_ref());
    write_atomic(&out_dir.join("stats.svg"), svg.as_bytes())?;
    manifest.outputs.push("stats.svg".into());

    manifest.write(&out_dir)?;
    println!(
        "{} tracks, {} arc samples -> {}",
        tracks.len(),
        stats.arc_positions.len(),
        out_dir.display()
    );
    Ok(())
}
