//! `loomsim simulate`: synthesize trajectory ensembles.

use std::path::PathBuf;

use clap::Args;
use loomsim_core::error::Result;
use loomsim_core::rng::derive_seed;
use loomsim_core::strategy::{run_episode, EpisodeConfig, Scenario};
use loomsim_core::io as core_io;
use serde::Serialize;

use crate::util::{resolve_out_dir, write_atomic, RunManifest};

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario JSON (defaults to the built-in corridor).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Episode config JSON (defaults to the built-in configuration).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config's rng_seed. Episode e runs with a
    /// sub-seed derived from (seed, e).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of episodes to run.
    #[arg(long, default_value_t = 1)]
    pub n_episodes: u32,
    /// Output directory (default: $LOOMSIM_OUT or ./loomsim-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimulateManifestConfig {
    scenario: Scenario,
    episode: EpisodeConfig,
    n_episodes: u32,
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let scenario = match &args.scenario {
        Some(path) => Scenario::from_json(&std::fs::read_to_string(path)?)?,
        None => Scenario::default_corridor(),
    };
    let mut config = match &args.config {
        Some(path) => EpisodeConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => EpisodeConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
    }
    let master_seed = config.rng_seed;
    let out_dir = resolve_out_dir(args.out)?;

    let mut manifest = RunManifest::new(
        "simulate",
        Some(master_seed),
        SimulateManifestConfig {
            scenario: scenario.clone(),
            episode: config.clone(),
            n_episodes: args.n_episodes,
        },
    );

    for episode in 0..args.n_episodes {
        let mut episode_config = config.clone();
        episode_config.rng_seed = derive_seed(master_seed, episode as u64);
        let output = run_episode(&scenario, &episode_config)?;

        let episode_dir = out_dir.join(format!("episode_{episode:03}"));
        for record in &output.records {
            let mut buf = Vec::new();
            core_io::write_agent_csv(&mut buf, record)?;
            let name = format!("{}.csv", record.trajectory.agent_id);
            write_atomic(&episode_dir.join(&name), &buf)?;
            manifest
                .outputs
                .push(format!("episode_{episode:03}/{name}"));
        }
        let mut buf = Vec::new();
        core_io::write_switches_csv(&mut buf, &output.records)?;
        write_atomic(&episode_dir.join("switches.csv"), &buf)?;
        manifest
            .outputs
            .push(format!("episode_{episode:03}/switches.csv"));

        println!(
            "episode {episode}: {} agents (seed {})",
            output.records.len(),
            episode_config.rng_seed
        );
    }

    manifest.write(&out_dir)?;
    println!("wrote {}", out_dir.join("manifest.json").display());
    Ok(())
}
