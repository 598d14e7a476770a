//! `loomsim emergence`: arrival-process analysis.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use loomsim_core::emergence::{
    interval_probabilities, ks_test_poisson, sample_poisson, sliding_rate_series,
    EmergenceSequence,
};
use loomsim_core::error::{Error, Result};
use loomsim_core::io as core_io;
use serde::Serialize;

use crate::util::{resolve_out_dir, write_atomic, RunManifest};

#[derive(Args)]
pub struct EmergenceArgs {
    /// Emergence-time CSV (single column `t`). Mutually exclusive with
    /// --rate.
    #[arg(long, conflicts_with_all = ["rate", "window", "seed"])]
    pub times: Option<PathBuf>,
    /// Synthesize a sequence at this Poisson rate (1/s).
    #[arg(long, requires = "window")]
    pub rate: Option<f64>,
    /// Observation window for synthesis: start end (seconds).
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    pub window: Option<Vec<f64>>,
    /// Seed for synthesis.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sliding-window length for the rate curve (seconds).
    #[arg(long, default_value_t = 120.0)]
    pub window_len: f64,
    /// Stride between rate-curve samples (seconds).
    #[arg(long, default_value_t = 1.0)]
    pub stride: f64,
    /// Output directory (default: $LOOMSIM_OUT or ./loomsim-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EmergenceManifestConfig {
    times: Option<String>,
    rate: Option<f64>,
    window: Option<(f64, f64)>,
    window_len: f64,
    stride: f64,
}

#[derive(Serialize)]
struct KsOutput {
    arrivals: usize,
    statistic: f64,
    p_value: f64,
    pass_5pct: bool,
    estimated_rate: f64,
}

pub fn run(args: EmergenceArgs) -> Result<()> {
    let seq = match (&args.times, args.rate) {
        (Some(path), None) => {
            let times = core_io::read_emergence_csv(std::fs::File::open(path)?)?;
            if times.is_empty() {
                return Err(Error::InsufficientData("empty emergence file".into()));
            }
            let window = (
                times.iter().cloned().fold(f64::INFINITY, f64::min),
                times.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            );
            EmergenceSequence::new(times, window)?
        }
        (None, Some(rate)) => {
            let w = args.window.as_ref().expect("clap enforces --window");
            sample_poisson(rate, (w[0], w[1]), args.seed)?
        }
        _ => {
            return Err(Error::Config(
                "give either --times FILE or --rate R --window A B".into(),
            ))
        }
    };

    let out_dir = resolve_out_dir(args.out)?;
    let mut manifest = RunManifest::new(
        "emergence",
        args.rate.map(|_| args.seed),
        EmergenceManifestConfig {
            times: args.times.as_ref().map(|p| p.display().to_string()),
            rate: args.rate,
            window: args.window.as_ref().map(|w| (w[0], w[1])),
            window_len: args.window_len,
            stride: args.stride,
        },
    );

    // Sliding rate curve.
    let series = sliding_rate_series(&seq, args.window_len, args.stride);
    let mut rate_csv = String::from("t,rate\n");
    for (t, rate) in &series {
        let _ = writeln!(rate_csv, "{t},{rate}");
    }
    write_atomic(&out_dir.join("rate_curve.csv"), rate_csv.as_bytes())?;
    manifest.outputs.push("rate_curve.csv".into());

    // The sampled sequence itself, for reuse.
    let mut buf = Vec::new();
    core_io::write_emergence_csv(&mut buf, &seq.times)?;
    write_atomic(&out_dir.join("emergence_times.csv"), &buf)?;
    manifest.outputs.push("emergence_times.csv".into());

    // Goodness of fit.
    let report = ks_test_poisson(&seq)?;
    let span = seq.window.1 - seq.window.0;
    let estimated_rate = if span > 0.0 {
        seq.len() as f64 / span
    } else {
        f64::NAN
    };
    let ks = KsOutput {
        arrivals: seq.len(),
        statistic: report.statistic,
        p_value: report.p_value,
        pass_5pct: report.pass_5pct,
        estimated_rate,
    };
    let mut ks_json = serde_json::to_string_pretty(&ks)
        .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
    ks_json.push('\n');
    write_atomic(&out_dir.join("ks_report.json"), ks_json.as_bytes())?;
    manifest.outputs.push("ks_report.json".into());

    // Closed-form interval probabilities at the applicable rate.
    let rate_for_probs = args.rate.unwrap_or(estimated_rate);
    let probs = interval_probabilities(rate_for_probs)?;
    let probs_csv = format!(
        "rate,p0,p1,p2_plus\n{},{},{},{}\n",
        rate_for_probs, probs.p0, probs.p1, probs.p2_plus
    );
    write_atomic(&out_dir.join("interval_probabilities.csv"), probs_csv.as_bytes())?;
    manifest.outputs.push("interval_probabilities.csv".into());

    manifest.write(&out_dir)?;
    println!(
        "{} arrivals; KS statistic {:.4}, p = {:.4} ({}); p0/p1/p2+ = {:.4}/{:.4}/{:.4}",
        seq.len(),
        report.statistic,
        report.p_value,
        if report.pass_5pct { "pass at 5%" } else { "fail at 5%" },
        probs.p0,
        probs.p1,
        probs.p2_plus
    );
    Ok(())
}
