//! CSV formats for trajectories, emergence sequences and path statistics.
//!
//! Track ingestion reads `t,x,y` columns (seconds, meters) with an optional
//! `agent_id` column for multi-track files; extra columns are ignored, so
//! episode output files re-ingest cleanly. Episode output carries the full
//! per-sample record: `t,x,y,heading_x,heading_y,u,primitive,leader_id`.

use std::io::{Read, Write};

use nalgebra::Vector2;

use crate::analysis::PathStatistics;
use crate::error::{Error, Result};
use crate::kinematics::{rot90, Sample, Trajectory, VehicleState};
use crate::strategy::AgentRecord;

/// Read one or more trajectories from a `t,x,y[,agent_id]` CSV stream.
///
/// Rows without an `agent_id` column all belong to one track named
/// `fallback_id` (callers typically pass the file stem). Headings and speeds
/// are rebuilt from finite differences of the positions (central differences
/// in the interior). Tracks appear in first-seen order.
pub fn read_trajectories_csv<R: Read>(reader: R, fallback_id: &str) -> Result<Vec<Trajectory>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(t_col), Some(x_col), Some(y_col)) = (col("t"), col("x"), col("y")) else {
        return Err(Error::Parse("track CSV needs t, x and y columns".into()));
    };
    let id_col = col("agent_id");

    let mut order: Vec<String> = Vec::new();
    let mut rows: std::collections::BTreeMap<String, Vec<(f64, f64, f64)>> = Default::default();
    for record in csv_reader.records() {
        let record = record?;
        let parse = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .ok_or_else(|| Error::Parse("short row in track CSV".into()))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number in track CSV: {e}")))
        };
        let id = match id_col {
            Some(idx) => record.get(idx).unwrap_or(fallback_id).to_string(),
            None => fallback_id.to_string(),
        };
        if !rows.contains_key(&id) {
            order.push(id.clone());
        }
        rows.entry(id)
            .or_default()
            .push((parse(t_col)?, parse(x_col)?, parse(y_col)?));
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let samples = &rows[&id];
        if samples.len() < 2 {
            return Err(Error::Parse(format!(
                "track {id} has fewer than 2 samples"
            )));
        }
        out.push(trajectory_from_positions(&id, samples)?);
    }
    Ok(out)
}

/// Build a trajectory from timed positions, deriving frames by finite
/// differences.
pub fn trajectory_from_positions(id: &str, rows: &[(f64, f64, f64)]) -> Result<Trajectory> {
    let n = rows.len();
    let mut traj = Trajectory::new(id, rows[0].0);
    let pos = |i: usize| Vector2::new(rows[i].1, rows[i].2);
    let mut last_tangent = Vector2::new(1.0, 0.0);
    for i in 0..n {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let dt_span = rows[hi].0 - rows[lo].0;
        if dt_span <= 0.0 {
            return Err(Error::Parse(format!(
                "track {id}: times not strictly increasing at t = {}",
                rows[hi].0
            )));
        }
        let velocity = (pos(hi) - pos(lo)) / dt_span;
        let speed = velocity.norm();
        let tangent = if speed > 1e-9 {
            velocity / speed
        } else {
            last_tangent
        };
        last_tangent = tangent;
        traj.samples.push(Sample {
            time: rows[i].0,
            state: VehicleState {
                position: pos(i),
                tangent,
                normal: rot90(tangent),
                speed: speed.max(1e-9),
            },
        });
    }
    traj.validate()?;
    Ok(traj)
}

/// Write one agent's episode record: full per-sample state and control.
pub fn write_agent_csv<W: Write>(writer: W, record: &AgentRecord) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "t",
        "x",
        "y",
        "heading_x",
        "heading_y",
        "u",
        "primitive",
        "leader_id",
    ])?;
    for (sample, info) in record.trajectory.samples.iter().zip(&record.steps) {
        w.write_record([
            sample.time.to_string(),
            sample.state.position.x.to_string(),
            sample.state.position.y.to_string(),
            sample.state.tangent.x.to_string(),
            sample.state.tangent.y.to_string(),
            info.curvature.to_string(),
            info.law.as_str().to_string(),
            info.leader.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write the primitive-switch log for a whole episode.
pub fn write_switches_csv<W: Write>(writer: W, records: &[AgentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["agent_id", "t", "primitive", "targets", "setpoint"])?;
    for record in records {
        for event in &record.switches {
            let targets: Vec<String> = event
                .law
                .targets
                .iter()
                .map(|t| match t {
                    crate::steering::TargetRef::Feature(id) => id.clone(),
                    crate::steering::TargetRef::Agent(id) => id.clone(),
                })
                .collect();
            w.write_record([
                record.trajectory.agent_id.clone(),
                event.time.to_string(),
                event.law.kind.as_str().to_string(),
                targets.join("+"),
                event.law.setpoint.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read an emergence sequence from a single-column CSV (`t` header).
pub fn read_emergence_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let t_col = headers
        .iter()
        .position(|h| h == "t")
        .ok_or_else(|| Error::Parse("emergence CSV needs a t column".into()))?;
    let mut times = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        times.push(
            record
                .get(t_col)
                .ok_or_else(|| Error::Parse("short row in emergence CSV".into()))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad time in emergence CSV: {e}")))?,
        );
    }
    Ok(times)
}

/// Write an emergence sequence as a single-column CSV with a header row.
pub fn write_emergence_csv<W: Write>(writer: W, times: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t"])?;
    for t in times {
        w.write_record([t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Write path statistics: one row per arc-length sample.
pub fn write_stats_csv<W: Write>(writer: W, stats: &PathStatistics) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "arc_s", "mean_x", "mean_y", "cov_xx", "cov_xy", "cov_yy", "eig1", "eig2", "axis1_x",
        "axis1_y",
    ])?;
    for i in 0..stats.arc_positions.len() {
        let cov = &stats.covariances[i];
        let ell = &stats.ellipses[i];
        w.write_record([
            stats.arc_positions[i].to_string(),
            stats.mean_points[i].x.to_string(),
            stats.mean_points[i].y.to_string(),
            cov[(0, 0)].to_string(),
            cov[(0, 1)].to_string(),
            cov[(1, 1)].to_string(),
            (ell.major_len * ell.major_len).to_string(),
            (ell.minor_len * ell.minor_len).to_string(),
            ell.major_dir.x.to_string(),
            ell.major_dir.y.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ingest_single_track() {
        let csv = "t,x,y\n0.0,0.0,0.0\n0.1,1.0,0.0\n0.2,2.0,0.0\n";
        let trajs = read_trajectories_csv(csv.as_bytes(), "track").unwrap();
        assert_eq!(trajs.len(), 1);
        let t = &trajs[0];
        assert_eq!(t.samples.len(), 3);
        assert_relative_eq!(t.samples[1].state.speed, 10.0, epsilon = 1e-9);
        assert_relative_eq!(t.samples[1].state.tangent.x, 1.0, epsilon = 1e-12);
        assert_eq!(t.emergence_time, 0.0);
    }

    #[test]
    fn ingest_multi_track_with_ids() {
        let csv = "t,x,y,agent_id\n0.0,0.0,0.0,a\n0.1,1.0,0.0,a\n0.5,0.0,1.0,b\n0.6,1.0,1.0,b\n";
        let trajs = read_trajectories_csv(csv.as_bytes(), "track").unwrap();
        assert_eq!(trajs.len(), 2);
        assert_eq!(trajs[0].agent_id, "a");
        assert_eq!(trajs[1].agent_id, "b");
        assert_eq!(trajs[1].emergence_time, 0.5);
    }

    #[test]
    fn ingest_rejects_bad_input() {
        assert!(read_trajectories_csv("a,b\n1,2\n".as_bytes(), "track").is_err());
        assert!(read_trajectories_csv("t,x,y\n0.0,0.0,zzz\n0.1,1.0,0.0\n".as_bytes(), "track").is_err());
        // Non-increasing times.
        assert!(
            read_trajectories_csv("t,x,y\n0.1,0.0,0.0\n0.1,1.0,0.0\n".as_bytes(), "track")
                .is_err()
        );
    }

    #[test]
    fn emergence_round_trip() {
        let times = vec![0.25, 1.5, 3.75];
        let mut buf = Vec::new();
        write_emergence_csv(&mut buf, &times).unwrap();
        let back = read_emergence_csv(buf.as_slice()).unwrap();
        assert_eq!(times, back);
    }
}
