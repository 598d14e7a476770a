//! Trajectory analysis: smoothing, arc-length path statistics, correlations,
//! leader/follower role classes, and pursuit-law classification.

pub mod spline;

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{rot90, Sample, Trajectory, VehicleState};
use crate::steering::wrap_angle;

pub use spline::smooth_series;

/// Minimum ensemble size for reporting path statistics.
pub const MIN_ENSEMBLE: usize = 20;

/// Default arc-length resampling step in meters.
pub const DEFAULT_ARC_STEP: f64 = 0.1;

/// Default smoothing factor for track preprocessing.
pub const DEFAULT_SMOOTHING: f64 = 0.85;

/// Default pursuit-classifier tolerance on the mean absolute bearing (rad).
pub const DEFAULT_TOL_BEARING: f64 = 0.1;

/// Default pursuit-classifier tolerance on angle standard deviations (rad).
pub const DEFAULT_TOL_STD: f64 = 0.1;

// ---------------------------------------------------------------------------
// Smoothing
// ---------------------------------------------------------------------------

/// Smooth a trajectory's coordinates against time with a cubic smoothing
/// spline (see [`spline`]), resampled at the input timestamps.
///
/// Tangents and speeds are rebuilt from the spline's first derivative; where
/// the derivative is degenerate the original sample's frame is kept.
pub fn smooth(traj: &Trajectory, factor: f64) -> Result<Trajectory> {
    let times: Vec<f64> = traj.samples.iter().map(|s| s.time).collect();
    let xs: Vec<f64> = traj.samples.iter().map(|s| s.state.position.x).collect();
    let ys: Vec<f64> = traj.samples.iter().map(|s| s.state.position.y).collect();
    let sx = smooth_series(&times, &xs, factor)?;
    let sy = smooth_series(&times, &ys, factor)?;

    let mut out = Trajectory::new(traj.agent_id.clone(), traj.emergence_time);
    for (i, sample) in traj.samples.iter().enumerate() {
        let velocity = Vector2::new(sx.derivatives[i], sy.derivatives[i]);
        let speed = velocity.norm();
        let (tangent, speed) = if speed > 1e-9 {
            (velocity / speed, speed)
        } else {
            (sample.state.tangent, sample.state.speed)
        };
        out.samples.push(Sample {
            time: sample.time,
            state: VehicleState {
                position: Vector2::new(sx.values[i], sy.values[i]),
                tangent,
                normal: rot90(tangent),
                speed,
            },
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Arc-length resampling and ensemble statistics
// ---------------------------------------------------------------------------

/// Resample a trajectory's path at fixed arc-length intervals.
///
/// Points are taken at arc lengths `0, step, 2 step, ...` by linear
/// interpolation along the sample polyline; the final partial segment is
/// dropped.
pub fn arc_length_resample(traj: &Trajectory, step: f64) -> Result<Vec<Vector2<f64>>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidInput(format!("arc step {step} must be positive")));
    }
    let pts = traj.positions();
    let total: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    if pts.is_empty() || total <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "trajectory {} has zero arc length",
            traj.agent_id
        )));
    }

    let mut out = Vec::with_capacity((total / step) as usize + 1);
    let mut seg = 0usize;
    let mut seg_start_arc = 0.0;
    let mut seg_len = (pts[1] - pts[0]).norm();
    let mut k = 0usize;
    loop {
        let target = k as f64 * step;
        if target > total * (1.0 + 1e-12) {
            break;
        }
        while target > seg_start_arc + seg_len && seg + 2 < pts.len() {
            seg_start_arc += seg_len;
            seg += 1;
            seg_len = (pts[seg + 1] - pts[seg]).norm();
        }
        if target > seg_start_arc + seg_len + total * 1e-12 {
            break;
        }
        let w = if seg_len > 0.0 {
            ((target - seg_start_arc) / seg_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(pts[seg] * (1.0 - w) + pts[seg + 1] * w);
        k += 1;
    }
    Ok(out)
}

/// One-standard-deviation ellipse axes from a positional covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseAxes {
    /// Unit direction of the major axis.
    pub major_dir: Vector2<f64>,
    /// Unit direction of the minor axis (major rotated +90 degrees).
    pub minor_dir: Vector2<f64>,
    /// Major axis length: square root of the larger eigenvalue (meters).
    pub major_len: f64,
    /// Minor axis length: square root of the smaller eigenvalue (meters).
    pub minor_len: f64,
}

/// Arc-length-indexed mean path with per-sample covariance ellipses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStatistics {
    /// Arc-length positions of the samples (meters).
    pub arc_positions: Vec<f64>,
    /// Mean point of the ensemble at each arc position.
    pub mean_points: Vec<Vector2<f64>>,
    /// Unbiased 2x2 positional covariance at each arc position (m^2).
    pub covariances: Vec<Matrix2<f64>>,
    /// One-standard-deviation ellipse axes at each arc position.
    pub ellipses: Vec<EllipseAxes>,
    /// Number of trajectories contributing at each arc position.
    pub sample_counts: Vec<usize>,
}

/// Eigendecomposition of a symmetric 2x2 matrix: `(l_major, l_minor,
/// major_dir, minor_dir)` with eigenvalues in descending order and
/// orthonormal axes.
pub fn sym_eigen_2x2(m: &Matrix2<f64>) -> (f64, f64, Vector2<f64>, Vector2<f64>) {
    let a = m[(0, 0)];
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let c = m[(1, 1)];
    let half_trace = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let major = Vector2::new(theta.cos(), theta.sin());
    (half_trace + radius, half_trace - radius, major, rot90(major))
}

/// Per-arc-index mean and covariance of a trajectory ensemble.
///
/// Requires at least [`MIN_ENSEMBLE`] trajectories. Each is resampled per
/// [`arc_length_resample`]; statistics run to the shortest trajectory's arc
/// length. Covariances use the unbiased (n - 1) divisor; ellipses are drawn
/// at exactly one standard deviation.
pub fn ensemble_stats(trajs: &[Trajectory], step: f64) -> Result<PathStatistics> {
    if trajs.len() < MIN_ENSEMBLE {
        return Err(Error::InsufficientData(format!(
            "path statistics need at least {MIN_ENSEMBLE} trajectories, got {}",
            trajs.len()
        )));
    }
    let resampled: Vec<Vec<Vector2<f64>>> = trajs
        .iter()
        .map(|t| arc_length_resample(t, step))
        .collect::<Result<_>>()?;
    let len = resampled.iter().map(Vec::len).min().unwrap_or(0);
    let n = resampled.len();
    let n_f = n as f64;

    let mut stats = PathStatistics {
        arc_positions: Vec::with_capacity(len),
        mean_points: Vec::with_capacity(len),
        covariances: Vec::with_capacity(len),
        ellipses: Vec::with_capacity(len),
        sample_counts: Vec::with_capacity(len),
    };

    for idx in 0..len {
        let mut mean = Vector2::zeros();
        for track in &resampled {
            mean += track[idx];
        }
        mean /= n_f;

        let mut cov = Matrix2::zeros();
        for track in &resampled {
            let d = track[idx] - mean;
            cov[(0, 0)] += d.x * d.x;
            cov[(0, 1)] += d.x * d.y;
            cov[(1, 1)] += d.y * d.y;
        }
        cov[(0, 0)] /= n_f - 1.0;
        cov[(0, 1)] /= n_f - 1.0;
        cov[(1, 1)] /= n_f - 1.0;
        cov[(1, 0)] = cov[(0, 1)];

        let (l1, l2, major_dir, minor_dir) = sym_eigen_2x2(&cov);
        stats.arc_positions.push(idx as f64 * step);
        stats.mean_points.push(mean);
        stats.covariances.push(cov);
        stats.ellipses.push(EllipseAxes {
            major_dir,
            minor_dir,
            major_len: l1.max(0.0).sqrt(),
            minor_len: l2.max(0.0).sqrt(),
        });
        stats.sample_counts.push(n);
    }
    Ok(stats)
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

/// Pearson correlation coefficient of two equal-length series.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "pearson needs equal lengths >= 3, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InsufficientData(
            "pearson undefined for zero-variance input".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// How the per-window mean y coordinate is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WindowMeanMode {
    /// Mean over agents of each agent's own trajectory-mean y (the default).
    #[default]
    PerAgent,
    /// Mean over all position samples pooled across the window's agents.
    Pooled,
}

/// Partition the emergence span into consecutive windows and report, per
/// non-empty window, the number of agents emerging in it and their mean y
/// coordinate.
pub fn windowed_count_vs_y(
    trajs: &[Trajectory],
    window: f64,
    mode: WindowMeanMode,
) -> Vec<(usize, f64)> {
    assert!(window > 0.0, "window length must be positive");
    if trajs.is_empty() {
        return Vec::new();
    }
    let t0 = trajs
        .iter()
        .map(|t| t.emergence_time)
        .fold(f64::INFINITY, f64::min);
    let mut buckets: BTreeMap<usize, Vec<&Trajectory>> = BTreeMap::new();
    for t in trajs {
        let k = ((t.emergence_time - t0) / window).floor() as usize;
        buckets.entry(k).or_default().push(t);
    }
    buckets
        .values()
        .filter_map(|members| {
            let count = members.len();
            let mean = match mode {
                WindowMeanMode::PerAgent => {
                    let ys: Vec<f64> = members.iter().filter_map(|t| t.mean_y()).collect();
                    if ys.is_empty() {
                        return None;
                    }
                    ys.iter().sum::<f64>() / ys.len() as f64
                }
                WindowMeanMode::Pooled => {
                    let mut sum = 0.0;
                    let mut n = 0usize;
                    for t in members {
                        for s in &t.samples {
                            sum += s.state.position.y;
                            n += 1;
                        }
                    }
                    if n == 0 {
                        return None;
                    }
                    sum / n as f64
                }
            };
            Some((count, mean))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Pair records and metrics
// ---------------------------------------------------------------------------

pub use crate::strategy::PairingParams;

/// A leader-follower trajectory pair with its co-visibility window and the
/// derived angle series.
#[derive(Debug, Clone)]
pub struct PairRecord {
    pub leader_traj: Trajectory,
    pub follower_traj: Trajectory,
    /// Overlap of the two sampled time ranges, `[start, end]` seconds.
    pub covisibility: (f64, f64),
    /// Baseline length at the start of co-visibility (meters).
    pub initial_distance: f64,
    /// Per-frame `(time, baseline_angle, bearing_angle)`, both unwrapped.
    pub angle_series: Vec<(f64, f64, f64)>,
}

/// Build the pair record for a candidate (leader, follower) ordering, or
/// `None` if the pairing criteria are not met.
///
/// Criteria: the leader emerged strictly earlier; the tracks overlap for at
/// least the minimum co-visibility; and at some instant past that threshold
/// the separation is within range with the leader in front of the follower.
pub fn pair_up(
    leader: &Trajectory,
    follower: &Trajectory,
    params: &PairingParams,
) -> Option<PairRecord> {
    params.validate().ok()?;
    if leader.emergence_time >= follower.emergence_time {
        return None;
    }
    let start = leader.first_time()?.max(follower.first_time()?);
    let end = leader.last_time()?.min(follower.last_time()?);
    if end - start < params.min_covisibility {
        return None;
    }

    let mut qualified = false;
    for s in &follower.samples {
        let t = s.time;
        if t < start + params.min_covisibility || t > end {
            continue;
        }
        let Some(lead_state) = leader.state_at(t) else {
            continue;
        };
        let geom = crate::perception::relative_geometry(&lead_state, &s.state);
        if geom.r.norm() <= params.max_separation && geom.r_x > 0.0 {
            qualified = true;
            break;
        }
    }
    if !qualified {
        return None;
    }

    let initial_distance = {
        let ls = leader.state_at(start)?;
        let fs = follower.state_at(start)?;
        (ls.position - fs.position).norm()
    };

    // Angle series over the co-visibility window at follower sample times.
    let mut raw: Vec<(f64, f64, f64)> = Vec::new();
    for s in &follower.samples {
        if s.time < start || s.time > end {
            continue;
        }
        let Some(lead_state) = leader.state_at(s.time) else {
            continue;
        };
        let r = lead_state.position - s.state.position;
        if r.norm() <= crate::perception::EPS_FRONT {
            continue;
        }
        let baseline = r.y.atan2(r.x);
        let bearing = s.state.tangent.perp(&r).atan2(s.state.tangent.dot(&r));
        raw.push((s.time, baseline, bearing));
    }
    let baselines = unwrap_angles(raw.iter().map(|x| x.1));
    let bearings = unwrap_angles(raw.iter().map(|x| x.2));
    let angle_series = raw
        .iter()
        .zip(baselines.iter().zip(&bearings))
        .map(|((t, _, _), (base, bear))| (*t, *base, *bear))
        .collect();

    Some(PairRecord {
        leader_traj: leader.clone(),
        follower_traj: follower.clone(),
        covisibility: (start, end),
        initial_distance,
        angle_series,
    })
}

/// All qualifying pairs among an ensemble, ordered deterministically.
pub fn build_pairs(trajs: &[Trajectory], params: &PairingParams) -> Vec<PairRecord> {
    let mut out = Vec::new();
    for leader in trajs {
        for follower in trajs {
            if leader.agent_id == follower.agent_id {
                continue;
            }
            if let Some(pair) = pair_up(leader, follower, params) {
                out.push(pair);
            }
        }
    }
    out
}

/// Remove 2-pi jumps from an angle sequence.
pub fn unwrap_angles(angles: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev: Option<f64> = None;
    for a in angles {
        let next = match prev {
            None => a,
            Some(p) => p + wrap_angle(a - p),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

/// Comparison metrics for one pair over a shared x range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    /// Follower mean y minus leader mean y over the x range (meters).
    pub delta_mean_y: f64,
    /// Follower route length minus leader route length over the x range.
    pub delta_route_length: f64,
    /// Baseline length at the start of co-visibility (meters).
    pub initial_distance: f64,
}

/// Mean y and route-length differences between follower and leader over a
/// common x range (both trajectories must span it fully).
pub fn pair_metrics(pair: &PairRecord, x_range: (f64, f64)) -> Result<PairMetrics> {
    let covers = |t: &Trajectory| {
        let xs: Vec<f64> = t.samples.iter().map(|s| s.state.position.x).collect();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        min <= x_range.0 && max >= x_range.1
    };
    if !covers(&pair.leader_traj) || !covers(&pair.follower_traj) {
        return Err(Error::InsufficientData(format!(
            "pair does not cover x range [{}, {}]",
            x_range.0, x_range.1
        )));
    }
    let mean_y = |t: &Trajectory| -> f64 {
        let ys: Vec<f64> = t
            .samples
            .iter()
            .filter(|s| s.state.position.x >= x_range.0 && s.state.position.x <= x_range.1)
            .map(|s| s.state.position.y)
            .collect();
        ys.iter().sum::<f64>() / ys.len() as f64
    };
    Ok(PairMetrics {
        delta_mean_y: mean_y(&pair.follower_traj) - mean_y(&pair.leader_traj),
        delta_route_length: route_length_in_band(&pair.follower_traj, x_range)
            - route_length_in_band(&pair.leader_traj, x_range),
        initial_distance: pair.initial_distance,
    })
}

/// Polyline length of the portion of a trajectory lying inside an x band.
pub fn route_length_in_band(traj: &Trajectory, x_range: (f64, f64)) -> f64 {
    let pts = traj.positions();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let seg = (q - p).norm();
        if seg == 0.0 {
            continue;
        }
        let dx = q.x - p.x;
        let (s0, s1) = if dx.abs() < 1e-15 {
            if p.x >= x_range.0 && p.x <= x_range.1 {
                (0.0, 1.0)
            } else {
                continue;
            }
        } else {
            let a = (x_range.0 - p.x) / dx;
            let b = (x_range.1 - p.x) / dx;
            (a.min(b).max(0.0), a.max(b).min(1.0))
        };
        if s1 > s0 {
            total += seg * (s1 - s0);
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Role classification
// ---------------------------------------------------------------------------

/// Leader/follower role class of one trajectory within an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoleClass {
    /// Neither a leader nor a follower (C1).
    Single,
    /// A leader but not a follower (C2).
    SingleRoleLeader,
    /// Both a leader and a follower (C3).
    DualRole,
    /// A follower but not a leader (C4).
    SingleRoleFollower,
}

impl RoleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RoleClass::Single => "C1",
            RoleClass::SingleRoleLeader => "C2",
            RoleClass::DualRole => "C3",
            RoleClass::SingleRoleFollower => "C4",
        }
    }

    /// Group G1 contains non-followers (C1, C2); G2 contains followers
    /// (C3, C4).
    pub fn group(&self) -> RoleGroup {
        match self {
            RoleClass::Single | RoleClass::SingleRoleLeader => RoleGroup::G1,
            RoleClass::DualRole | RoleClass::SingleRoleFollower => RoleGroup::G2,
        }
    }
}

/// Leader group (G1 = C1 + C2) vs follower group (G2 = C3 + C4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoleGroup {
    G1,
    G2,
}

/// Role classification of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleTable {
    /// Class per agent id, in deterministic order.
    pub classes: BTreeMap<String, RoleClass>,
    /// Counts of C1, C2, C3, C4 in order.
    pub counts: [usize; 4],
}

/// Classify each trajectory as C1-C4 by building the leader/follower
/// relation pairwise from the pairing criteria.
pub fn classify_roles(trajs: &[Trajectory], params: &PairingParams) -> RoleTable {
    let mut is_leader: BTreeMap<&str, bool> = BTreeMap::new();
    let mut is_follower: BTreeMap<&str, bool> = BTreeMap::new();
    for t in trajs {
        is_leader.insert(&t.agent_id, false);
        is_follower.insert(&t.agent_id, false);
    }
    for leader in trajs {
        for follower in trajs {
            if leader.agent_id == follower.agent_id {
                continue;
            }
            if pair_up(leader, follower, params).is_some() {
                is_leader.insert(&leader.agent_id, true);
                is_follower.insert(&follower.agent_id, true);
            }
        }
    }
    let mut classes = BTreeMap::new();
    let mut counts = [0usize; 4];
    for t in trajs {
        let class = match (
            is_leader[t.agent_id.as_str()],
            is_follower[t.agent_id.as_str()],
        ) {
            (false, false) => RoleClass::Single,
            (true, false) => RoleClass::SingleRoleLeader,
            (true, true) => RoleClass::DualRole,
            (false, true) => RoleClass::SingleRoleFollower,
        };
        counts[match class {
            RoleClass::Single => 0,
            RoleClass::SingleRoleLeader => 1,
            RoleClass::DualRole => 2,
            RoleClass::SingleRoleFollower => 3,
        }] += 1;
        classes.insert(t.agent_id.clone(), class);
    }
    RoleTable { classes, counts }
}

// ---------------------------------------------------------------------------
// Pursuit classification
// ---------------------------------------------------------------------------

/// Outcome of testing a pair against the three reference pursuit laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PursuitClass {
    /// Heading stays aligned with the baseline.
    Classical,
    /// Bearing to the baseline stays constant.
    ConstantBearing,
    /// Baseline direction stays constant.
    MotionCamouflage,
    /// None of the pursuit laws explains the pair.
    None,
}

impl PursuitClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PursuitClass::Classical => "classical",
            PursuitClass::ConstantBearing => "constant_bearing",
            PursuitClass::MotionCamouflage => "motion_camouflage",
            PursuitClass::None => "none",
        }
    }
}

/// Classify a pair against the reference pursuit laws.
///
/// Tests run in priority order on the unwrapped angle series: classical
/// pursuit (mean |bearing| below `tol_bearing`), then constant bearing
/// (bearing standard deviation below `tol_std`), then motion camouflage
/// (baseline-angle standard deviation below `tol_std`).
pub fn classify_pursuit(
    pair: &PairRecord,
    tol_bearing: f64,
    tol_std: f64,
) -> Result<PursuitClass> {
    if pair.angle_series.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "pursuit classification needs >= 10 angle samples, got {}",
            pair.angle_series.len()
        )));
    }
    let baselines: Vec<f64> = pair.angle_series.iter().map(|a| a.1).collect();
    let bearings: Vec<f64> = pair.angle_series.iter().map(|a| a.2).collect();

    let mean_abs_bearing =
        bearings.iter().map(|b| b.abs()).sum::<f64>() / bearings.len() as f64;
    if mean_abs_bearing < tol_bearing {
        return Ok(PursuitClass::Classical);
    }
    if std_dev(&bearings) < tol_std {
        return Ok(PursuitClass::ConstantBearing);
    }
    if std_dev(&baselines) < tol_std {
        return Ok(PursuitClass::MotionCamouflage);
    }
    Ok(PursuitClass::None)
}

/// Population standard deviation of a series.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}
