//! The integrated navigation strategy: leader detection, primitive selection
//! with geometric switching rules, and episode execution.
//!
//! Each agent stitches a corridor trajectory out of vision-based motion
//! primitives. Without a leader the sequence is a standoff arc around the
//! nearest obstacle followed by the memorized chain of feature-pair gates;
//! with a leader the agent opens with the following law instead. Switching
//! is prescribed by the nearest feature(s) along the agent's body x
//! direction, with a collision-course override onto the obstacle's
//! environment-cue law and a minimum dwell time against chattering.

pub mod scenario;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::emergence;
use crate::error::{Error, Result};
use crate::kinematics::{step, Sample, Trajectory, VehicleState};
use crate::perception::EPS_FRONT;
use crate::rng;
use crate::steering::{self, clamp_curvature, ControlKind, ControlLaw, TargetRef};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
pub use scenario::{EntryModel, Feature, FeatureKind, Scenario};

/// Pairing criteria: maximum spatial separation and minimum co-visibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingParams {
    /// Maximum leader-follower separation in meters.
    pub max_separation: f64,
    /// Minimum simultaneous-visibility duration in seconds.
    pub min_covisibility: f64,
}

impl Default for PairingParams {
    fn default() -> Self {
        // 10 m visual range; 20 frames at the camera rate.
        PairingParams {
            max_separation: 10.0,
            min_covisibility: 20.0 * crate::DEFAULT_DT,
        }
    }
}

impl PairingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_separation > 0.0 && self.min_covisibility > 0.0) {
            return Err(Error::Config("pairing parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Gains and switching parameters for the strategy's control laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawGains {
    /// Following-law gain.
    pub follow: f64,
    /// Circling / standoff law gain.
    pub circle: f64,
    /// Gain of the collision-course avoidance law.
    pub panic: f64,
    /// Distance-maintenance (gate) law gain.
    pub distance: f64,
    /// Smallest standoff distance used for loom setpoints (meters).
    pub min_standoff: f64,
    /// Collision-course trigger: obstacle within this forward distance.
    pub panic_front_distance: f64,
    /// Collision-course trigger: obstacle within this half-angle of the
    /// heading (radians).
    pub panic_half_angle: f64,
    /// Half-angle of the cone in which an obstacle counts as a circling
    /// anchor ahead (radians). Off-axis obstacles are not path anchors.
    pub attention_half_angle: f64,
    /// Curvature command clamp (1/m).
    pub max_curvature: f64,
    /// Minimum dwell time per primitive before a voluntary switch (seconds).
    pub min_dwell: f64,
}

impl Default for LawGains {
    fn default() -> Self {
        LawGains {
            follow: 1.0,
            circle: 0.015,
            panic: 0.6,
            distance: 1.0,
            min_standoff: 1.5,
            panic_front_distance: 1.0,
            panic_half_angle: 15f64.to_radians(),
            attention_half_angle: 30f64.to_radians(),
            max_curvature: 1.0,
            min_dwell: 0.1,
        }
    }
}

impl LawGains {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.follow,
            self.circle,
            self.panic,
            self.distance,
            self.min_standoff,
            self.panic_front_distance,
            self.panic_half_angle,
            self.attention_half_angle,
            self.max_curvature,
            self.min_dwell,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("law gains must be positive and finite".into()));
        }
        Ok(())
    }
}

fn default_schema_version() -> u32 {
    1
}

/// Everything needed to run one episode reproducibly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Poisson arrival rate of agents (1/s).
    pub arrival_rate: f64,
    /// Arrival window length: agents emerge in `[0, horizon]` (s).
    pub horizon: f64,
    /// Simulation step (s).
    pub dt: f64,
    /// Mean agent speed (m/s).
    pub speed_mean: f64,
    /// Agent speed standard deviation (m/s); zero gives identical speeds.
    pub speed_std: f64,
    /// Master seed; fixed seed reproduces the episode bit-exactly.
    pub rng_seed: u64,
    #[serde(default)]
    pub gains: LawGains,
    #[serde(default)]
    pub pairing: PairingParams,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            schema_version: 1,
            arrival_rate: 0.961,
            horizon: 104.0,
            dt: crate::DEFAULT_DT,
            speed_mean: crate::DEFAULT_SPEED,
            speed_std: 0.0,
            rng_seed: 7,
            gains: LawGains::default(),
            pairing: PairingParams::default(),
        }
    }
}

impl EpisodeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: EpisodeConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 1 {
            return Err(Error::Config(format!(
                "unsupported config schema_version {}",
                self.schema_version
            )));
        }
        let positive = [self.arrival_rate, self.dt, self.speed_mean];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(
                "arrival_rate, dt and speed_mean must be positive".into(),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return Err(Error::Config("horizon must be non-negative".into()));
        }
        if !(self.speed_std.is_finite() && self.speed_std >= 0.0) {
            return Err(Error::Config("speed_std must be non-negative".into()));
        }
        self.gains.validate()?;
        self.pairing.validate()?;
        Ok(())
    }
}

/// Current pose of one active agent, as visible to the others.
#[derive(Debug, Clone)]
pub struct AgentSnapshot {
    pub id: String,
    pub emergence_time: f64,
    pub state: VehicleState,
}

/// Pick the leader an agent should follow, if any: an agent that emerged
/// earlier, has been co-active at least the minimum co-visibility, is
/// currently within the separation limit and sits in front of the ego agent.
/// Ties break toward the smallest baseline length.
pub fn detect_leader<'a>(
    ego: &AgentSnapshot,
    others: &'a [AgentSnapshot],
    params: &PairingParams,
    now: f64,
) -> Option<&'a AgentSnapshot> {
    let mut best: Option<(&AgentSnapshot, f64)> = None;
    for other in others {
        if other.id == ego.id || other.emergence_time >= ego.emergence_time {
            continue;
        }
        if now - ego.emergence_time.max(other.emergence_time) < params.min_covisibility {
            continue;
        }
        let geom = crate::perception::relative_geometry(&other.state, &ego.state);
        let dist = geom.r.norm();
        if dist > params.max_separation || geom.r_x <= 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((cur, cur_dist)) => {
                dist < cur_dist
                    || (dist == cur_dist && other.emergence_time < cur.emergence_time)
            }
        };
        if better {
            best = Some((other, dist));
        }
    }
    best.map(|(agent, _)| agent)
}

// ---------------------------------------------------------------------------
// Primitive selection
// ---------------------------------------------------------------------------

fn forward_distance(state: &VehicleState, point: Vector2<f64>) -> f64 {
    (point - state.position).dot(&state.tangent)
}

fn is_ahead(state: &VehicleState, point: Vector2<f64>) -> bool {
    forward_distance(state, point) > EPS_FRONT
}

/// Forward distance if the point is ahead, infinity otherwise.
fn ahead_distance(state: &VehicleState, point: Vector2<f64>) -> f64 {
    let d = forward_distance(state, point);
    if d > EPS_FRONT {
        d
    } else {
        f64::INFINITY
    }
}

fn gate_law(pair: &(String, String), gains: &LawGains) -> ControlLaw {
    ControlLaw::distance_maintain(pair.0.clone(), pair.1.clone(), gains.distance)
        .expect("validated gains")
}

fn circle_law(id: &str, state: &VehicleState, point: Vector2<f64>, gains: &LawGains) -> ControlLaw {
    // Lock the loom setpoint to the feature's transit distance at selection
    // time, floored at the minimum standoff.
    let standoff = forward_distance(state, point).max(gains.min_standoff);
    ControlLaw::circle(id, gains.circle, state.speed / standoff).expect("validated gains")
}

/// Obstacle on a collision course: within the panic cone and closer than the
/// panic front distance.
fn panic_obstacle<'a>(
    state: &VehicleState,
    scenario: &'a Scenario,
    gains: &LawGains,
) -> Option<&'a Feature> {
    let mut best: Option<(&Feature, f64)> = None;
    for f in scenario.obstacles() {
        let r = f.point() - state.position;
        let r_x = r.dot(&state.tangent);
        if r_x <= EPS_FRONT || r_x > gains.panic_front_distance {
            continue;
        }
        let bearing = state.tangent.perp(&r).atan2(state.tangent.dot(&r));
        if bearing.abs() > gains.panic_half_angle {
            continue;
        }
        if best.map(|(_, d)| r_x < d).unwrap_or(true) {
            best = Some((f, r_x));
        }
    }
    best.map(|(f, _)| f)
}

/// Does this law target an obstacle currently inside the panic cone?
fn is_panic_selection(law: &ControlLaw, state: &VehicleState, scenario: &Scenario, gains: &LawGains) -> bool {
    if law.kind != ControlKind::Circle {
        return false;
    }
    match (&law.targets[0], panic_obstacle(state, scenario, gains)) {
        (TargetRef::Feature(id), Some(f)) => *id == f.id,
        _ => false,
    }
}

/// Index into the memorized sequence if the law is one of its gates.
fn pair_index(scenario: &Scenario, law: &ControlLaw) -> Option<usize> {
    if law.kind != ControlKind::DistanceMaintain {
        return None;
    }
    let ids: Vec<&str> = law
        .targets
        .iter()
        .map(|t| match t {
            TargetRef::Feature(id) => id.as_str(),
            TargetRef::Agent(id) => id.as_str(),
        })
        .collect();
    scenario
        .memorized_sequence
        .iter()
        .position(|(a, b)| a == ids[0] && b == ids[1])
}

/// First memorized pair (searching from `from`) with a feature still ahead.
fn first_unpassed_pair<'a>(
    state: &VehicleState,
    scenario: &'a Scenario,
    from: usize,
) -> Option<(usize, &'a (String, String))> {
    scenario
        .memorized_sequence
        .iter()
        .enumerate()
        .skip(from)
        .find(|(_, (a, b))| {
            [a, b].iter().any(|id| {
                scenario
                    .feature(id)
                    .map(|f| is_ahead(state, f.point()))
                    .unwrap_or(false)
            })
        })
}

fn nearest_ahead_distance(state: &VehicleState, scenario: &Scenario, pair: &(String, String)) -> f64 {
    [&pair.0, &pair.1]
        .iter()
        .filter_map(|id| scenario.feature(id))
        .map(|f| ahead_distance(state, f.point()))
        .fold(f64::INFINITY, f64::min)
}

/// Select the motion primitive for the current geometry.
///
/// Without a leader the prescribed sequence is standoff-circle around the
/// nearest obstacle ahead, then the memorized gate chain; with a leader the
/// sequence opens with the following law. Switches trigger on the nearest
/// relevant feature along the body x direction: a gate takes over from the
/// obstacle or leader once its nearest feature is closer, and gate `i` hands
/// off to gate `i+1` once the next gate's new feature is closer than the
/// current gate's own. A collision-course obstacle overrides everything.
/// Returns `EndOfCorridor` when nothing remains ahead to steer by.
pub fn select_primitive(
    ego: &VehicleState,
    scenario: &Scenario,
    leader: Option<&AgentSnapshot>,
    current: Option<&ControlLaw>,
    gains: &LawGains,
) -> Result<ControlLaw> {
    // Collision-course override.
    if let Some(obstacle) = panic_obstacle(ego, scenario, gains) {
        if let Some(cur) = current {
            if cur.kind == ControlKind::Circle
                && cur.targets[0] == TargetRef::Feature(obstacle.id.clone())
            {
                return Ok(cur.clone());
            }
        }
        return Ok(ControlLaw::circle(
            obstacle.id.clone(),
            gains.panic,
            ego.speed / gains.min_standoff,
        )
        .expect("validated gains"));
    }

    // Gate-chain progression.
    if let Some(idx) = current.and_then(|law| pair_index(scenario, law)) {
        let cur_pair = &scenario.memorized_sequence[idx];
        if let Some(next_pair) = scenario.memorized_sequence.get(idx + 1) {
            // Distance to the next gate's new feature vs the current gate's
            // own (shared features cancel out of the comparison).
            let new_dist = [&next_pair.0, &next_pair.1]
                .iter()
                .filter(|id| **id != &cur_pair.0 && **id != &cur_pair.1)
                .filter_map(|id| scenario.feature(id))
                .map(|f| ahead_distance(ego, f.point()))
                .fold(f64::INFINITY, f64::min);
            let own_dist = [&cur_pair.0, &cur_pair.1]
                .iter()
                .filter(|id| **id != &next_pair.0 && **id != &next_pair.1)
                .filter_map(|id| scenario.feature(id))
                .map(|f| ahead_distance(ego, f.point()))
                .fold(f64::INFINITY, f64::min);
            if new_dist < own_dist {
                return Ok(gate_law(next_pair, gains));
            }
        }
        if nearest_ahead_distance(ego, scenario, cur_pair).is_finite() {
            return Ok(current.expect("checked above").clone());
        }
        // Both features of the current gate have passed.
        return match first_unpassed_pair(ego, scenario, idx + 1) {
            Some((_, pair)) => Ok(gate_law(pair, gains)),
            None => Err(Error::EndOfCorridor),
        };
    }

    // Pre-gate phase: follow a leader until the first gate takes over.
    if let Some(leader) = leader {
        let leader_dist = forward_distance(ego, leader.state.position);
        if let Some((_, pair)) = first_unpassed_pair(ego, scenario, 0) {
            if nearest_ahead_distance(ego, scenario, pair) < leader_dist {
                return Ok(gate_law(pair, gains));
            }
        }
        return Ok(ControlLaw::follow(leader.id.clone(), gains.follow).expect("validated gains"));
    }

    // Memory-guided phase: obstacle standoff, then the gate chain. Only
    // obstacles inside the attention cone anchor a circling arc.
    let obstacle = scenario
        .obstacles()
        .filter(|f| {
            let r = f.point() - ego.position;
            let r_x = r.dot(&ego.tangent);
            r_x > EPS_FRONT
                && ego.tangent.perp(&r).atan2(r_x).abs() <= gains.attention_half_angle
        })
        .min_by(|a, b| {
            forward_distance(ego, a.point())
                .partial_cmp(&forward_distance(ego, b.point()))
                .unwrap()
        });
    let gate = first_unpassed_pair(ego, scenario, 0);
    match (obstacle, gate) {
        (Some(o), gate) => {
            let o_dist = forward_distance(ego, o.point());
            if let Some((_, pair)) = gate {
                if nearest_ahead_distance(ego, scenario, pair) < o_dist {
                    return Ok(gate_law(pair, gains));
                }
            }
            if let Some(cur) = current {
                if cur.kind == ControlKind::Circle
                    && cur.targets[0] == TargetRef::Feature(o.id.clone())
                {
                    return Ok(cur.clone());
                }
            }
            Ok(circle_law(&o.id, ego, o.point(), gains))
        }
        (None, Some((_, pair))) => Ok(gate_law(pair, gains)),
        (None, None) => Err(Error::EndOfCorridor),
    }
}

/// Evaluate a law's curvature command against the current world state.
fn evaluate_law(
    law: &ControlLaw,
    ego: &VehicleState,
    scenario: &Scenario,
    snapshot: &[AgentSnapshot],
    gains: &LawGains,
) -> Result<f64> {
    match law.kind {
        ControlKind::Follow => {
            let TargetRef::Agent(id) = &law.targets[0] else {
                return Err(Error::Config("follow law needs an agent target".into()));
            };
            let leader = snapshot
                .iter()
                .find(|a| &a.id == id)
                .ok_or_else(|| Error::TargetPassed(format!("leader {id} no longer active")))?;
            // Dissolve once the leader is out of front or out of range.
            let geom = crate::perception::relative_geometry(&leader.state, ego);
            if geom.r_x <= EPS_FRONT {
                return Err(Error::LeaderNotInFront { r_x: geom.r_x });
            }
            Ok(steering::follow_control(&leader.state, ego, law.gain))
        }
        ControlKind::Circle => {
            let TargetRef::Feature(id) = &law.targets[0] else {
                return Err(Error::Config("circle law needs a feature target".into()));
            };
            let feature = scenario
                .feature(id)
                .ok_or_else(|| Error::Config(format!("unknown feature {id}")))?;
            steering::circling_control(
                feature.point(),
                ego,
                law.gain,
                law.setpoint.unwrap_or(0.0),
            )
        }
        ControlKind::DistanceMaintain => {
            let ids: Vec<&String> = law
                .targets
                .iter()
                .map(|t| match t {
                    TargetRef::Feature(id) => id,
                    TargetRef::Agent(id) => id,
                })
                .collect();
            let f1 = scenario
                .feature(ids[0])
                .ok_or_else(|| Error::Config(format!("unknown feature {}", ids[0])))?;
            let f2 = scenario
                .feature(ids[1])
                .ok_or_else(|| Error::Config(format!("unknown feature {}", ids[1])))?;
            // Posts inside the standoff floor are mid-transit: their loom is
            // about to blow up, so the crossing is committed and they stop
            // steering the gate.
            let committed = |p: Vector2<f64>| forward_distance(ego, p) <= gains.min_standoff;
            match (committed(f1.point()), committed(f2.point())) {
                (false, false) => steering::distance_maintenance_control(
                    f1.point(),
                    f2.point(),
                    ego,
                    law.gain,
                ),
                (true, true) => {
                    if is_ahead(ego, f1.point()) || is_ahead(ego, f2.point()) {
                        Ok(0.0)
                    } else {
                        Err(Error::TargetPassed("both features behind agent".into()))
                    }
                }
                _ => Ok(0.0),
            }
        }
        _ => Err(Error::Config(format!(
            "law {} is not used by the integrated strategy",
            law.kind.as_str()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Episode execution
// ---------------------------------------------------------------------------

/// Control annotation for one recorded sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Curvature applied over the step starting at this sample (1/m).
    pub curvature: f64,
    /// Active primitive kind.
    pub law: ControlKind,
    /// Leader id while the following law is active.
    pub leader: Option<String>,
}

/// One primitive switch in an agent's log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub law: ControlLaw,
}

/// Trajectory plus per-sample control annotations for one agent.
#[derive(Debug, Clone)]
pub struct AgentRecord {
    pub trajectory: Trajectory,
    /// Parallel to `trajectory.samples`.
    pub steps: Vec<StepInfo>,
    pub switches: Vec<SwitchEvent>,
}

/// All agent records from one episode, in arrival order.
#[derive(Debug, Clone, Default)]
pub struct EpisodeOutput {
    pub records: Vec<AgentRecord>,
}

impl EpisodeOutput {
    pub fn trajectories(&self) -> Vec<Trajectory> {
        self.records.iter().map(|r| r.trajectory.clone()).collect()
    }
}

struct LiveAgent {
    emergence: f64,
    state: VehicleState,
    current: Option<ControlLaw>,
    last_switch: f64,
    record: AgentRecord,
    done: bool,
    spawned: bool,
}

/// Run one episode: Poisson arrivals, Gaussian entry states, synchronous
/// stepping of every active agent under the selected primitives.
/// Deterministic for a fixed `rng_seed`.
pub fn run_episode(scenario: &Scenario, config: &EpisodeConfig) -> Result<EpisodeOutput> {
    let arrivals = emergence::sample_poisson_with(
        config.arrival_rate,
        (0.0, config.horizon.max(f64::MIN_POSITIVE)),
        &mut rng::stream(config.rng_seed, rng::ARRIVALS_STREAM),
    )?;
    run_episode_with_arrivals(scenario, config, &arrivals.times)
}

/// As [`run_episode`] with the arrival times injected directly; entry states
/// still come from the per-agent seed streams.
pub fn run_episode_with_arrivals(
    scenario: &Scenario,
    config: &EpisodeConfig,
    arrivals: &[f64],
) -> Result<EpisodeOutput> {
    scenario.validate()?;
    config.validate()?;

    let entry_chol = scenario.entry.cholesky()?;
    let mut agents: Vec<LiveAgent> = Vec::with_capacity(arrivals.len());
    for (i, &t_arrival) in arrivals.iter().enumerate() {
        let mut agent_rng = rng::stream(config.rng_seed, rng::agent_stream(i));
        let z = Vector2::new(
            StandardNormal.sample(&mut agent_rng),
            StandardNormal.sample(&mut agent_rng),
        );
        let position = scenario.entry.mean_point() + entry_chol * z;
        let heading = scenario.entry.heading_mean
            + scenario.entry.heading_std * agent_rng.sample::<f64, _>(StandardNormal);
        let speed = (config.speed_mean
            + config.speed_std * agent_rng.sample::<f64, _>(StandardNormal))
        .max(0.5);
        if !(t_arrival.is_finite() && t_arrival >= 0.0) {
            return Err(Error::Config(format!("bad arrival time {t_arrival}")));
        }
        let id = format!("a{i:03}");
        agents.push(LiveAgent {
            emergence: t_arrival,
            state: VehicleState::from_heading(position, heading, speed)?,
            current: None,
            last_switch: f64::NEG_INFINITY,
            record: AgentRecord {
                trajectory: Trajectory::new(id, t_arrival),
                steps: Vec::new(),
                switches: Vec::new(),
            },
            done: false,
            spawned: false,
        });
    }

    let (bounds_min, bounds_max) = scenario.bounds_box();
    let margin = 2.0;
    // Generous guard: the whole arrival window plus ample transit time.
    let last_arrival = arrivals.iter().cloned().fold(0.0, f64::max);
    let max_ticks = ((last_arrival + 30.0) / config.dt).ceil() as u64;

    for tick in 0..=max_ticks {
        let now = tick as f64 * config.dt;

        for agent in agents.iter_mut() {
            if !agent.spawned && agent.emergence <= now {
                agent.spawned = true;
            }
        }
        if agents.iter().all(|a| a.done) {
            break;
        }

        // Decisions read a frozen start-of-tick snapshot of all active agents.
        let snapshot: Vec<AgentSnapshot> = agents
            .iter()
            .filter(|a| a.spawned && !a.done)
            .map(|a| AgentSnapshot {
                id: a.record.trajectory.agent_id.clone(),
                emergence_time: a.emergence,
                state: a.state,
            })
            .collect();

        for agent in agents.iter_mut() {
            if !agent.spawned || agent.done {
                continue;
            }
            let ego_snapshot = AgentSnapshot {
                id: agent.record.trajectory.agent_id.clone(),
                emergence_time: agent.emergence,
                state: agent.state,
            };
            let leader = detect_leader(&ego_snapshot, &snapshot, &config.pairing, now);

            let desired =
                match select_primitive(&agent.state, scenario, leader, agent.current.as_ref(), &config.gains) {
                    Ok(law) => law,
                    Err(Error::EndOfCorridor) => {
                        agent.done = true;
                        continue;
                    }
                    Err(e) => return Err(e),
                };

            if agent.current.as_ref() != Some(&desired) {
                let current_broken = match &agent.current {
                    None => true,
                    Some(cur) => {
                        evaluate_law(cur, &agent.state, scenario, &snapshot, &config.gains)
                            .is_err()
                    }
                };
                let forced = current_broken
                    || is_panic_selection(&desired, &agent.state, scenario, &config.gains);
                if forced || now - agent.last_switch >= config.gains.min_dwell {
                    agent.current = Some(desired);
                    agent.last_switch = now;
                    agent.record.switches.push(SwitchEvent {
                        time: now,
                        law: agent.current.clone().expect("just set"),
                    });
                }
            }

            let law = agent.current.clone().expect("set on first selection");
            let u = match evaluate_law(&law, &agent.state, scenario, &snapshot, &config.gains) {
                Ok(u) => clamp_curvature(u, Some(config.gains.max_curvature)),
                // Target slipped away within the dwell window: glide straight
                // for one step; the next tick reselects.
                Err(_) => 0.0,
            };

            agent.record.trajectory.samples.push(Sample {
                time: now,
                state: agent.state,
            });
            agent.record.steps.push(StepInfo {
                curvature: u,
                law: law.kind,
                leader: leader.map(|l| l.id.clone()),
            });

            agent.state = step(&agent.state, u, config.dt)?;
            let p = agent.state.position;
            if p.x < bounds_min.x - margin
                || p.x > bounds_max.x + margin
                || p.y < bounds_min.y - margin
                || p.y > bounds_max.y + margin
            {
                agent.done = true;
            }
        }
    }

    let records = agents
        .into_iter()
        .filter(|a| !a.record.trajectory.samples.is_empty())
        .map(|a| a.record)
        .collect();
    Ok(EpisodeOutput { records })
}
