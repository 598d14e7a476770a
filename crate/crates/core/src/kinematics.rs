//! Unit-speed Frenet-frame vehicle model and its exact arc integrator.
//!
//! An agent is a point moving in the plane at constant speed `v` along its
//! unit tangent `x`, with unit normal `y` (tangent rotated +90 degrees) and
//! plane curvature `u` as the steering input:
//!
//! ```text
//!   r' = v x,   x' = v u y,   y' = -v u x
//! ```
//!
//! For piecewise-constant `u` this system is exactly integrable: each step is
//! a circular arc (or a straight segment when `u` is zero), so the frame
//! stays orthonormal up to floating-point rounding with no integrator drift.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Curvatures below this magnitude step along a straight segment, using a
/// series expansion of the arc to avoid dividing by `u`.
pub const STRAIGHT_THRESHOLD: f64 = 1e-12;

/// Tolerance for frame orthonormality checks.
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// Rotate a vector by +90 degrees (right-handed frame).
#[inline]
pub fn rot90(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

/// Planar pose of one agent: position, unit tangent, unit normal, speed.
///
/// The normal is always the tangent rotated +90 degrees, so the frame
/// `[tangent normal]` is right-handed with determinant +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// Position in meters.
    pub position: Vector2<f64>,
    /// Unit tangent (direction of travel).
    pub tangent: Vector2<f64>,
    /// Unit normal, tangent rotated +90 degrees.
    pub normal: Vector2<f64>,
    /// Speed in m/s, strictly positive.
    pub speed: f64,
}

impl VehicleState {
    /// Build a state from position, tangent direction and speed.
    ///
    /// The tangent must already be unit length (within [`FRAME_TOLERANCE`]);
    /// use [`renormalize`] for almost-unit inputs.
    pub fn new(position: Vector2<f64>, tangent: Vector2<f64>, speed: f64) -> Result<Self> {
        let state = VehicleState {
            position,
            tangent,
            normal: rot90(tangent),
            speed,
        };
        state.validate()?;
        Ok(state)
    }

    /// Build a state from a heading angle in radians (0 = +x axis).
    pub fn from_heading(position: Vector2<f64>, heading: f64, speed: f64) -> Result<Self> {
        if !heading.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite heading {heading}")));
        }
        Self::new(position, Vector2::new(heading.cos(), heading.sin()), speed)
    }

    /// Heading angle of the tangent in radians.
    pub fn heading(&self) -> f64 {
        self.tangent.y.atan2(self.tangent.x)
    }

    /// Check the frame invariants: unit tangent and normal, orthogonality,
    /// right-handedness, positive finite speed.
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.position.x,
            self.position.y,
            self.tangent.x,
            self.tangent.y,
            self.normal.x,
            self.normal.y,
            self.speed,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite state component".into()));
        }
        if (self.tangent.norm() - 1.0).abs() > FRAME_TOLERANCE {
            return Err(Error::DegenerateState(format!(
                "tangent norm {} not unit",
                self.tangent.norm()
            )));
        }
        if (self.normal.norm() - 1.0).abs() > FRAME_TOLERANCE {
            return Err(Error::DegenerateState(format!(
                "normal norm {} not unit",
                self.normal.norm()
            )));
        }
        if self.tangent.dot(&self.normal).abs() > FRAME_TOLERANCE {
            return Err(Error::DegenerateState("frame not orthogonal".into()));
        }
        // det[tangent normal] = +1 for a right-handed frame
        let det = self.tangent.x * self.normal.y - self.normal.x * self.tangent.y;
        if (det - 1.0).abs() > FRAME_TOLERANCE {
            return Err(Error::DegenerateState(format!("frame determinant {det}")));
        }
        if self.speed <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "speed {} must be positive",
                self.speed
            )));
        }
        Ok(())
    }
}

/// Advance a state along the exact constant-curvature arc for `dt` seconds.
///
/// The heading rotates by `theta = speed * u * dt` and the position advances
/// along the circular arc of radius `1/|u|`; for `|u| <` the straight
/// threshold the arc displacement is evaluated by series so no division by
/// `u` occurs. Speed is unchanged.
pub fn step(state: &VehicleState, u: f64, dt: f64) -> Result<VehicleState> {
    if !u.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite curvature {u}")));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("time step {dt} must be positive")));
    }
    let arc = state.speed * dt;
    let theta = arc * u;
    let (sin_t, cos_t) = theta.sin_cos();

    // Displacement in the local (tangent, normal) frame: the chord of the
    // arc, (sin(theta)/u, (1 - cos(theta))/u).
    let (along, across) = if u.abs() < STRAIGHT_THRESHOLD {
        // sin(theta)/u = arc (1 - theta^2/6 + ...), (1-cos)/u = arc theta/2 - ...
        (arc * (1.0 - theta * theta / 6.0), arc * theta / 2.0)
    } else {
        (sin_t / u, (1.0 - cos_t) / u)
    };

    let position = state.position + state.tangent * along + state.normal * across;
    let tangent = state.tangent * cos_t + state.normal * sin_t;

    Ok(VehicleState {
        position,
        tangent,
        normal: rot90(tangent),
        speed: state.speed,
    })
}

/// Renormalize an almost-unit tangent and recompute the normal from it.
///
/// Accepts tangents within 1e-3 of unit length; anything shorter is treated
/// as degenerate.
pub fn renormalize(state: &VehicleState) -> Result<VehicleState> {
    let norm = state.tangent.norm();
    if !norm.is_finite() || norm < 1e-3 {
        return Err(Error::DegenerateState(format!(
            "cannot renormalize tangent of norm {norm}"
        )));
    }
    let tangent = state.tangent / norm;
    Ok(VehicleState {
        position: state.position,
        tangent,
        normal: rot90(tangent),
        speed: state.speed,
    })
}

/// One time-stamped sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Time in seconds.
    pub time: f64,
    /// Vehicle state at that time.
    pub state: VehicleState,
}

/// Time-stamped state sequence for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Agent identifier, unique within an ensemble.
    pub agent_id: String,
    /// Samples with strictly increasing times.
    pub samples: Vec<Sample>,
    /// First-appearance time of the agent, in seconds.
    pub emergence_time: f64,
}

impl Trajectory {
    pub fn new(agent_id: impl Into<String>, emergence_time: f64) -> Self {
        Trajectory {
            agent_id: agent_id.into(),
            samples: Vec::new(),
            emergence_time,
        }
    }

    /// Check sample ordering and per-sample state invariants.
    pub fn validate(&self) -> Result<()> {
        for pair in self.samples.windows(2) {
            if pair[1].time <= pair[0].time {
                return Err(Error::InvalidInput(format!(
                    "trajectory {}: times not strictly increasing at t = {}",
                    self.agent_id, pair[1].time
                )));
            }
        }
        for s in &self.samples {
            s.state.validate()?;
        }
        Ok(())
    }

    pub fn first_time(&self) -> Option<f64> {
        self.samples.first().map(|s| s.time)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.time)
    }

    /// Positions of all samples in order.
    pub fn positions(&self) -> Vec<Vector2<f64>> {
        self.samples.iter().map(|s| s.state.position).collect()
    }

    /// Whether the agent has a sample at (is active around) time `t`.
    pub fn active_at(&self, t: f64) -> bool {
        match (self.first_time(), self.last_time()) {
            (Some(a), Some(b)) => t >= a && t <= b,
            _ => false,
        }
    }

    /// State at time `t`, linearly interpolated between bracketing samples.
    ///
    /// Positions interpolate linearly; the tangent is taken from the earlier
    /// bracketing sample (adequate at camera frame rates). Returns `None`
    /// outside the sampled time range.
    pub fn state_at(&self, t: f64) -> Option<VehicleState> {
        if self.samples.is_empty() || !self.active_at(t) {
            return None;
        }
        let idx = match self
            .samples
            .binary_search_by(|s| s.time.partial_cmp(&t).unwrap())
        {
            Ok(i) => return Some(self.samples[i].state),
            Err(i) => i,
        };
        // idx > 0 and idx < len because t is inside the sampled range
        let a = &self.samples[idx - 1];
        let b = &self.samples[idx];
        let w = (t - a.time) / (b.time - a.time);
        let mut state = a.state;
        state.position = a.state.position * (1.0 - w) + b.state.position * w;
        Some(state)
    }

    /// Mean of the y coordinate over all samples.
    pub fn mean_y(&self) -> Option<f64> {
        if self.samples.is_empty() {
            return None;
        }
        let sum: f64 = self.samples.iter().map(|s| s.state.position.y).sum();
        Some(sum / self.samples.len() as f64)
    }
}
