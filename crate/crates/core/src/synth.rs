//! Closed-loop synthesis of leader-follower pairs under a chosen law.
//!
//! Produces labeled trajectory pairs for exercising the pursuit classifier:
//! a leader driven by an arbitrary curvature program and a follower closing
//! the loop through one of the steering laws.

use crate::error::Result;
use crate::kinematics::{step, Sample, Trajectory, VehicleState};
use crate::steering;

/// Follower-side law used in a synthesized pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairLaw {
    Follow { k: f64 },
    ClassicalPursuit { k: f64 },
    ConstantBearing { k: f64, setpoint: f64 },
    MotionCamouflage { k: f64 },
}

/// Simulate a pair for `duration` seconds at step `dt`, the leader following
/// the curvature program `leader_u(t)`.
pub fn synthesize_pair(
    leader0: VehicleState,
    leader_u: impl Fn(f64) -> f64,
    follower0: VehicleState,
    law: PairLaw,
    dt: f64,
    duration: f64,
) -> Result<(Trajectory, Trajectory)> {
    let mut leader_traj = Trajectory::new("leader", 0.0);
    let mut follower_traj = Trajectory::new("follower", dt);

    let mut leader = leader0;
    let mut follower = follower0;
    let mut r_prev = leader.position - follower.position;
    let steps = (duration / dt).round() as usize;

    for i in 0..=steps {
        let t = i as f64 * dt;
        leader_traj.samples.push(Sample { time: t, state: leader });
        // The follower emerges one frame after the leader; its track starts
        // at its emergence time.
        if i > 0 {
            follower_traj.samples.push(Sample { time: t, state: follower });
        }

        let r_curr = leader.position - follower.position;
        let u_f = match law {
            PairLaw::Follow { k } => steering::follow_control(&leader, &follower, k),
            PairLaw::ClassicalPursuit { k } => {
                steering::classical_pursuit_control(&leader, &follower, k)?
            }
            PairLaw::ConstantBearing { k, setpoint } => {
                steering::constant_bearing_control(&leader, &follower, k, setpoint)?
            }
            PairLaw::MotionCamouflage { k } => {
                steering::motion_camouflage_control(r_prev, r_curr, dt, k)?
            }
        };
        r_prev = r_curr;

        leader = step(&leader, leader_u(t), dt)?;
        follower = step(&follower, u_f, dt)?;
    }
    Ok((leader_traj, follower_traj))
}
