//! Relative-geometry observables for a leader-follower pair.
//!
//! Everything here is derived from the baseline `r = r_l - r_f` expressed in
//! the follower's body frame: the projections `r_x = r . x_f` and
//! `r_y = r . y_f`, the virtual loom, the pinhole image coordinate of the
//! leader on the follower's side-looking retina, and time-to-transit.

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::kinematics::VehicleState;

/// Minimum forward projection (meters) for the leader to count as in front.
pub const EPS_FRONT: f64 = 1e-6;

/// Default pinhole focal length in meters. Only ratios enter the control
/// laws, so the exact value is a modeling convenience.
pub const DEFAULT_FOCAL_LENGTH: f64 = 0.01;

/// Baseline vector and its body-frame projections for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGeometry {
    /// Leader position minus follower position (meters).
    pub r: Vector2<f64>,
    /// Projection of `r` onto the follower tangent.
    pub r_x: f64,
    /// Projection of `r` onto the follower normal.
    pub r_y: f64,
    /// Heading alignment `x_f . x_l`, in [-1, 1].
    pub alignment: f64,
}

/// Compute the baseline and its projections in the follower's frame.
pub fn relative_geometry(leader: &VehicleState, follower: &VehicleState) -> RelativeGeometry {
    let r = leader.position - follower.position;
    RelativeGeometry {
        r,
        r_x: r.dot(&follower.tangent),
        r_y: r.dot(&follower.normal),
        alignment: follower.tangent.dot(&leader.tangent).clamp(-1.0, 1.0),
    }
}

/// Virtual loom of the leader as seen by the follower:
/// `lambda = (1 - x_f . x_l) v_f / (r . x_f)`, units 1/s.
///
/// Zero exactly at parallel headings (the pair's equilibrium); requires the
/// leader in front (`r_x > EPS_FRONT`). Callers handle the not-in-front error
/// by dissolving the pair.
pub fn virtual_loom(leader: &VehicleState, follower: &VehicleState) -> Result<f64> {
    let geom = relative_geometry(leader, follower);
    if geom.r_x <= EPS_FRONT {
        return Err(Error::LeaderNotInFront { r_x: geom.r_x });
    }
    Ok((1.0 - geom.alignment) * follower.speed / geom.r_x)
}

/// Image-plane coordinate of a point at body-frame offsets (`r_x`, `r_y`)
/// for a side-looking pinhole camera: `d = f r_x / (r_y - f)`.
pub fn image_coordinate(r_x: f64, r_y: f64, focal_length: f64) -> Result<f64> {
    if !(r_x.is_finite() && r_y.is_finite() && focal_length.is_finite() && focal_length > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bad projection inputs r_x={r_x} r_y={r_y} f={focal_length}"
        )));
    }
    if r_y <= focal_length {
        return Err(Error::BehindImagePlane {
            r_y,
            focal_length,
        });
    }
    Ok(focal_length * r_x / (r_y - focal_length))
}

/// Time-to-transit from an image coordinate and its rate: `tau = d / d_dot`.
///
/// Returns `f64::INFINITY` when the image point is not moving
/// (`|d_dot| < 1e-12`): matched parallel flight is the desired steady state,
/// not a fault.
pub fn time_to_transit(d: f64, d_dot: f64) -> f64 {
    if d_dot.abs() < 1e-12 {
        f64::INFINITY
    } else {
        d / d_dot
    }
}
