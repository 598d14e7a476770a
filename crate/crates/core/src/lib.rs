//! Planar leader-follower flight simulation and trajectory analysis.
//!
//! The crate has two halves that share one vocabulary:
//!
//! - **Simulation**: a unit-speed Frenet-frame vehicle model
//!   ([`kinematics`]), relative-geometry observables built on time-to-transit
//!   and loom ([`perception`]), steering laws ([`steering`]), and an
//!   integrated corridor-navigation strategy with Poisson arrivals
//!   ([`strategy`], [`emergence`]).
//! - **Analysis**: trajectory smoothing, arc-length path statistics,
//!   leader/follower role classification and pursuit-law tests
//!   ([`analysis`]), applicable both to synthesized ensembles and to
//!   ingested track files ([`io`]).
//!
//! All randomness is seeded; fixed seeds reproduce runs bit-exactly.

pub mod analysis;
pub mod emergence;
pub mod error;
pub mod io;
pub mod kinematics;
pub mod perception;
pub mod rng;
pub mod steering;
pub mod strategy;
pub mod svg;
pub mod synth;

pub use error::Error;

/// Camera frame interval used as the default simulation step, so synthesized
/// and ingested tracks share a time base (131.5 Hz).
pub const DEFAULT_DT: f64 = 1.0 / 131.5;

/// Default agent speed in m/s (average observed flight speed).
pub const DEFAULT_SPEED: f64 = 10.17;
