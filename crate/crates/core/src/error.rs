//! Error types shared across the crate.

use thiserror::Error;

/// Top-level error for all library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input was non-finite or outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A vehicle frame could not be normalized (near-zero tangent).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// The observed target is not in front of the observer (r_x <= eps).
    #[error("leader not in front: r_x = {r_x}")]
    LeaderNotInFront { r_x: f64 },

    /// Pinhole projection requested for a point behind the image plane.
    #[error("behind image plane: r_y = {r_y} <= focal length {focal_length}")]
    BehindImagePlane { r_y: f64, focal_length: f64 },

    /// A steering target has passed behind the agent.
    #[error("target passed: {0}")]
    TargetPassed(String),

    /// Leader and follower positions coincide; bearing undefined.
    #[error("degenerate baseline: |r| = {dist}")]
    DegenerateBaseline { dist: f64 },

    /// A statistical operation was given too little data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// No steering target remains ahead: the agent has finished the corridor.
    #[error("end of corridor")]
    EndOfCorridor,

    /// A scenario or configuration document failed validation.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed track or sequence file content.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!(),
            }
        } else {
            Error::Parse(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
