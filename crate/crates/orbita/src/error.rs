//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid ellipse: {0}")]
    InvalidEllipse(String),

    #[error("invalid conic: {0}")]
    InvalidConic(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("position at the field origin has no defined acceleration")]
    OriginSingularity,

    #[error("collision: |r| = {r:.3e} fell below r_min = {r_min:.3e} at t = {t:.6}")]
    Collision { t: f64, r: f64, r_min: f64 },

    #[error("step limit of {max_steps} exceeded at t = {t:.6} (target {t_end:.6})")]
    StepLimit {
        t: f64,
        t_end: f64,
        max_steps: usize,
    },

    #[error("step size underflow at t = {t:.6}")]
    StepUnderflow { t: f64 },

    #[error("zero angular momentum: radial orbit is degenerate for conic solving")]
    ZeroAngularMomentum,

    #[error("orbit is unbound (e = {e}); no period exists")]
    UnboundOrbit { e: f64 },

    #[error("focal angle {theta} lies outside the admissible range of the conic")]
    OutsideAdmissibleRange { theta: f64 },

    #[error(
        "trajectory is not periodic: state mismatch {deviation:.3e} after one angular revolution"
    )]
    NotPeriodic { deviation: f64 },

    #[error("sample index {index} outside the differentiable interior 2..{max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("grid too coarse: need at least {needed} samples, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    #[error("trajectory samples are not on a uniform time grid")]
    NonUniformGrid,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("point at distance {d:.6} is not exterior to the shell of radius {r:.6}")]
    NotExterior { d: f64, r: f64 },

    #[error(
        "point at distance {d:.6} is too close to the shell surface (R = {r:.6}) \
         for mesh level {level}; request a level of at least 9"
    )]
    NearSurface { d: f64, r: f64, level: u32 },

    #[error("invalid density profile: {0}")]
    InvalidProfile(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
