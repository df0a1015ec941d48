use thiserror::Error;

/// Errors raised by the geometry, speed, flow and I/O layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HmcfError {
    #[error("grid too coarse: {interior} interior nodes, need at least {required}")]
    GridTooCoarse { interior: usize, required: usize },

    #[error("non-uniform grid: spacing deviates by {deviation:e} at node {index}")]
    NonUniformGrid { index: usize, deviation: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("degenerate profile: f = {value} at x = {x}")]
    DegenerateProfile { x: f64, value: f64 },

    #[error("mean convexity lost: H~ = {value} at x = {x}")]
    MeanConvexityLost { x: f64, value: f64 },

    #[error("speed undefined: H = {0} <= 0")]
    SpeedUndefined(f64),

    #[error("not mean convex at scale: lambda1 = {0} <= 0")]
    NotMeanConvexAtScale(f64),

    #[error("gradient degenerate: |p| = {0}")]
    GradientDegenerate(f64),

    #[error("tip chart failure ({side}): {reason}")]
    TipChartFailure { side: &'static str, reason: String },

    #[error("step collapse: dt = {dt:e} below {dt_min:e} at t = {t}")]
    StepCollapse { t: f64, dt: f64, dt_min: f64 },

    #[error("post-extinction query: t = {t} >= T = {extinction}")]
    PostExtinction { t: f64, extinction: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("preset {name:?} fails validation: {reason}")]
    InvalidPreset { name: String, reason: String },

    #[error("initial data rejected: {0}")]
    HypothesisFailed(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HmcfError {
    fn from(err: std::io::Error) -> Self {
        HmcfError::Io(err.to_string())
    }
}

pub type Result<T, E = HmcfError> = std::result::Result<T, E>;
