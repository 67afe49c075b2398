use thiserror::Error;

/// Errors raised by the geometry, planning and transport layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("invalid map germ: {0}")]
    InvalidGerm(String),

    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    #[error("forms {0} and {1} are proportional")]
    ProportionalForms(usize, usize),

    #[error("unknown germ `{0}`")]
    UnknownGerm(String),

    #[error("point is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("sphere dimension {m} has the wrong parity for this operation")]
    ParityMismatch { m: usize },

    #[error("region index {index} is not valid here")]
    RegionIndex { index: usize },

    #[error("input pair is antipodal (margin {margin:e})")]
    Antipodal { margin: f64 },

    #[error("point lies within the north-pole guard band")]
    NearNorthPole,

    #[error("pair lies outside region {region} (margin {margin:e})")]
    OutsideRegion { region: usize, margin: f64 },

    #[error("path endpoints do not meet (gap {gap:e})")]
    EndpointMismatch { gap: f64 },

    #[error("jacobian is rank deficient (smallest singular value {sigma_min:e})")]
    RankDeficient { sigma_min: f64 },

    #[error("newton retraction did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("iterate left the ball (norm {norm}, radius {radius})")]
    BallExit { norm: f64, radius: f64 },

    #[error("lift failed on t in [{t0}, {t1}]: {source}")]
    Lift {
        t0: f64,
        t1: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("level residual blew up to {residual:e}")]
    ResidualBlowUp { residual: f64 },

    #[error("only {found} of {wanted} fiber samples after {attempts} attempts")]
    FiberSampling {
        found: usize,
        wanted: usize,
        attempts: usize,
    },

    #[error("no path inside the fiber after {attempts} attempts")]
    FiberPath { attempts: usize },

    #[error("operation needs {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
