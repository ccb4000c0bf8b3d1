use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error(
        "boundary decay violated at the {end} end: theta = {theta:e} > {eps:e} (domain too short for the profile width)"
    )]
    BoundaryDecay {
        end: &'static str,
        theta: f64,
        eps: f64,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("closure undefined: {0}")]
    ClosureUndefined(String),

    #[error("curve is already closed")]
    AlreadyClosed,

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error(
        "reference-curve formula invalid: 1 + n0.n = {denominator:e} <= {delta:e} at node {index} (s = {s})"
    )]
    FullerHypothesis {
        index: usize,
        s: f64,
        denominator: f64,
        delta: f64,
    },

    #[error("energy bound undefined for |M| = {m_abs:e} (ground state)")]
    BoundUndefined { m_abs: f64 },

    #[error("time step {dt:e} exceeds the explicit stability limit {limit:e}")]
    TimeStepTooLarge { dt: f64, limit: f64 },

    #[error("numerical blow-up; last finite state at t = {t_last}")]
    NumericalBlowUp { t_last: f64 },

    #[error("trace needs at least two samples, got {0}")]
    ShortTrace(usize),

    #[error(
        "insufficient lambda resolution: writhe step {delta} between lambda {lambda_lo} and {lambda_hi}"
    )]
    InsufficientResolution {
        lambda_lo: f64,
        lambda_hi: f64,
        delta: f64,
    },

    #[error("closure failed along homotopy at lambda = {lambda}: {source}")]
    PathClosure {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
