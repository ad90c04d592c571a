use thiserror::Error;

use crate::domain::SingularPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid packet: half-width must be positive and finite, got b = {0}")]
    InvalidHalfWidth(f64),

    #[error("invalid packet centre: {0}")]
    InvalidCentre(f64),

    #[error("degenerate range [{x_min}, {x_max}]")]
    DegenerateRange { x_min: f64, x_max: f64 },

    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("could not place {n} samples on [{x_min}, {x_max}] away from the singular points")]
    NoEdgeAvoidingShift { x_min: f64, x_max: f64, n: usize },

    #[error("grid is not edge-avoiding: sample at {sample} lies {distance:e} from singular point {point}")]
    GridNotEdgeAvoiding { sample: f64, point: f64, distance: f64 },

    #[error(transparent)]
    Singular(#[from] SingularPoint),

    #[error("packet widths differ: detector b = {detector_b}, source b = {source_b}")]
    WidthMismatch { detector_b: f64, source_b: f64 },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid spectral configuration: {0}")]
    InvalidConfig(String),

    #[error("payload |x0| + b + |t| = {extent} exceeds half the periodic half-length {limit}")]
    PayloadNearSeam { extent: f64, limit: f64 },

    #[error("periodic half-length {half_length} is shorter than 50 b = {required}")]
    DomainTooShort { half_length: f64, required: f64 },

    #[error(
        "epsilon extrapolation did not converge: successive estimates differ by {spread:e}, step {step:e}"
    )]
    NonConvergence { spread: f64, step: f64 },

    #[error("snapshots do not share one grid")]
    GridMismatch,

    #[error("snapshot times are not uniformly spaced: {0:?}")]
    NonUniformTimes([f64; 3]),

    #[error("no admissible samples left after excluding singular neighbourhoods")]
    NoAdmissibleSamples,

    #[error("fit window must start beyond x0 + 10 b = {min}, got x_lo = {x_lo}")]
    WindowTooClose { x_lo: f64, min: f64 },

    #[error("invalid fit window [{x_lo}, {x_hi}] with {n} samples")]
    InvalidWindow { x_lo: f64, x_hi: f64, n: usize },

    #[error("grid span [{x_min}, {x_max}] does not cover [{need_min}, {need_max}]")]
    InsufficientSpan {
        x_min: f64,
        x_max: f64,
        need_min: f64,
        need_max: f64,
    },

    #[error("overlap series is malformed: {0}")]
    InvalidSeries(String),

    #[error("series time step {step} exceeds b / 10 = {limit}")]
    StepTooCoarse { step: f64, limit: f64 },

    #[error("unknown figure id {0}")]
    UnknownFigure(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
