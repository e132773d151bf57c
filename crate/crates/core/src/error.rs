use thiserror::Error;

/// Everything that can go wrong while building or checking a curve.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {t} lies outside the domain [{min}, {max}]")]
    OutOfDomain { t: f64, min: f64, max: f64 },

    #[error("derivative order {order} is unavailable at t = {t}")]
    OrderUnavailable { order: usize, t: f64 },

    #[error("integrand returned a non-finite value at t = {t}")]
    NonFiniteSample { t: f64 },

    #[error("curve is irregular at t = {t} (speed {speed:e})")]
    IrregularCurve { t: f64, speed: f64 },

    #[error("curve leaves the unit sphere at t = {t} (norm {norm})")]
    NotSpherical { t: f64, norm: f64 },

    #[error("curve is not unit speed at t = {t} (speed {speed})")]
    NotUnitSpeed { t: f64, speed: f64 },

    #[error("inflection point at t = {t}: curvature {kappa:e}")]
    InflectionPoint { t: f64, kappa: f64 },

    #[error("level {k} is degenerate at t = {t}")]
    DegenerateLevel { k: usize, t: f64 },

    #[error("chain depth {requested} exceeds the limit {limit}")]
    DepthLimit { requested: usize, limit: usize },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("argument {x} is outside the supported range (|x| <= {limit})")]
    RangeExceeded { x: f64, limit: f64 },

    #[error("resonant parameters: denominator {value:e} is within {delta:e} of zero")]
    ResonantParameters { value: f64, delta: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
