use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    Validation(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("window [{start}, {end}] is not covered by samples on [{t0}, {t1}]")]
    Range { start: f64, end: f64, t0: f64, t1: f64 },
    #[error("degenerate signal: {0}")]
    Degenerate(String),
    #[error("phase undefined: amplitude {amplitude} below r_min = {r_min}")]
    UndefinedPhase { amplitude: f64, r_min: f64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error("unstable network: {0}")]
    UnstableNetwork(String),
    #[error("integrator accuracy: {0}")]
    Integrator(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("numerical instability at t = {t}: {what}")]
    Instability { t: f64, what: String },
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
