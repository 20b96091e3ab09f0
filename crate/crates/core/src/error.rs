use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error(
        "bracket expansion exhausted after {expansions} doublings on [{lo}, {hi}] \
         (f(lo) = {f_lo}, f(hi) = {f_hi})"
    )]
    BracketExhausted { lo: f64, hi: f64, expansions: usize, f_lo: f64, f_hi: f64 },

    #[error("normalization constant estimation failed: {0}")]
    Estimation(String),

    #[error("transport contract violated: {0}")]
    Transport(String),

    #[error("integration failed at step {step} (t = {t}): {reason}")]
    Integration { step: usize, t: f64, reason: String },

    #[error("run {run} failed: {source}")]
    Run { run: usize, source: Box<Error> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown validation suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Errors caused by the user's configuration rather than by a run.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::UnknownSuite(_) => true,
            Error::Run { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
