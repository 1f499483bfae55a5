use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    #[error("enumeration guard exceeded: {work} units of work > limit {limit}")]
    GuardExceeded { work: f64, limit: f64 },

    #[error("rejection-dominated regime: acceptance denominator {denominator} is not positive")]
    RejectionDominated { denominator: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) => 2,
            Error::GuardExceeded { .. } | Error::Infeasible(_) | Error::RejectionDominated { .. } => 3,
            _ => 4,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_odd(name: &str, value: usize) -> Result<()> {
    if value == 0 || value % 2 == 0 {
        return Err(invalid(format!("{name} must be odd and positive, got {value}")));
    }
    Ok(())
}
