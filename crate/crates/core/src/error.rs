use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("f(lo) and f(hi) have the same sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("block {index} violates the power constraint")]
    InfeasibleBlock { index: usize },

    #[error("no feasible samples among {samples} draws")]
    ZeroHits { samples: usize },

    #[error("eta = {eta} must be < 1 for the truncation sandwich")]
    EtaTooLarge { eta: f64 },

    #[error("conjugate search interval [{lo}, {hi}] is inverted")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("unsupported density kind: {0}")]
    UnsupportedKind(&'static str),
}

impl Error {
    /// True for failures of an iterative or sampling procedure, as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::ZeroHits { .. })
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
