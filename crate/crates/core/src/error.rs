use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the rate and parameter routines.
///
/// `Infeasible` is kept apart from the input errors: parameter sweeps hit
/// infeasible cells (a zero relay power share, a zero bottleneck rate) as a
/// matter of course and skip them, while the other variants mean the caller
/// passed something wrong.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    Domain { what: &'static str, value: f64 },
    /// A parameter set violates a structural invariant.
    InvalidParams(&'static str),
    /// A compression noise is below its admissible lower bound.
    ConstraintViolated {
        bound: &'static str,
        value: f64,
        required: f64,
    },
    /// The requested operating point cannot be reached at any finite
    /// parameter value.
    Infeasible(&'static str),
    /// Probability tables with the wrong shape or normalisation.
    InvalidDistribution(&'static str),
    /// A dense tensor request above the supported size.
    TooLarge { entries: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::ConstraintViolated {
                bound,
                value,
                required,
            } => write!(
                f,
                "constraint {bound} violated: got {value}, need at least {required}"
            ),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::TooLarge { entries, limit } => {
                write!(f, "tensor with {entries} entries exceeds limit of {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible(_))
    }
}
