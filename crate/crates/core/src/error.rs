use thiserror::Error;

/// Errors raised by the pricing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid basket: {0}")]
    InvalidBasket(String),

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("correlation matrix is not positive semidefinite (pivot {pivot:.3e} at index {index})")]
    NotPsd { index: usize, pivot: f64 },

    #[error("degenerate basket: variance {variance:.3e} is negative beyond tolerance")]
    DegenerateBasket { variance: f64 },

    #[error("basket variance is zero; the approximant is undefined")]
    ZeroVariance,

    #[error("basket skewness {eta:.3e} is below the calibration threshold")]
    DegenerateSkew { eta: f64 },

    #[error("mixing law `{law}`: MGF argument {argument} is outside its domain (bound {bound})")]
    MgfDomain {
        law: String,
        argument: f64,
        bound: f64,
    },

    #[error("mixing law `{law}` has an empty MGF domain")]
    EmptyDomain { law: String },

    #[error("mixing law `{law}`: no root of the skewness equation for |eta| = {eta} (g ranges over [{g_min:.6e}, {g_max:.6e}])")]
    NoRoot {
        law: String,
        eta: f64,
        g_min: f64,
        g_max: f64,
    },

    #[error("unknown mixing law `{0}` (expected exp1, gamma22, ig12 or pointmass)")]
    UnknownLaw(String),

    #[error("mixing law `{law}` does not provide {what}")]
    LawCapability { law: String, what: &'static str },

    #[error("quadrature did not converge: estimate {estimate:.6e}, error {error:.3e} after {intervals} intervals")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("strike {strike} lies on the case boundary {boundary}; the derivative is one-sided")]
    CaseBoundary { strike: f64, boundary: f64 },

    #[error("small-skew expansion requires the c = -1, K < -tau branch")]
    WrongBranch,

    #[error("sampler for `{law}` failed at path {path} (drew {value})")]
    SamplerFailure { law: String, path: u64, value: f64 },

    #[error("invalid Monte-Carlo configuration: {0}")]
    InvalidConfig(String),

    #[error("metrics need at least one case")]
    EmptyCases,

    #[error("case `{0}` has a zero benchmark price")]
    ZeroBenchmark(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
