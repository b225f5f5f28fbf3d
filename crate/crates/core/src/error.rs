use thiserror::Error;

/// Every failure the library reports.
///
/// Variants are grouped by the layer that raises them; [`Error::kind`]
/// collapses them into the coarse categories used for CLI exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // quadrature
    #[error("pole at {pole} lies within {distance:.3e} of the integration path (guard {guard:.1e})")]
    PoleOnPath { pole: String, distance: f64, guard: f64 },
    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:.3e})")]
    NonConvergent { subdivisions: usize, error: f64 },
    #[error("forms share the pole {0}; the sphere integrand is not integrable")]
    OverlappingPoles(String),
    #[error("form is not logarithmic: {0}")]
    NotLogarithmic(String),
    #[error("Monte Carlo variance grows without bound across chunk doublings (ratio {ratio:.2})")]
    NonIntegrableDetected { ratio: f64 },
    #[error("test function is unbounded on the Riemann sphere: {0}")]
    UnboundedTestFunction(String),

    // geometry
    #[error("divisors A and B share the point {0}")]
    OverlappingDivisors(String),
    #[error("point {0} listed twice")]
    DuplicatePoint(String),
    #[error("chains are not in generic position: {0}")]
    NonGenericIntersection(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    // forms
    #[error("factor {0} does not occur in any denominator")]
    FactorAbsent(String),
    #[error("path endpoints coincide")]
    EqualEndpoints,
    #[error("index list {0:?} is divergent (last entry must be at least 2)")]
    DivergentIndex(Vec<u32>),
    #[error("point lies on the singular locus of the form")]
    OnSingularLocus,
    #[error("residue produces a repeated factor; divisor is not normal crossing")]
    NotNormalCrossing,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    // orchestration
    #[error("period matrix is singular (condition estimate {0:.3e})")]
    SingularPeriodMatrix(f64),
    #[error("parameter {0} is one of 0, 1, infinity")]
    DegenerateModulus(String),
    #[error("q-series does not converge: Im(tau) = {0} must be positive")]
    NotConvergent(f64),
    #[error("divisor has degree {0}, expected 0")]
    NonZeroDegree(String),
    #[error("divisors share the point {0}")]
    OverlappingSupports(String),

    // input
    #[error("invalid input: {0}")]
    Input(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Input,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Input(_) | Error::InvalidChain(_) | Error::DimensionMismatch(_) => ErrorKind::Input,
            _ => ErrorKind::Domain,
        }
    }

    /// Stable short name, used in JSON reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PoleOnPath { .. } => "PoleOnPath",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::OverlappingPoles(_) => "OverlappingPoles",
            Error::NotLogarithmic(_) => "NotLogarithmic",
            Error::NonIntegrableDetected { .. } => "NonIntegrableDetected",
            Error::UnboundedTestFunction(_) => "UnboundedTestFunction",
            Error::OverlappingDivisors(_) => "OverlappingDivisors",
            Error::DuplicatePoint(_) => "DuplicatePoint",
            Error::NonGenericIntersection(_) => "NonGenericIntersection",
            Error::SingularMatrix => "SingularMatrix",
            Error::InvalidChain(_) => "InvalidChain",
            Error::FactorAbsent(_) => "FactorAbsent",
            Error::EqualEndpoints => "EqualEndpoints",
            Error::DivergentIndex(_) => "DivergentIndex",
            Error::OnSingularLocus => "OnSingularLocus",
            Error::NotNormalCrossing => "NotNormalCrossing",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularPeriodMatrix(_) => "SingularPeriodMatrix",
            Error::DegenerateModulus(_) => "DegenerateModulus",
            Error::NotConvergent(_) => "NotConvergent",
            Error::NonZeroDegree(_) => "NonZeroDegree",
            Error::OverlappingSupports(_) => "OverlappingSupports",
            Error::Input(_) => "InputError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
