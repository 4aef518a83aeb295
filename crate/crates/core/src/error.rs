use thiserror::Error;

/// Failures raised by the section-volume computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("direction vector is empty")]
    EmptyVector,
    #[error("direction vector has norm {norm}, expected 1 (tolerance {tolerance:e})")]
    NotUnitNorm { norm: f64, tolerance: f64 },
    #[error("direction vector has no nonzero entries")]
    AllZero,
    #[error("direction vector contains a non-finite entry")]
    NonFinite,
    #[error("dimension n = {n} is below the minimum {min}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("factorial overflows f64 for n = {0}")]
    Overflow(usize),
    #[error("density value {0} is negative")]
    NegativeDensity(f64),
    #[error("evaluation point hits a pole of the characteristic function")]
    PoleHit,
    #[error("operation needs at least two nonzero entries, got {0}")]
    FewerThanTwoEntries(usize),
    #[error("x = {0} must be strictly positive")]
    NonpositiveX(f64),
    #[error("y = {0} lies outside (-1, 1)")]
    YOutOfRange(f64),
    #[error("x = {x} lies outside the contour domain (|x| < {bound})")]
    XOutsideDomain { x: f64, bound: f64 },
    #[error("could not bracket the zero-phase point at x = {0}")]
    BracketFailure(f64),
    #[error("integrand has imaginary residue {imag:e} against real part {real:e}")]
    ImaginaryResidueTooLarge { real: f64, imag: f64 },
    #[error("quadrature stopped with error estimate {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },
    #[error("partial fractions need distinct entries")]
    RepeatedEntries,
    #[error("partial fractions are ill-conditioned ({0})")]
    IllConditioned(String),
    #[error("direction is not centered: entries sum to {0:e}")]
    NotCentered(f64),
    #[error("dimension mismatch: direction has {got} entries, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

impl Error {
    /// True for errors caused by invalid input rather than a numerical breakdown.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::PoleHit
                | Error::BracketFailure(_)
                | Error::ImaginaryResidueTooLarge { .. }
                | Error::ToleranceNotMet { .. }
                | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
