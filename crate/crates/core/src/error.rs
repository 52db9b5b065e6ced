use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `(λ, θ)` outside the admissible set, or outside the regime an
    /// operation requires.
    InvalidParameters {
        lambda: f64,
        theta: f64,
        reason: &'static str,
    },
    /// A function argument lies outside the domain of the operation.
    Domain {
        op: &'static str,
        re: f64,
        im: f64,
    },
    /// An integrand or a sample returned a NaN or infinite value.
    NonFinite { op: &'static str, abscissa: f64 },
    /// Malformed input data (grids, vectors, configuration).
    InvalidInput(&'static str),
    /// A measure whose total mass differs from one.
    Normalization { mass: f64 },
    /// A recovered density value far below zero, which points to a wrong
    /// branch or a non-Herglotz input rather than roundoff.
    NegativeDensity { x: f64, value: f64 },
    /// A requested index exceeds the truncation order.
    Truncation { requested: usize, available: usize },
    /// A series tail could not be bounded below the tolerance.
    TailNotCertified {
        tail: f64,
        tolerance: f64,
        required_order: Option<usize>,
    },
    /// An invariant failed during time integration.
    Integration {
        t: f64,
        index: usize,
        what: &'static str,
    },
    /// Too few points for a finite-difference stencil.
    Stencil { points: usize, required: usize },
    /// A square-root branch could not be followed continuously.
    Branch { re: f64, im: f64 },
    /// Exact integer arithmetic overflowed.
    Overflow(&'static str),
    /// A time integration was requested on a contour where the problem is
    /// not well posed.
    IllPosed(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameters {
                lambda,
                theta,
                reason,
            } => write!(f, "invalid parameters (lambda={lambda}, theta={theta}): {reason}"),
            Error::Domain { op, re, im } => {
                write!(f, "{op}: argument {re}{im:+}i is outside the domain")
            }
            Error::NonFinite { op, abscissa } => {
                write!(f, "{op}: non-finite value at abscissa {abscissa}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Normalization { mass } => {
                write!(f, "total mass {mass} differs from 1 by more than 1e-8")
            }
            Error::NegativeDensity { x, value } => {
                write!(f, "recovered density {value} at x={x} is below -1e-6")
            }
            Error::Truncation {
                requested,
                available,
            } => write!(
                f,
                "index {requested} exceeds truncation order {available}"
            ),
            Error::TailNotCertified {
                tail,
                tolerance,
                required_order,
            } => {
                write!(f, "series tail {tail:e} exceeds tolerance {tolerance:e}")?;
                match required_order {
                    Some(n) => write!(f, "; truncation order {n} would be required"),
                    None => write!(f, "; moments do not decay geometrically"),
                }
            }
            Error::Integration { t, index, what } => {
                write!(f, "integration failed at t={t}, index {index}: {what}")
            }
            Error::Stencil { points, required } => write!(
                f,
                "contour has {points} points, stencil needs at least {required}"
            ),
            Error::Branch { re, im } => {
                write!(f, "square-root branch not continuous at {re}{im:+}i")
            }
            Error::Overflow(what) => write!(f, "integer overflow in {what}"),
            Error::IllPosed(msg) => write!(f, "ill-posed problem: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
