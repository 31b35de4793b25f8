use alloc::string::String;

/// Errors raised by geometric constructions and checks.
///
/// Hypothesis violations are not errors: checks report them through
/// [`crate::functionals::Status::Inapplicable`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("shape operator is not self-adjoint (asymmetry {0:.3e})")]
    Asymmetry(f64),
    #[error("curvature vector is outside the Garding cone of order {0}")]
    ConeViolation(usize),
    #[error("free boundary violated: angle residual {0:.3e}")]
    FreeBoundaryViolation(f64),
    #[error("constraint projection failed: {0}")]
    ConstraintProjection(String),
    #[error("weight must be positive on the hypersurface (min {0:.3e})")]
    NonPositiveWeight(f64),
    #[error("value {value} outside the attained range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("linear system singular: {0}")]
    Singular(String),
    #[error("hypersurface has a boundary; a closed hypersurface is required")]
    BoundaryPresent,
}

pub type Result<T> = core::result::Result<T, Error>;
