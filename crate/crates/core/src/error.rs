use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A point outside the domain of the conformal map (e.g. `w = 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The map/radius combination produced a degenerate curve or Jacobian.
    #[error("degenerate geometry: {0}")]
    GeometryDegenerate(String),

    /// Scaled Grunsky coefficients do not decay (fitted rate is not below 1).
    #[error("Grunsky coefficients do not decay: fitted rate {rho} >= 1")]
    DecayViolation { rho: f64 },

    /// Eigenvalues expected to be real carry a large imaginary part.
    #[error("spectrum is not real: |Im| = {max_imag:e} exceeds tolerance {tol:e}")]
    SpectralRealization { max_imag: f64, tol: f64 },

    /// A computed quantity broke a structural invariant (e.g. spectrum
    /// outside `[-1/2, 1/2]`).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The dense eigensolver failed.
    #[error("eigensolver failed: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
