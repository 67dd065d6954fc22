//! Spectrum of the Neumann–Poincaré operator on thin doubly connected
//! domains bounded by two level curves of an exterior conformal map.
//!
//! The main pipeline expands the operator in the densities
//! `e^{inθ}/h` on both boundary curves, which turns it into a block
//! matrix built from the Grunsky coefficients of the map
//! ([`assembly::build_np_matrix`]). Squared eigenvalues are also
//! available through the half-size matrix [`assembly::build_reduced_b`],
//! whose Gershgorin disks ([`gershgorin`]) localize the spectrum around
//! the circular-annulus values `±r^m/2`. A plain Nyström discretization
//! of the boundary integral operator ([`nystrom`]) serves as an
//! independent check.

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod gershgorin;
pub mod grunsky;
pub mod nystrom;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix type used throughout the crate.
pub type CMat = faer::Mat<Complex64>;
/// Dense real matrix type.
pub type RMat = faer::Mat<f64>;
