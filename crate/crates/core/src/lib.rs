//! Dirichlet-Neumann operators for Laplace's equation under laterally
//! quasiperiodic boundary conditions.
//!
//! The quasiperiodic problem in `x ∈ R^n` is lifted to a periodic problem on
//! the torus `[0, 2π)^d` and discretized with Fourier collocation in the
//! lateral variable and Chebyshev collocation in depth. Three perturbation
//! recursions ([`hops`]) compute the Taylor coefficients of the operator in
//! the interface amplitude, [`summation`] sums them (Taylor or Padé), and
//! [`mms`] provides manufactured solutions to measure the error.

pub mod bvp;
pub mod chebyshev;
pub mod error;
pub mod fourier;
pub mod hops;
pub mod lattice;
pub mod mms;
pub mod summation;
pub mod volume;

pub use error::{Error, Result};
pub use fourier::{SpectralGrid, SurfaceField};
pub use hops::{Algorithm, DnoExpansion, PerturbationProblem};

pub use lattice::{Depth, LatticeSpec, ModeSet};
pub use volume::VolumeField;

pub use num_complex::Complex64;
