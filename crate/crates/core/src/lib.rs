//! Interlaced and non-colliding Brownian particle systems: explicit
//! determinantal transition densities, entrance laws and intertwining
//! kernels, pathwise Monte Carlo simulators for the reflected systems, and
//! a verification harness checking that simulation and closed form agree.
//!
//! The crate is organized in four layers:
//!
//! * [`kernels`] — scalar Gaussian kernels and their iterated
//!   integrals/derivatives;
//! * [`densities`] — the determinantal density families, distribution
//!   functions and identity residuals;
//! * [`simulate`] — seeded, reproducible Monte Carlo engines for the
//!   reflected interlaced systems, the triangular (cone-valued) process,
//!   the non-colliding SDE and coalescing motions;
//! * [`verify`] — statistical and numerical checks turning the structural
//!   identities into pass/fail reports.

pub mod densities;
pub mod error;
pub mod kernels;
pub mod point;
pub mod quad;
pub mod simulate;
pub mod verify;

pub use error::{Error, Result};
pub use kernels::Time;
pub use point::{GTPattern, InterlacedPoint, OrderedPoint};
