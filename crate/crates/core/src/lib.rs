//! Linear biphasic model of unconfined compression of a cylindrical tissue
//! sample under sinusoidally driven loading.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`] evaluates `J0`, `J1`, `I0`, `I1`.
//! * [`charroots`] finds the roots of the two characteristic equations.
//! * [`material`] holds the physical parameters and builds the discrete
//!   relaxation/retardation spectra.
//! * [`kernels`] evaluates the relaxation and creep functions, their Laplace
//!   transforms and short-time asymptotics, and ships a numerical Laplace
//!   inversion used to cross-check the series.
//! * [`moduli`] computes apparent storage/loss moduli and compliances and
//!   their incomplete (quarter-period) counterparts.
//! * [`response`] simulates the cyclic and half-sine loading protocols.

pub mod charroots;
pub mod error;
pub mod kernels;
pub mod material;
pub mod moduli;
pub mod quadrature;
pub mod response;
pub mod specfun;

pub use error::{Error, Result};
