//! Computational laboratory for lower bounds on moments of central L-values.
//!
//! The crate has two halves. The exact half works in the abstract Hecke ring
//! and in integer multiplicative combinatorics ([`arith`], [`hecke`],
//! q-expansions in [`modforms`]). The numeric half provides certified special
//! functions ([`specfun`]: regularized incomplete gamma, approximate-
//! functional-equation weights with a dual contour-quadrature route, Bessel
//! series, Kloosterman sums) and the experiment drivers ([`modforms`],
//! [`quadfamily`], [`moments`]) that assemble S1/S2 resonator sums, Hölder
//! lower bounds and direct moments for the weight-k eigencuspform family and
//! the even quadratic-character family.
//!
//! Floating-point kernels are generic over the scalar (see [`scalar::Real`]);
//! the experiment layer runs at [`Scalar`] = `f64`.

pub mod arith;
pub mod dd;
pub mod error;
pub mod hecke;
pub mod modforms;
pub mod moments;
pub mod quadfamily;
pub mod scalar;
pub mod specfun;
pub mod sum;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete scalar used by the experiment drivers.
pub type Scalar = f64;

/// Version stamp written into CSV cache headers and run artifacts.
/// Bump to invalidate on-disk caches.
pub const FORMAT_VERSION: u32 = 1;
