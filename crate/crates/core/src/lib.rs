//! Computational toolkit for Hartogs domains
//! `D_{N,s} = {(z, ζ) ∈ D × C^N : ‖ζ‖² < K_D(z,z)^{-s}}` over homogeneous
//! Siegel domains of type II and their bounded realizations.
//!
//! The crate is organised bottom-up:
//!
//! * [`cones`] : homogeneous convex cones (half-line, Lorentz, positive
//!   definite Hermitian matrices and products) with membership tests and
//!   linear automorphisms.
//! * [`siegel`] : Hermitian forms, Siegel domains of type II, Shilov boundary,
//!   and the [`Domain`] handle shared by every other module.
//! * [`kernels`] : closed-form Bergman kernels, their log-derivative jets and
//!   the biholomorphic transformation rule.
//! * [`hartogs`] : the Hartogs domain, boundary strata, and two independent
//!   evaluators of its Bergman kernel.
//! * [`automorphisms`] : affine, Möbius, ball and Cayley maps, and the induced
//!   Hartogs automorphisms with their group operations.
//! * [`levi`] : defining-function jets and strong pseudoconvexity certificates.
//! * [`verification`] : seeded Monte Carlo and property suites.

pub mod automorphisms;
pub mod cones;
mod error;
pub mod hartogs;
pub mod kernels;
pub mod levi;
pub mod linalg;
pub mod siegel;
pub mod verification;
pub mod wire;

pub use error::{Error, Result};

pub use automorphisms::{
    AffineSiegelAutomorphism, BallAutomorphism, BaseMap, CayleyTransform, InducedHartogsAutomorphism,
    JacobianBlockReport, MobiusAutomorphism, PhaseDefect,
};
pub use cones::{ConeClassification, ConeDescriptor, ConeParams, MembershipStatus};
pub use hartogs::{EulerOperatorResult, HartogsBoundaryClass, HartogsDomain, HartogsPoint, HartogsStatus};
pub use kernels::{FactorKind, KernelFactor, KernelJet, KernelSpec};
pub use levi::{DefiningJet, LeviReport};
pub use siegel::{Domain, DomainDescriptor, HermitianForm, SiegelDomain, SiegelPoint};
pub use verification::{SuiteConfig, SuiteReport};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real column vector.
pub type RVector = nalgebra::DVector<f64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;

/// Default boundary tolerance for membership tests.
pub const DEFAULT_TOL: f64 = 1e-9;
