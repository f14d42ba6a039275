//! Envelope models of nonlinear-Schrödinger type for one-dimensional periodic
//! media, together with the machinery needed to validate them empirically:
//!
//! * dispersion models (synthetic band families and a plane-wave band solver)
//!   with high-order jets and genericity diagnostics,
//! * rectifying wavenumber coordinates that trade band curvature for exact
//!   polynomial dispersion,
//! * wave-packet excitation profiles and their modal currents,
//! * resonance bookkeeping (four-wave selection rules, stationary-phase
//!   asymptotics of the direct interaction integral, oscillatory oracles),
//! * envelope solvers (classical and extended NLS, bidirectional pairs,
//!   lattice discretizations),
//! * a truncated modal reference integrator, and
//! * experiment drivers that measure the accuracy ladder of the envelope
//!   hierarchy against the reference dynamics.
//!
//! Everything numeric is generic over the scalar type through [`scalar::Real`];
//! `f64` aliases are exported at the crate root and are what the binaries use.

pub mod dispersion;
pub mod enls;
pub mod excitation;
pub mod interaction;
pub mod rectify;
pub mod scalar;
pub mod tol;
pub mod util;

pub use scalar::{Real, Scalar};

/// Complex number over a generic scalar.
pub type C<T> = num_complex::Complex<T>;
/// Concrete complex type used by the binaries and experiment drivers.
pub type C64 = num_complex::Complex<f64>;

/// Library-level error type shared by solvers and experiment drivers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("genericity violated: {0}")]
    Genericity(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
