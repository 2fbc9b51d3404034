//! Phase-controlled two-photon laser in a double-Lambda atomic medium.
//!
//! The chain runs from the four-level Bloch steady state ([`atom`]) through
//! the two-mode master-equation coefficients ([`coeffs`]) to the closed
//! moment equations ([`moments`], [`steady`]), the Raman-EIT and resonant
//! regime analyzers ([`regimes`]) and a truncated Fock-space reference
//! integrator ([`fock`]).
//!
//! All rates are in units of the radiative coherence decay `gamma`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod atom;
pub mod coeffs;
pub mod error;
pub mod fock;
pub mod moments;
pub mod ode;
pub mod params;
pub mod regimes;
pub mod steady;

pub use atom::{solve_atom_steady_state, AtomSteadyState, DensityMatrix4};
pub use coeffs::{MasterCoefficients, Pipeline, RateConstants};
pub use error::{Error, Result};
pub use moments::{duan_parameter, EntanglementReport, MomentState};
pub use params::AtomParams;
pub use steady::{steady_closed_form, steady_linear_solve, SteadyMoments};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
