//! Self-similar, radially symmetric solutions of the relativistic Euler
//! equations closed by Synge-type energies for monatomic and diatomic gases.
//!
//! The crate provides
//!
//! * [`bessel`]: modified Bessel functions K_j and the ratios h_i = K_i/K_{i+1},
//!   validated against an independent quadrature of the defining integral;
//! * [`eos`]: the constitutive quantities (energy, e_p, p e_pp, characteristic
//!   speed, isentropes) as functions of the coldness parameter gamma;
//! * [`flow`]: integration of the self-similar ODE system in s = t/r with
//!   event detection and regime classification;
//! * [`shock`]: the relativistic Rankine-Hugoniot conditions in the shock rest
//!   frame, Newton solution of the downstream state, and location of the
//!   unique shock point where the perturbed velocity vanishes;
//! * [`piston`]: the spherical piston problem (rest state, forward shock, ODE
//!   arc meeting the piston);
//! * [`certify`]: grid certification of the structural inequalities
//!   (p e_pp < 0, e_p > 3, monotone characteristic speed, ratio bounds).
//!
//! Everything is computed with c = 1 internally; user-facing quantities are
//! expressed in c-scaled form (cs, u/c).

pub mod bessel;
pub mod certify;
mod dd;
pub mod eos;
mod error;
pub mod flow;
pub mod ode;
pub mod piston;
pub mod quad;
pub mod shock;

pub use error::{Error, Result};
