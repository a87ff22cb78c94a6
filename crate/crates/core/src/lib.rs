//! Set-theoretic analysis of constrained linear systems whose actuators are
//! partly controlled by an attacker.
//!
//! The input set `U` is split into an attack share `αU` and a defence share
//! `(1-α)U`. The crate computes the backward-reachable sets `C_i` (states that
//! can be kept inside `X` for `i` steps against every attack), their outer
//! bounds `T_i` and `S_i`, closed-form upper bounds on the critical attack
//! share, and the exact critical share by bisection.

pub mod attack;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod reachability;
pub mod setops;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use geometry::{Polytope, Vector};
pub use tolerance::Tolerances;
