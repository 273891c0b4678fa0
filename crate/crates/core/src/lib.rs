//! Landscapes of nonnegative low-rank matrix recovery.
//!
//! The library builds a structured family of measurement operators with an
//! exactly known restricted-isometry constant, evaluates the symmetric and
//! asymmetric factorization objectives with their exact derivatives, checks
//! first- and second-order optimality over the nonnegative critical cone,
//! and runs projected-gradient experiments over the instance families where
//! spurious minima provably appear (arbitrarily small `delta > 0`, or rank
//! above one at `delta = 0`) and where they provably do not (`delta = 0`,
//! rank one).
//!
//! Entry points: [`instances`] for the named constructions, [`optimality`]
//! for certificates, [`solver`] for projected gradient descent and basin
//! experiments.

pub mod error;
pub mod exec;
pub mod instances;
pub mod objectives;
pub mod operators;
pub mod optimality;
pub mod solver;

pub use error::{Error, Result};
