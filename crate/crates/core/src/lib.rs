//! Long-term dynamics of one-dimensional continuous-time Markov chains with
//! rational transition rates.
//!
//! The crate classifies a chain on the non-negative integers as explosive or
//! not, transient, null recurrent or positive recurrent, and exponentially or
//! sub-exponentially ergodic, using only four exact indices read off the
//! rates at infinity. Every verdict can be cross-checked against classical
//! birth-death criteria, truncated stationary solves and Gillespie ensembles.

pub mod analysis;
pub mod bd_oracle;
pub mod classifier;
pub mod error;
pub mod master_eq;
pub mod model;
pub mod rates;
pub mod reduction;
pub mod ssa;

pub use error::{Error, Result};
