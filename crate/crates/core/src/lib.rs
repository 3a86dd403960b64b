//! Tabular independent and centralized Q-learning in an embodied
//! predator-prey gridworld, with the seeded experiment matrix and the
//! paired nonparametric analysis used to compare learning configurations.

pub mod cli;
pub mod env;
pub mod error;
pub mod harness;
pub mod io;
pub mod learners;
pub mod stats;

pub use error::{Error, Result};
