//! Polyhedral-SDP and moment-SOS relaxations of polynomial programs, solved by a
//! two-phase low-rank augmented Lagrangian method.

pub mod error;
pub mod harness;
pub mod instances;
pub mod monomial;
pub mod projection;
pub mod relax;
pub mod rng;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
