//! Simulation workbench for quantum unforgeability games: exact statevector
//! algebra, quantum oracles, verifiers, concrete attacks and seeded Monte-Carlo.

pub mod attacks;
pub mod error;
pub mod games;
pub mod oracles;
pub mod parallel;
pub mod primitives;
pub mod qstate;
pub mod seeds;
pub mod verifiers;

pub use error::{Error, Result};
