//! Dense statevector and density-matrix algebra over named qubit registers.

mod density;
mod haar;
mod layout;
mod state;
mod unitary;

pub use density::{mu_distinguishable, DensityMatrix};
pub use haar::{haar_random_state, haar_random_unitary};
pub use layout::{BitField, Layout, MultiField, Register, MAX_QUBITS};
pub use state::{dot, Measurement, StateVector};
pub use unitary::{unitarity_deviation, UnitaryMatrix};

pub use num_complex::Complex64;

/// Absolute tolerance for exact-algebra checks.
pub const TOL: f64 = 1e-9;
