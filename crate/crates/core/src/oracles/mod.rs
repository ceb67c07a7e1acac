//! Standard, randomized, minimal, randomized-unitary and blinded oracles.

mod blinding;
mod circuit;
mod instance;
mod table;

pub use blinding::{generate_blinding, BlindingSet};
pub use circuit::{ControlledGateFamily, CIRCUIT_MSG_QUBITS, CIRCUIT_RAND_BITS};
pub use instance::{
    Binding, OracleInstance, OracleKind, QueryRecord, RandomizedFunction, UnitaryFamily, ANC, MSG,
};
pub use table::ClassicalFunctionTable;
