//! Reversible arithmetic networks built from NOT, CNOT and Toffoli gates:
//! plain addition, modular addition, controlled modular multiplication and
//! modular exponentiation, together with exact simulation, oracle-based
//! verification and resource accounting.

pub mod circuit;
pub mod cli;
pub mod numtheory;
pub mod oracle;
pub mod resources;
pub mod sim;
pub mod synth;
pub mod verify;
