//! Desk-scale emulator for small cloud quantum processors: gate library,
//! directed coupling maps, a QASM dialect, seeded shot sampling with
//! optional noise, and scripted classroom experiments.

pub mod analysis;
pub mod circuit;
pub mod engine;
pub mod experiments;
pub mod gates;
pub mod linalg;
pub mod qasm;
pub mod rng;
pub mod topology;

pub use circuit::{Circuit, CircuitError, GateOp, Measurement, ValidationReport, Violation};
pub use engine::{Execution, Histogram, NoiseModel, RunConfig};
pub use gates::{GateName, GateSpec};
pub use linalg::{StateVector, Unitary2, Unitary4};
pub use topology::BackendTopology;
