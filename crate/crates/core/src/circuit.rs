//! Circuit intermediate representation.
//!
//! A circuit is an ordered list of gate applications on `n_qubits` wires
//! plus a set of terminal measurements into `n_clbits` classical bits.
//! Gates may not follow a measurement on the same wire.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::{GateError, GateName, GateSpec};
use crate::linalg::MAX_QUBITS;
use crate::topology::BackendTopology;

/// Readout width of the five-qubit backends.
pub const DEFAULT_READOUT_WIDTH: usize = 5;

/// Classical registers are held in a `u64`.
pub const MAX_CLBITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("register size {0} outside 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("classical register size {0} exceeds {MAX_CLBITS}")]
    BadClbitCount(usize),
    #[error("qubit q[{index}] out of range (register has {size})")]
    QubitOutOfRange { index: usize, size: usize },
    #[error("clbit c[{index}] out of range (register has {size})")]
    ClbitOutOfRange { index: usize, size: usize },
    #[error("gate `{gate}` acts on {expected} qubit(s), got {got}")]
    WrongQubitCount {
        gate: GateName,
        expected: usize,
        got: usize,
    },
    #[error("gate `{gate}` repeats qubit q[{qubit}]")]
    RepeatedQubit { gate: GateName, qubit: usize },
    #[error("gate `{gate}` on q[{qubit}] after it was measured")]
    GateAfterMeasurement { gate: GateName, qubit: usize },
    #[error("clbit c[{0}] is written by more than one measurement")]
    ClbitReused(usize),
    #[error("readout width {width} smaller than {n_clbits} classical bits")]
    WidthTooSmall { width: usize, n_clbits: usize },
    #[error("outcome {outcome} out of range for {n_qubits} qubits")]
    OutcomeOutOfRange { outcome: usize, n_qubits: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
}

/// One circuit instruction. For `cx` the qubits are `(control, target)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGateOp")]
pub struct GateOp {
    #[serde(flatten)]
    spec: GateSpec,
    qubits: Vec<usize>,
}

#[derive(Deserialize)]
struct RawGateOp {
    name: String,
    #[serde(default)]
    params: Vec<f64>,
    qubits: Vec<usize>,
}

impl TryFrom<RawGateOp> for GateOp {
    type Error = CircuitError;

    fn try_from(raw: RawGateOp) -> Result<Self, Self::Error> {
        GateOp::new(GateSpec::named(&raw.name, raw.params)?, raw.qubits)
    }
}

impl GateOp {
    pub fn new(spec: GateSpec, qubits: Vec<usize>) -> Result<Self, CircuitError> {
        let gate = spec.name();
        let expected = gate.qubit_count();
        if qubits.len() != expected {
            return Err(CircuitError::WrongQubitCount {
                gate,
                expected,
                got: qubits.len(),
            });
        }
        if expected == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::RepeatedQubit {
                gate,
                qubit: qubits[0],
            });
        }
        Ok(Self { spec, qubits })
    }

    pub fn single(name: GateName, qubit: usize) -> Result<Self, CircuitError> {
        Self::new(GateSpec::new(name, Vec::new())?, vec![qubit])
    }

    pub fn cx(control: usize, target: usize) -> Result<Self, CircuitError> {
        Self::new(GateSpec::fixed(GateName::Cx), vec![control, target])
    }

    pub fn spec(&self) -> &GateSpec {
        &self.spec
    }

    pub fn name(&self) -> GateName {
        self.spec.name()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub qubit: usize,
    pub clbit: usize,
}

/// Program: gates, then terminal measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    n_qubits: usize,
    n_clbits: usize,
    ops: Vec<GateOp>,
    measurements: Vec<Measurement>,
}

#[derive(Deserialize)]
struct RawCircuit {
    n_qubits: usize,
    n_clbits: usize,
    #[serde(default)]
    ops: Vec<GateOp>,
    #[serde(default)]
    measurements: Vec<Measurement>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = CircuitError;

    /// Measurements in JSON are terminal, so they are applied after all ops.
    fn try_from(raw: RawCircuit) -> Result<Self, Self::Error> {
        let mut circuit = Circuit::new(raw.n_qubits, raw.n_clbits)?;
        for op in raw.ops {
            circuit.append(op)?;
        }
        for m in raw.measurements {
            circuit.measure(m.qubit, m.clbit)?;
        }
        Ok(circuit)
    }
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Result<Self, CircuitError> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(CircuitError::BadQubitCount(n_qubits));
        }
        if n_clbits > MAX_CLBITS {
            return Err(CircuitError::BadClbitCount(n_clbits));
        }
        Ok(Self {
            n_qubits,
            n_clbits,
            ops: Vec::new(),
            measurements: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn is_measured(&self, qubit: usize) -> bool {
        self.measurements.iter().any(|m| m.qubit == qubit)
    }

    pub fn append(&mut self, op: GateOp) -> Result<&mut Self, CircuitError> {
        for &q in op.qubits() {
            self.check_qubit(q)?;
            if self.is_measured(q) {
                return Err(CircuitError::GateAfterMeasurement {
                    gate: op.name(),
                    qubit: q,
                });
            }
        }
        self.ops.push(op);
        Ok(self)
    }

    /// Appends a gate by name.
    pub fn gate(&mut self, spec: GateSpec, qubits: &[usize]) -> Result<&mut Self, CircuitError> {
        self.append(GateOp::new(spec, qubits.to_vec())?)
    }

    pub fn h(&mut self, qubit: usize) -> Result<&mut Self, CircuitError> {
        self.append(GateOp::single(GateName::H, qubit)?)
    }

    pub fn x(&mut self, qubit: usize) -> Result<&mut Self, CircuitError> {
        self.append(GateOp::single(GateName::X, qubit)?)
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self, CircuitError> {
        self.append(GateOp::cx(control, target)?)
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self, CircuitError> {
        self.check_qubit(qubit)?;
        if clbit >= self.n_clbits {
            return Err(CircuitError::ClbitOutOfRange {
                index: clbit,
                size: self.n_clbits,
            });
        }
        if self.measurements.iter().any(|m| m.clbit == clbit) {
            return Err(CircuitError::ClbitReused(clbit));
        }
        self.measurements.push(Measurement { qubit, clbit });
        Ok(self)
    }

    /// Readout width: the backends' five columns, or wider if the classical register is.
    pub fn readout_width(&self) -> usize {
        self.n_clbits.max(DEFAULT_READOUT_WIDTH)
    }

    /// Classical register value produced by a basis outcome; bit `j` holds `c[j]`.
    pub fn clbits_of(&self, outcome: usize) -> u64 {
        self.measurements.iter().fold(0u64, |acc, m| {
            if outcome >> m.qubit & 1 == 1 {
                acc | 1 << m.clbit
            } else {
                acc
            }
        })
    }

    /// Readout string for a basis outcome, `c[0]` rightmost.
    pub fn bitstring_of(&self, outcome: usize, width: usize) -> Result<String, CircuitError> {
        if width < self.n_clbits {
            return Err(CircuitError::WidthTooSmall {
                width,
                n_clbits: self.n_clbits,
            });
        }
        if outcome >> self.n_qubits != 0 {
            return Err(CircuitError::OutcomeOutOfRange {
                outcome,
                n_qubits: self.n_qubits,
            });
        }
        Ok(format_register(self.clbits_of(outcome), width))
    }

    /// Checks the circuit against a backend. Violations are data, not errors.
    pub fn validate(&self, topo: &BackendTopology) -> ValidationReport {
        let mut violations = Vec::new();
        if self.n_qubits > topo.n_qubits() {
            violations.push(Violation::QubitCountExceedsBackend {
                circuit: self.n_qubits,
                backend: topo.n_qubits(),
            });
        }
        for (index, op) in self.ops.iter().enumerate() {
            if !topo.supports(op.name()) {
                violations.push(Violation::GateNotInBasis {
                    op_index: index,
                    gate: op.name(),
                });
            }
            if op.name() == GateName::Cx {
                let (control, target) = (op.qubits[0], op.qubits[1]);
                if !topo.cnot_allowed(control, target).unwrap_or(false) {
                    violations.push(Violation::CnotDirection {
                        op_index: index,
                        control,
                        target,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    fn check_qubit(&self, q: usize) -> Result<(), CircuitError> {
        if q >= self.n_qubits {
            Err(CircuitError::QubitOutOfRange {
                index: q,
                size: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Qubits touched by gates or measurements.
    pub fn active_qubits(&self) -> BTreeSet<usize> {
        self.ops
            .iter()
            .flat_map(|op| op.qubits.iter().copied())
            .chain(self.measurements.iter().map(|m| m.qubit))
            .collect()
    }
}

/// Zero-padded binary rendering of a classical register, bit 0 rightmost.
pub fn format_register(value: u64, width: usize) -> String {
    format!("{value:0width$b}")
}

/// Inverse of [`format_register`]. Returns `None` on characters other than `0`/`1`.
pub fn parse_register(bits: &str) -> Option<u64> {
    if bits.is_empty() || bits.len() > 64 || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    u64::from_str_radix(bits, 2).ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    CnotDirection {
        op_index: usize,
        control: usize,
        target: usize,
    },
    GateNotInBasis {
        op_index: usize,
        gate: GateName,
    },
    QubitCountExceedsBackend {
        circuit: usize,
        backend: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CnotDirection {
                op_index,
                control,
                target,
            } => write!(
                f,
                "cnot-direction: op {op_index}: cx q[{control}],q[{target}] not in coupling map"
            ),
            Violation::GateNotInBasis { op_index, gate } => {
                write!(f, "gate-not-in-basis: op {op_index}: `{gate}`")
            }
            Violation::QubitCountExceedsBackend { circuit, backend } => write!(
                f,
                "qubit-count-exceeds-backend: circuit uses {circuit} qubits, backend has {backend}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_runnable(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}
