//! Circuit execution: exact statevector evolution, seeded shot sampling,
//! and per-shot stochastic noise.
//!
//! Each shot draws from three counter-based streams (see [`crate::rng`]):
//! gate-noise insertions, the basis outcome, and readout flips. A shot with
//! no Pauli insertion samples from the ideal distribution, so a model with
//! all probabilities zero reproduces the noiseless histogram exactly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{format_register, Circuit, CircuitError, ValidationReport};
use crate::gates::{GateMatrix, GateName, GateSpec};
use crate::linalg::{LinalgError, StateVector, Unitary2};
use crate::rng::{ShotRng, Stream};
use crate::topology::BackendTopology;

pub const MAX_SHOTS: u64 = 1_000_000;

/// Depolarizing probability of the preset for single-qubit gates.
pub const PRESET_SINGLE_QUBIT_P: f64 = 0.005;
/// Depolarizing probability of the preset for `cx`.
pub const PRESET_CX_P: f64 = 0.02;
/// Readout flip probability of the preset.
pub const PRESET_READOUT_FLIP: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("shots must be in 1..={MAX_SHOTS}, got {0}")]
    ShotsOutOfRange(u64),
    #[error("circuit does not run on backend: {0}")]
    Validation(ValidationReport),
    #[error("invalid noise model: {0}")]
    BadNoise(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Per-gate depolarizing probabilities plus a readout flip probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise")]
pub struct NoiseModel {
    gate_depolarizing: BTreeMap<GateName, f64>,
    readout_flip: f64,
}

#[derive(Deserialize)]
struct RawNoise {
    #[serde(default)]
    gate_depolarizing: BTreeMap<GateName, f64>,
    #[serde(default)]
    readout_flip: f64,
}

impl TryFrom<RawNoise> for NoiseModel {
    type Error = EngineError;

    fn try_from(raw: RawNoise) -> Result<Self, Self::Error> {
        NoiseModel::new(raw.gate_depolarizing, raw.readout_flip)
    }
}

fn check_probability(what: &str, p: f64) -> Result<(), EngineError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(EngineError::BadNoise(format!("{what} probability {p} outside [0, 1]")))
    }
}

impl NoiseModel {
    pub fn new(
        gate_depolarizing: BTreeMap<GateName, f64>,
        readout_flip: f64,
    ) -> Result<Self, EngineError> {
        for (g, &p) in &gate_depolarizing {
            check_probability(g.as_str(), p)?;
        }
        check_probability("readout", readout_flip)?;
        Ok(Self {
            gate_depolarizing,
            readout_flip,
        })
    }

    /// The "realistic" preset. These numbers are illustrative defaults,
    /// not calibration data.
    pub fn preset() -> Self {
        let gates = GateName::ALL
            .into_iter()
            .map(|g| {
                let p = if g == GateName::Cx {
                    PRESET_CX_P
                } else {
                    PRESET_SINGLE_QUBIT_P
                };
                (g, p)
            })
            .collect();
        Self::new(gates, PRESET_READOUT_FLIP).expect("preset probabilities are valid")
    }

    pub fn readout_only(r: f64) -> Result<Self, EngineError> {
        Self::new(BTreeMap::new(), r)
    }

    pub fn gate_probability(&self, gate: GateName) -> f64 {
        self.gate_depolarizing.get(&gate).copied().unwrap_or(0.0)
    }

    pub fn readout_flip(&self) -> f64 {
        self.readout_flip
    }

    pub fn gate_depolarizing(&self) -> &BTreeMap<GateName, f64> {
        &self.gate_depolarizing
    }

    fn has_gate_noise(&self) -> bool {
        self.gate_depolarizing.values().any(|&p| p > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    /// Shots spread over the rayon pool. Results are identical to sequential.
    Parallel,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    shots: u64,
    seed: u64,
    backend: BackendTopology,
    noise: Option<NoiseModel>,
    execution: Execution,
    readout_width: Option<usize>,
}

impl RunConfig {
    pub fn new(shots: u64, seed: u64, backend: BackendTopology) -> Result<Self, EngineError> {
        if !(1..=MAX_SHOTS).contains(&shots) {
            return Err(EngineError::ShotsOutOfRange(shots));
        }
        Ok(Self {
            shots,
            seed,
            backend,
            noise: None,
            execution: Execution::default(),
            readout_width: None,
        })
    }

    pub fn with_noise(mut self, noise: Option<NoiseModel>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_readout_width(mut self, width: usize) -> Self {
        self.readout_width = Some(width);
        self
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn backend(&self) -> &BackendTopology {
        &self.backend
    }

    pub fn noise(&self) -> Option<&NoiseModel> {
        self.noise.as_ref()
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    fn width_for(&self, circuit: &Circuit) -> Result<usize, CircuitError> {
        let width = self.readout_width.unwrap_or_else(|| circuit.readout_width());
        if width < circuit.n_clbits() {
            return Err(CircuitError::WidthTooSmall {
                width,
                n_clbits: circuit.n_clbits(),
            });
        }
        Ok(width)
    }
}

/// Outcome counts of one run, keyed by fixed-width readout strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn from_registers(registers: &[u64], width: usize, seed: u64) -> Self {
        let mut counts = BTreeMap::new();
        for &r in registers {
            *counts.entry(format_register(r, width)).or_insert(0) += 1;
        }
        Self {
            shots: registers.len() as u64,
            seed,
            counts,
        }
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &str) -> f64 {
        self.count(key) as f64 / self.shots as f64
    }

    /// Sum of counts whose key satisfies `pred`.
    pub fn count_where(&self, pred: impl Fn(&str) -> bool) -> u64 {
        self.counts.iter().filter(|(k, _)| pred(k)).map(|(_, &v)| v).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("histogram serializes")
    }
}

fn apply_matrix(state: &mut StateVector, matrix: &GateMatrix, qubits: &[usize]) -> Result<(), LinalgError> {
    match matrix {
        GateMatrix::Single(u) => state.apply_1q_in_place(u, qubits[0]),
        GateMatrix::Two(u) => state.apply_2q_in_place(u, qubits[0], qubits[1]),
    }
}

/// Applies the circuit's gates to `|0…0⟩`. Measurements are ignored.
pub fn statevector(circuit: &Circuit) -> Result<StateVector, EngineError> {
    let mut state = StateVector::zero(circuit.n_qubits())?;
    for op in circuit.ops() {
        apply_matrix(&mut state, &op.spec().matrix(), op.qubits())?;
    }
    Ok(state)
}

/// Exact distribution of readout strings for the noiseless circuit.
pub fn exact_distribution(circuit: &Circuit, width: usize) -> Result<BTreeMap<String, f64>, EngineError> {
    let probs = statevector(circuit)?.probabilities();
    let mut dist = BTreeMap::new();
    for (k, p) in probs.into_iter().enumerate() {
        if p > 0.0 {
            *dist.entry(circuit.bitstring_of(k, width)?).or_insert(0.0) += p;
        }
    }
    Ok(dist)
}

struct Cdf(Vec<f64>);

impl Cdf {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        Self(
            probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect(),
        )
    }

    /// Inverse CDF; outcomes with zero probability are never returned.
    fn pick(&self, u: f64) -> usize {
        let idx = self.0.partition_point(|&c| c <= u);
        if idx < self.0.len() {
            return idx;
        }
        // u landed in the rounding gap above the final sum
        let last = self.0[self.0.len() - 1];
        self.0.partition_point(|&c| c < last)
    }
}

const PAULIS: [GateName; 3] = [GateName::X, GateName::Y, GateName::Z];

struct Prepared<'a> {
    circuit: &'a Circuit,
    matrices: Vec<GateMatrix>,
    paulis: [Unitary2; 3],
    ideal: Cdf,
    noise: Option<&'a NoiseModel>,
    seed: u64,
}

impl<'a> Prepared<'a> {
    fn new(circuit: &'a Circuit, seed: u64, noise: Option<&'a NoiseModel>) -> Result<Self, EngineError> {
        let matrices: Vec<GateMatrix> = circuit.ops().iter().map(|op| op.spec().matrix()).collect();
        let paulis = PAULIS.map(|g| match GateSpec::fixed(g).matrix() {
            GateMatrix::Single(u) => u,
            GateMatrix::Two(_) => unreachable!("Pauli is single-qubit"),
        });
        let ideal = Cdf::new(&statevector(circuit)?.probabilities());
        Ok(Self {
            circuit,
            matrices,
            paulis,
            ideal,
            noise,
            seed,
        })
    }

    /// `(op index, qubit, pauli index)` insertions for one shot.
    fn pauli_insertions(&self, shot: u64, noise: &NoiseModel) -> Vec<(usize, usize, usize)> {
        if !noise.has_gate_noise() {
            return Vec::new();
        }
        let mut rng = ShotRng::new(self.seed, shot, Stream::GateNoise);
        let mut out = Vec::new();
        for (i, op) in self.circuit.ops().iter().enumerate() {
            let p = noise.gate_probability(op.name());
            for &q in op.qubits() {
                if rng.chance(p) {
                    out.push((i, q, rng.below(3) as usize));
                }
            }
        }
        out
    }

    fn trajectory_cdf(&self, insertions: &[(usize, usize, usize)]) -> Result<Cdf, EngineError> {
        let mut state = StateVector::zero(self.circuit.n_qubits())?;
        let mut pending = insertions.iter().peekable();
        for (i, op) in self.circuit.ops().iter().enumerate() {
            apply_matrix(&mut state, &self.matrices[i], op.qubits())?;
            while let Some(&(_, q, pauli)) = pending.next_if(|ins| ins.0 == i) {
                state.apply_1q_in_place(&self.paulis[pauli], q)?;
            }
        }
        Ok(Cdf::new(&state.probabilities()))
    }

    fn shot(&self, shot: u64) -> Result<u64, EngineError> {
        let u = ShotRng::new(self.seed, shot, Stream::Outcome).next_f64();
        let Some(noise) = self.noise else {
            return Ok(self.circuit.clbits_of(self.ideal.pick(u)));
        };
        let insertions = self.pauli_insertions(shot, noise);
        let outcome = if insertions.is_empty() {
            self.ideal.pick(u)
        } else {
            self.trajectory_cdf(&insertions)?.pick(u)
        };
        let mut register = self.circuit.clbits_of(outcome);
        if noise.readout_flip > 0.0 {
            let mut rng = ShotRng::new(self.seed, shot, Stream::Readout);
            for m in self.circuit.measurements() {
                if rng.chance(noise.readout_flip) {
                    register ^= 1 << m.clbit;
                }
            }
        }
        Ok(register)
    }
}

/// Classical register value of every shot, in shot order.
pub fn shot_registers(circuit: &Circuit, cfg: &RunConfig) -> Result<Vec<u64>, EngineError> {
    let report = circuit.validate(&cfg.backend);
    if !report.is_runnable() {
        return Err(EngineError::Validation(report));
    }
    let prepared = Prepared::new(circuit, cfg.seed, cfg.noise.as_ref())?;
    match cfg.execution {
        Execution::Sequential => (0..cfg.shots).map(|s| prepared.shot(s)).collect(),
        Execution::Parallel => (0..cfg.shots)
            .into_par_iter()
            .map(|s| prepared.shot(s))
            .collect(),
    }
}

/// Runs the circuit, applying `cfg`'s noise model if it has one.
pub fn sample(circuit: &Circuit, cfg: &RunConfig) -> Result<Histogram, EngineError> {
    let width = cfg.width_for(circuit)?;
    let registers = shot_registers(circuit, cfg)?;
    Ok(Histogram::from_registers(&registers, width, cfg.seed))
}

/// Runs the circuit under `noise`, regardless of what `cfg` carries.
pub fn sample_noisy(circuit: &Circuit, cfg: &RunConfig, noise: &NoiseModel) -> Result<Histogram, EngineError> {
    let cfg = cfg.clone().with_noise(Some(noise.clone()));
    sample(circuit, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::builtin;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn custom() -> BackendTopology {
        builtin("custom").unwrap()
    }

    fn fig3a() -> Circuit {
        let mut c = Circuit::new(5, 5).unwrap();
        c.h(0).unwrap().measure(0, 0).unwrap();
        c
    }

    fn bell() -> Circuit {
        let mut c = Circuit::new(5, 5).unwrap();
        c.h(1).unwrap().cx(1, 0).unwrap().measure(0, 0).unwrap().measure(1, 1).unwrap();
        c
    }

    #[test]
    fn statevector_examples() {
        let s = statevector(&fig3a()).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);

        let empty = statevector(&Circuit::new(5, 5).unwrap()).unwrap();
        assert_eq!(empty, StateVector::zero(5).unwrap());

        let b = statevector(&bell()).unwrap();
        let p = b.probabilities();
        assert!((p[0b00] - 0.5).abs() < 1e-12 && (p[0b11] - 0.5).abs() < 1e-12);
        assert!(p.iter().enumerate().all(|(k, &v)| k == 0 || k == 3 || v == 0.0));
    }

    #[test]
    fn single_shot_collapses() {
        for seed in 0..20 {
            let cfg = RunConfig::new(1, seed, custom()).unwrap();
            let h = sample(&fig3a(), &cfg).unwrap();
            assert_eq!(h.counts.len(), 1);
            let (key, &n) = h.counts.iter().next().unwrap();
            assert_eq!(n, 1);
            assert!(key == "00000" || key == "00001");
        }
    }

    #[test]
    fn deterministic_circuit() {
        let mut c = Circuit::new(5, 5).unwrap();
        c.x(0).unwrap().measure(0, 0).unwrap();
        let h = sample(&c, &RunConfig::new(100, 3, custom()).unwrap()).unwrap();
        assert_eq!(h.counts, BTreeMap::from([("00001".to_string(), 100)]));
    }

    #[test]
    fn frequency_within_binomial_band() {
        let h = sample(&fig3a(), &RunConfig::new(8192, 11, custom()).unwrap()).unwrap();
        let sigma = (0.25f64 / 8192.0).sqrt();
        assert!((h.frequency("00001") - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn rejects_bad_config_and_topology() {
        assert_eq!(RunConfig::new(0, 0, custom()).unwrap_err(), EngineError::ShotsOutOfRange(0));
        assert!(RunConfig::new(MAX_SHOTS + 1, 0, custom()).is_err());
        let mut c = Circuit::new(5, 0).unwrap();
        c.cx(0, 2).unwrap();
        let cfg = RunConfig::new(10, 0, builtin("ibmqx4").unwrap()).unwrap();
        assert!(matches!(sample(&c, &cfg), Err(EngineError::Validation(_))));
        let cfg = RunConfig::new(10, 0, custom()).unwrap().with_readout_width(2);
        assert!(matches!(sample(&bell(), &cfg), Err(EngineError::Circuit(_))));
    }

    #[test]
    fn zero_noise_matches_ideal() {
        let zero = NoiseModel::new(
            GateName::ALL.into_iter().map(|g| (g, 0.0)).collect(),
            0.0,
        )
        .unwrap();
        let cfg = RunConfig::new(2000, 5, custom()).unwrap();
        assert_eq!(sample(&bell(), &cfg).unwrap(), sample_noisy(&bell(), &cfg, &zero).unwrap());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::readout_only(1.5).is_err());
        assert!(NoiseModel::new(BTreeMap::from([(GateName::H, -0.1)]), 0.0).is_err());
        let preset = NoiseModel::preset();
        assert_eq!(preset.gate_probability(GateName::Cx), 0.02);
        assert_eq!(preset.gate_probability(GateName::H), 0.005);
        let json = serde_json::to_string(&preset).unwrap();
        let back: NoiseModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, preset);
        assert!(serde_json::from_str::<NoiseModel>(r#"{"readout_flip": 2}"#).is_err());
    }

    #[test]
    fn noisy_bell_shows_minor_bars() {
        let cfg = RunConfig::new(8192, 1, custom()).unwrap();
        let h = sample_noisy(&bell(), &cfg, &NoiseModel::preset()).unwrap();
        assert_eq!(h.counts.len(), 4);
        let major = h.count("00000") + h.count("00011");
        let minor = h.count("00001") + h.count("00010");
        assert!(minor > 0 && minor * 10 < major);
    }

    #[test]
    fn histogram_json_layout() {
        let h = Histogram::from_registers(&[1, 0, 1], 5, 9);
        assert_eq!(h.to_json(), r#"{"shots":3,"seed":9,"counts":{"00000":1,"00001":2}}"#);
    }

    #[test]
    fn cdf_never_returns_zero_probability_outcome() {
        let cdf = Cdf::new(&[0.0, 0.5, 0.0, 0.5, 0.0]);
        assert_eq!(cdf.pick(0.0), 1);
        assert_eq!(cdf.pick(0.49), 1);
        assert_eq!(cdf.pick(0.5), 3);
        assert_eq!(cdf.pick(0.9999999), 3);
        assert_eq!(cdf.pick(1.0), 3);
    }
}
