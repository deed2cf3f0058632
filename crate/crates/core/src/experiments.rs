//! Scripted classroom experiments: a one-qubit random number generator, a
//! Mach–Zehnder phase sweep and Bell-state preparation.
//!
//! The interferometer needs no mirror element. Two Hadamards in a row are
//! the whole device, and with no phase between them the first detector
//! always clicks:
//!
//! ```
//! use qxsim_core::{engine, Circuit};
//!
//! let mut mzi = Circuit::new(1, 1).unwrap();
//! mzi.h(0).unwrap().h(0).unwrap();
//! let p = engine::statevector(&mzi).unwrap().probabilities();
//! assert!((p[0] - 1.0).abs() < 1e-12);
//! ```

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    self, concurrence, monobit_test, mzi_agreement, restrict_to_pair, runs_test, AnalysisError,
    BitStream, MziAgreement, SweepRow, SweepTable, TestReport, SEPARABLE_TOL,
};
use crate::circuit::{parse_register, Circuit, CircuitError};
use crate::engine::{self, EngineError, Execution, Histogram, NoiseModel, RunConfig};
use crate::gates::GateSpec;
use crate::rng::derive_seed;
use crate::topology::BackendTopology;

/// Bits collected for the randomness tests unless overridden.
pub const DEFAULT_BITSTREAM_LEN: usize = 10_000;
/// Exact statevector checks.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid phase plate: {0}")]
    BadPlate(String),
    #[error("phase sweep needs at least one angle")]
    EmptySweep,
    #[error("non-finite phase {0}")]
    BadPhase(f64),
    #[error("backend {backend} has {n_qubits} qubits, experiment needs qubits {a} and {b}")]
    BadQubits {
        backend: String,
        n_qubits: usize,
        a: usize,
        b: usize,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Glass plate in one interferometer arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePlateSpec {
    /// Refractive index.
    pub n: f64,
    /// Thickness in meters.
    pub t: f64,
    /// Wavelength in meters.
    pub lambda: f64,
}

impl PhasePlateSpec {
    pub fn new(n: f64, t: f64, lambda: f64) -> Result<Self, ExperimentError> {
        let spec = Self { n, t, lambda };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<(), ExperimentError> {
        if ![self.n, self.t, self.lambda].iter().all(|x| x.is_finite()) {
            return Err(ExperimentError::BadPlate("non-finite parameter".into()));
        }
        // n = 1 is allowed: a plate matching its surroundings gives φ = 0
        if self.n < 1.0 {
            return Err(ExperimentError::BadPlate(format!("refractive index {} < 1", self.n)));
        }
        if self.t <= 0.0 || self.lambda <= 0.0 {
            return Err(ExperimentError::BadPlate("thickness and wavelength must be positive".into()));
        }
        Ok(())
    }
}

/// Relative phase `2π(n − 1)t/λ`, optionally reduced into `[0, 2π)`.
pub fn phase_from_plate(spec: &PhasePlateSpec, reduce: bool) -> Result<f64, ExperimentError> {
    spec.check()?;
    let phi = TAU * (spec.n - 1.0) * spec.t / spec.lambda;
    Ok(if reduce { phi.rem_euclid(TAU) } else { phi })
}

/// Shared run parameters.
#[derive(Debug, Clone)]
pub struct Setup {
    pub shots: u64,
    pub seed: u64,
    pub backend: BackendTopology,
    pub noise: Option<NoiseModel>,
}

impl Setup {
    pub fn new(shots: u64, seed: u64, backend: BackendTopology) -> Self {
        Self {
            shots,
            seed,
            backend,
            noise: None,
        }
    }

    pub fn with_noise(mut self, noise: Option<NoiseModel>) -> Self {
        self.noise = noise;
        self
    }

    fn config(&self, seed: u64, shots: u64) -> Result<RunConfig, EngineError> {
        Ok(RunConfig::new(shots, seed, self.backend.clone())?
            .with_noise(self.noise.clone())
            .with_execution(Execution::Parallel))
    }

    fn inputs(&self) -> Inputs {
        Inputs {
            shots: self.shots,
            seed: self.seed,
            backend: self.backend.name().to_string(),
            noise: self.noise.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub shots: u64,
    pub seed: u64,
    pub backend: String,
    pub noise: Option<NoiseModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Exp1,
    Exp2,
    Exp3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One quantitative criterion with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Bound::AtMost,
            limit,
            pass: value <= limit,
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Bound::AtLeast,
            limit,
            pass: value >= limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp1Summary {
    /// Readout of the single shot when `shots = 1`.
    pub collapsed: Option<String>,
    pub p1: f64,
    pub deviation: f64,
    pub bitstream: String,
    pub monobit: TestReport,
    pub runs: TestReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp2Summary {
    pub agreement: MziAgreement,
    /// Largest `|P(0) − cos²(φ/2)|` of the exact statevectors.
    pub exact_max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp3Summary {
    pub variant: Exp3Variant,
    pub control: usize,
    pub target: usize,
    /// Amplitudes `[re, im]` of the prepared pair, index = 2·control + target.
    pub pair_state: Vec<[f64; 2]>,
    pub concurrence: f64,
    pub separable: bool,
    /// Fraction of shots where both measured bits agree.
    pub equal_bit_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Summary {
    Exp1(Exp1Summary),
    Exp2(Exp2Summary),
    Exp3(Exp3Summary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: ExperimentId,
    pub inputs: Inputs,
    pub histograms: Vec<Histogram>,
    pub sweep: Option<SweepTable>,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    fn new(
        id: ExperimentId,
        inputs: Inputs,
        histograms: Vec<Histogram>,
        sweep: Option<SweepTable>,
        summary: Summary,
        checks: Vec<Check>,
    ) -> Self {
        let verdict = if checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            id,
            inputs,
            histograms,
            sweep,
            summary,
            checks,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Three standard deviations of a fair-coin frequency over `shots`.
pub fn three_sigma(shots: u64) -> f64 {
    3.0 * (0.25 / shots as f64).sqrt()
}

fn one_qubit_circuit(backend: &BackendTopology) -> Result<Circuit, ExperimentError> {
    let n = backend.n_qubits();
    if n < 1 {
        return Err(ExperimentError::BadQubits {
            backend: backend.name().into(),
            n_qubits: n,
            a: 0,
            b: 0,
        });
    }
    Ok(Circuit::new(n, n)?)
}

/// `h q[0]; measure q[0] -> c[0]`
pub fn exp1_circuit(backend: &BackendTopology) -> Result<Circuit, ExperimentError> {
    let mut c = one_qubit_circuit(backend)?;
    c.h(0)?.measure(0, 0)?;
    Ok(c)
}

/// Equal-superposition measurement plus a bit stream of `bitstream_len`
/// independent single-shot collapses for the randomness tests.
pub fn run_exp1(setup: &Setup, bitstream_len: usize) -> Result<ExperimentReport, ExperimentError> {
    let circuit = exp1_circuit(&setup.backend)?;
    let hist = engine::sample(&circuit, &setup.config(setup.seed, setup.shots)?)?;
    let p1 = hist.count_where(|k| k.ends_with('1')) as f64 / hist.shots as f64;
    let deviation = (p1 - 0.5).abs();

    let stream_cfg = setup.config(derive_seed(setup.seed, u64::MAX), bitstream_len as u64)?;
    let bits = BitStream::from_bools(
        engine::shot_registers(&circuit, &stream_cfg)?
            .into_iter()
            .map(|r| r & 1 == 1),
    );
    let monobit = monobit_test(&bits)?;
    let runs = runs_test(&bits)?;

    let mut checks = Vec::new();
    let collapsed = if setup.shots == 1 {
        let key = hist.counts.keys().next().cloned().unwrap_or_default();
        let register = parse_register(&key).unwrap_or(u64::MAX) as f64;
        checks.push(Check::at_most("single-shot register value", register, 1.0));
        Some(key)
    } else {
        checks.push(Check::at_most("|p(1) - 0.5|", deviation, three_sigma(setup.shots)));
        None
    };
    checks.push(Check::at_least("monobit p-value", monobit.p_value, analysis::ALPHA));
    checks.push(Check::at_least("runs p-value", runs.p_value, analysis::ALPHA));

    let bitstream = bits.bits().iter().map(|b| char::from(b'0' + b)).collect();
    let summary = Summary::Exp1(Exp1Summary {
        collapsed,
        p1,
        deviation,
        bitstream,
        monobit,
        runs,
    });
    Ok(ExperimentReport::new(ExperimentId::Exp1, setup.inputs(), vec![hist], None, summary, checks))
}

/// `h q[0]; u1(φ) q[0]; h q[0]; measure q[0] -> c[0]`
pub fn mzi_circuit(backend: &BackendTopology, phi: f64) -> Result<Circuit, ExperimentError> {
    if !phi.is_finite() {
        return Err(ExperimentError::BadPhase(phi));
    }
    let mut c = one_qubit_circuit(backend)?;
    c.h(0)?
        .gate(GateSpec::u1(phi).map_err(CircuitError::from)?, &[0])?
        .h(0)?
        .measure(0, 0)?;
    Ok(c)
}

/// Thirteen points from 0 to 2π in steps of π/6.
pub fn default_phis() -> Vec<f64> {
    (0..=12).map(|k| k as f64 * PI / 6.0).collect()
}

/// Interferometer sweep. Point `k` is sampled with `derive_seed(seed, k)`.
pub fn run_exp2(setup: &Setup, phis: &[f64]) -> Result<ExperimentReport, ExperimentError> {
    if phis.is_empty() {
        return Err(ExperimentError::EmptySweep);
    }
    let mut rows = Vec::with_capacity(phis.len());
    let mut histograms = Vec::with_capacity(phis.len());
    let mut exact_max_residual = 0.0f64;
    for (k, &phi) in phis.iter().enumerate() {
        let circuit = mzi_circuit(&setup.backend, phi)?;
        let exact_p0 = engine::statevector(&circuit)?.probabilities()[0];
        exact_max_residual = exact_max_residual.max((exact_p0 - analysis::mzi_p0(phi)).abs());
        let hist = engine::sample(&circuit, &setup.config(derive_seed(setup.seed, k as u64), setup.shots)?)?;
        let p0 = hist.count_where(|key| key.ends_with('0')) as f64 / hist.shots as f64;
        rows.push(SweepRow {
            phi,
            p0,
            shots: setup.shots,
        });
        histograms.push(hist);
    }
    let table = SweepTable::new(rows)?;
    let agreement = mzi_agreement(&table);
    let checks = vec![
        Check::at_most("exact |P(0) - cos^2(phi/2)|", exact_max_residual, EXACT_TOL),
        Check::at_most("max |p0 - cos^2(phi/2)|", agreement.max_abs_residual, three_sigma(setup.shots)),
    ];
    let summary = Summary::Exp2(Exp2Summary {
        agreement,
        exact_max_residual,
    });
    Ok(ExperimentReport::new(ExperimentId::Exp2, setup.inputs(), histograms, Some(table), summary, checks))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "theta")]
pub enum Exp3Variant {
    /// `h` then `cx`: counts on 00 and 11.
    PsiPlus,
    /// `x` on the target first: counts on 01 and 10.
    PhiPlus,
    /// `u3(θ,0,0)` in place of `h`: concurrence `|sin θ|`.
    U3Theta(f64),
}

impl Exp3Variant {
    fn expected_concurrence(&self) -> f64 {
        match *self {
            Exp3Variant::PsiPlus | Exp3Variant::PhiPlus => 1.0,
            Exp3Variant::U3Theta(theta) => theta.sin().abs(),
        }
    }

    fn expected_equal_fraction(&self) -> f64 {
        match self {
            Exp3Variant::PhiPlus => 0.0,
            _ => 1.0,
        }
    }
}

/// Control and target of the entangling `cx`. Defaults to `cx q[1],q[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitPair {
    pub control: usize,
    pub target: usize,
}

impl Default for QubitPair {
    fn default() -> Self {
        Self { control: 1, target: 0 }
    }
}

/// Bell-preparation circuit; each qubit `q[i]` is measured into `c[i]`.
pub fn bell_circuit(
    backend: &BackendTopology,
    variant: Exp3Variant,
    pair: QubitPair,
) -> Result<Circuit, ExperimentError> {
    let QubitPair { control, target } = pair;
    let n = backend.n_qubits();
    if control == target || control >= n || target >= n {
        return Err(ExperimentError::BadQubits {
            backend: backend.name().into(),
            n_qubits: n,
            a: control,
            b: target,
        });
    }
    let mut c = Circuit::new(n, n)?;
    match variant {
        Exp3Variant::PsiPlus => {
            c.h(control)?;
        }
        Exp3Variant::PhiPlus => {
            c.x(target)?.h(control)?;
        }
        Exp3Variant::U3Theta(theta) => {
            c.gate(GateSpec::u3(theta, 0.0, 0.0).map_err(CircuitError::from)?, &[control])?;
        }
    }
    c.cx(control, target)?.measure(target, target)?.measure(control, control)?;
    Ok(c)
}

pub fn run_exp3(setup: &Setup, variant: Exp3Variant, pair: QubitPair) -> Result<ExperimentReport, ExperimentError> {
    let circuit = bell_circuit(&setup.backend, variant, pair)?;
    let state = engine::statevector(&circuit)?;
    let pair_state = restrict_to_pair(&state, pair.target, pair.control)?;
    let c = concurrence(&pair_state)?;

    let cfg = setup.config(setup.seed, setup.shots)?;
    let registers = engine::shot_registers(&circuit, &cfg)?;
    let width = circuit.readout_width();
    let hist = Histogram::from_registers(&registers, width, setup.seed);
    let equal = registers
        .iter()
        .filter(|&&r| (r >> pair.control) & 1 == (r >> pair.target) & 1)
        .count();
    let equal_bit_fraction = equal as f64 / registers.len() as f64;

    let expected_fraction = variant.expected_equal_fraction();
    let mut checks = vec![Check::at_most(
        "|concurrence - expected|",
        (c - variant.expected_concurrence()).abs(),
        EXACT_TOL,
    )];
    if setup.noise.is_none() {
        checks.push(Check::at_most(
            "|equal-bit fraction - expected|",
            (equal_bit_fraction - expected_fraction).abs(),
            0.0,
        ));
    } else {
        // noise may add minority patterns but must not overturn the majority
        checks.push(Check::at_most(
            "|equal-bit fraction - expected|",
            (equal_bit_fraction - expected_fraction).abs(),
            0.5,
        ));
    }
    let summary = Summary::Exp3(Exp3Summary {
        variant,
        control: pair.control,
        target: pair.target,
        pair_state: pair_state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        concurrence: c,
        separable: c <= SEPARABLE_TOL,
        equal_bit_fraction,
    });
    Ok(ExperimentReport::new(ExperimentId::Exp3, setup.inputs(), vec![hist], None, summary, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::builtin;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn custom(shots: u64, seed: u64) -> Setup {
        Setup::new(shots, seed, builtin("custom").unwrap())
    }

    #[test]
    fn phase_plate_examples() {
        let lambda = 500e-9;
        let half_wave = PhasePlateSpec::new(1.5, lambda, lambda).unwrap();
        assert!((phase_from_plate(&half_wave, false).unwrap() - PI).abs() < 1e-12);
        assert!((phase_from_plate(&half_wave, true).unwrap() - PI).abs() < 1e-12);
        let same = PhasePlateSpec::new(1.5, 500e-9, 500e-9).unwrap();
        assert!((phase_from_plate(&same, true).unwrap() - PI).abs() < 1e-12);
        let air = PhasePlateSpec::new(1.0, 3e-3, lambda).unwrap();
        assert_eq!(phase_from_plate(&air, false).unwrap(), 0.0);
        let thick = PhasePlateSpec::new(1.5, 3.0 * lambda, lambda).unwrap();
        assert!((phase_from_plate(&thick, false).unwrap() - 3.0 * PI).abs() < 1e-12);
        assert!((phase_from_plate(&thick, true).unwrap() - PI).abs() < 1e-12);

        assert!(PhasePlateSpec::new(0.9, 1.0, 1.0).is_err());
        assert!(PhasePlateSpec::new(1.5, 0.0, 1.0).is_err());
        assert!(PhasePlateSpec::new(1.5, 1.0, -1.0).is_err());
        assert!(PhasePlateSpec::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn exp1_single_shot_and_statistics() {
        for seed in 0..5 {
            let r = run_exp1(&custom(1, seed), 1000).unwrap();
            let Summary::Exp1(s) = &r.summary else { panic!() };
            let key = s.collapsed.as_deref().unwrap();
            assert!(key == "00000" || key == "00001");
        }
        let r = run_exp1(&custom(8192, 42), DEFAULT_BITSTREAM_LEN).unwrap();
        let Summary::Exp1(s) = &r.summary else { panic!() };
        assert!(s.deviation <= 0.0166);
        assert_eq!(s.bitstream.len(), DEFAULT_BITSTREAM_LEN);
    }

    #[test]
    fn exp1_is_byte_reproducible() {
        let a = run_exp1(&custom(8192, 9), 2000).unwrap().to_json();
        let b = run_exp1(&custom(8192, 9), 2000).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn exp2_statevector_and_sweep() {
        let backend = builtin("ibmqx4").unwrap();
        let p = |phi| engine::statevector(&mzi_circuit(&backend, phi).unwrap()).unwrap().probabilities();
        assert!((p(0.0)[0] - 1.0).abs() < 1e-12);
        assert!(p(PI)[0].abs() < 1e-12);

        let nine: Vec<f64> = (0..9).map(|k| k as f64 * PI / 4.0).collect();
        let r = run_exp2(&custom(8192, 3), &nine).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.sweep.as_ref().unwrap().rows().len(), 9);
        assert_eq!(default_phis().len(), 13);
        assert!((default_phis()[12] - TAU).abs() < 1e-12);
        assert_eq!(run_exp2(&custom(10, 0), &[]).unwrap_err(), ExperimentError::EmptySweep);
    }

    #[test]
    fn exp3_variants() {
        let r = run_exp3(&custom(8192, 1), Exp3Variant::PsiPlus, QubitPair::default()).unwrap();
        assert!(r.passed());
        let keys: Vec<&String> = r.histograms[0].counts.keys().collect();
        assert_eq!(keys, ["00000", "00011"]);

        let r = run_exp3(&custom(8192, 1), Exp3Variant::PhiPlus, QubitPair::default()).unwrap();
        assert!(r.passed());
        let keys: Vec<&String> = r.histograms[0].counts.keys().collect();
        assert_eq!(keys, ["00001", "00010"]);

        for theta in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2] {
            let r = run_exp3(&custom(256, 1), Exp3Variant::U3Theta(theta), QubitPair::default()).unwrap();
            let Summary::Exp3(s) = &r.summary else { panic!() };
            assert!((s.concurrence - theta.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn exp3_noise_and_topology() {
        let setup = custom(8192, 2).with_noise(Some(NoiseModel::preset()));
        let r = run_exp3(&setup, Exp3Variant::PsiPlus, QubitPair::default()).unwrap();
        assert_eq!(r.histograms[0].counts.len(), 4);
        assert!(r.passed());

        let qx2 = Setup::new(100, 0, builtin("ibmqx2").unwrap());
        assert!(matches!(
            run_exp3(&qx2, Exp3Variant::PsiPlus, QubitPair::default()),
            Err(ExperimentError::Engine(EngineError::Validation(_)))
        ));
        let flipped = QubitPair { control: 0, target: 1 };
        assert!(run_exp3(&qx2, Exp3Variant::PsiPlus, flipped).unwrap().passed());
        let bad = QubitPair { control: 7, target: 0 };
        assert!(matches!(run_exp3(&qx2, Exp3Variant::PsiPlus, bad), Err(ExperimentError::BadQubits { .. })));
    }

    #[test]
    fn report_json_shape() {
        let r = run_exp3(&custom(10, 0), Exp3Variant::U3Theta(0.5), QubitPair::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["id"], "exp3");
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["summary"]["variant"]["kind"], "u3_theta");
        assert_eq!(v["inputs"]["backend"], "custom");
    }
}
