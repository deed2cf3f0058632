//! Post-run analytics: two-qubit entanglement, frequency and runs tests for
//! random bit streams, and agreement of interferometer sweeps with cos²(φ/2).

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::linalg::{LinalgError, StateVector};

/// Default separability threshold for exact statevectors.
pub const SEPARABLE_TOL: f64 = 1e-8;
/// Minimum stream length for the randomness tests.
pub const MIN_STREAM_LEN: usize = 100;
/// Significance level of both randomness tests.
pub const ALPHA: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("expected a 2-qubit state, got {0} qubits")]
    NotTwoQubits(usize),
    #[error("qubits {0} and {1} must be distinct and inside the register")]
    BadPair(usize, usize),
    #[error("state has weight {0:e} outside the chosen pair")]
    PairNotIsolated(f64),
    #[error("bit stream has {len} bits, need at least {min}")]
    StreamTooShort { len: usize, min: usize },
    #[error("bit value {0} is not 0 or 1")]
    NotABit(u8),
    #[error("sweep table is empty")]
    EmptyTable,
    #[error("row {row}: p0 = {p0} outside [0, 1]")]
    BadProbability { row: usize, p0: f64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Concurrence `2|ad − bc|` of a pure two-qubit state with amplitudes
/// `(a, b, c, d)`. Zero for product states, one for Bell states.
pub fn concurrence(state: &StateVector) -> Result<f64, AnalysisError> {
    if state.n_qubits() != 2 {
        return Err(AnalysisError::NotTwoQubits(state.n_qubits()));
    }
    let [a, b, c, d] = [0, 1, 2, 3].map(|k| state.amplitudes()[k]);
    Ok((2.0 * (a * d - b * c).norm()).min(1.0))
}

pub fn is_separable(state: &StateVector, tol: f64) -> Result<bool, AnalysisError> {
    Ok(concurrence(state)? <= tol)
}

/// Extracts the two-qubit state on `(lo, hi)` (new q[0] = `lo`, q[1] = `hi`)
/// when every other qubit is in `|0⟩`.
pub fn restrict_to_pair(state: &StateVector, lo: usize, hi: usize) -> Result<StateVector, AnalysisError> {
    let n = state.n_qubits();
    if lo == hi || lo >= n || hi >= n {
        return Err(AnalysisError::BadPair(lo, hi));
    }
    let pair_mask = (1usize << lo) | (1usize << hi);
    let mut amps = vec![Default::default(); 4];
    let mut outside = 0.0;
    for (k, amp) in state.amplitudes().iter().enumerate() {
        if k & !pair_mask != 0 {
            outside += amp.norm_sqr();
        } else {
            amps[((k >> lo) & 1) | (((k >> hi) & 1) << 1)] = *amp;
        }
    }
    if outside > 1e-12 {
        return Err(AnalysisError::PairNotIsolated(outside));
    }
    Ok(StateVector::from_amplitudes(amps)?)
}

/// Ordered sequence of bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitStream {
    bits: Vec<u8>,
}

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self, AnalysisError> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(AnalysisError::NotABit(b));
        }
        Ok(Self { bits })
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self {
            bits: bits.into_iter().map(u8::from).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    fn check_len(&self) -> Result<(), AnalysisError> {
        if self.len() < MIN_STREAM_LEN {
            return Err(AnalysisError::StreamTooShort {
                len: self.len(),
                min: MIN_STREAM_LEN,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
    /// False when the test could not be applied; `pass` is then false too.
    pub precondition_met: bool,
}

impl TestReport {
    fn from_p(statistic: f64, p_value: f64) -> Self {
        Self {
            statistic,
            p_value,
            pass: p_value >= ALPHA,
            precondition_met: true,
        }
    }
}

/// Frequency (monobit) test. The statistic is `|#ones − #zeros| / √n`.
pub fn monobit_test(stream: &BitStream) -> Result<TestReport, AnalysisError> {
    stream.check_len()?;
    let n = stream.len() as f64;
    let s = 2.0 * stream.ones() as f64 - n;
    let stat = s.abs() / n.sqrt();
    Ok(TestReport::from_p(stat, erfc(stat / std::f64::consts::SQRT_2)))
}

/// Runs test. The statistic is the number of maximal runs. If the ones
/// proportion already fails the frequency bound `|π − ½| < 2/√n` the report
/// has `precondition_met = false`.
pub fn runs_test(stream: &BitStream) -> Result<TestReport, AnalysisError> {
    stream.check_len()?;
    let bits = stream.bits();
    let n = bits.len() as f64;
    let runs = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let v = runs as f64;
    let pi = stream.ones() as f64 / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(TestReport {
            statistic: v,
            p_value: 0.0,
            pass: false,
            precondition_met: false,
        });
    }
    let q = pi * (1.0 - pi);
    let p = erfc((v - 2.0 * n * q).abs() / (2.0 * (2.0 * n).sqrt() * q));
    Ok(TestReport::from_p(v, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    pub p0: f64,
    pub shots: u64,
}

/// Measured `P(0)` against phase, one row per sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(rows: Vec<SweepRow>) -> Result<Self, AnalysisError> {
        if rows.is_empty() {
            return Err(AnalysisError::EmptyTable);
        }
        for (i, r) in rows.iter().enumerate() {
            if !(0.0..=1.0).contains(&r.p0) {
                return Err(AnalysisError::BadProbability { row: i, p0: r.p0 });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    /// CSV with header `phi,p0,shots`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, AnalysisError> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows = rd
            .deserialize()
            .collect::<Result<Vec<SweepRow>, _>>()
            .map_err(|e| AnalysisError::Csv(e.to_string()))?;
        Self::new(rows)
    }

    /// Whitespace-separated `phi p0 theory` columns for gnuplot.
    pub fn to_gnuplot(&self) -> String {
        let mut out = String::from("# phi p0 cos^2(phi/2)\n");
        for r in &self.rows {
            out.push_str(&format!("{} {} {}\n", r.phi, r.p0, mzi_p0(r.phi)));
        }
        out
    }
}

/// Ideal probability of reading 0 after `H·P(φ)·H|0⟩`.
pub fn mzi_p0(phi: f64) -> f64 {
    (phi / 2.0).cos().powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MziAgreement {
    pub max_abs_residual: f64,
    /// `p0 − cos²(φ/2)` per row.
    pub per_row: Vec<f64>,
}

pub fn mzi_agreement(table: &SweepTable) -> MziAgreement {
    let per_row: Vec<f64> = table.rows.iter().map(|r| r.p0 - mzi_p0(r.phi)).collect();
    let max_abs_residual = per_row.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    MziAgreement {
        max_abs_residual,
        per_row,
    }
}
