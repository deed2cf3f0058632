//! Dense complex state vectors and the small unitaries that act on them.
//!
//! Basis index `k` of an `n`-qubit state assigns bit `i` (value `2^i`) to
//! qubit `q[i]`. Printing `k` in binary therefore gives the readout string
//! with `q[0]` as the rightmost character.

use num_complex::Complex64;
use thiserror::Error;

/// Amplitude type used throughout the simulator.
pub type ComplexScalar = Complex64;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 16;

/// Tolerance for state comparisons and norm checks.
pub const STATE_TOL: f64 = 1e-10;

/// Tolerance for `U†U = I` checks.
pub const UNITARY_TOL: f64 = 1e-12;

/// Drift beyond this after a gate means something is broken upstream.
const DRIFT_REPORT_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("qubit index {index} out of range for {n_qubits}-qubit state")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("control and target must differ (both {0})")]
    EqualIndices(usize),
    #[error("matrix is not unitary (max |U†U - I| = {0:e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("register size {0} outside 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("state has zero norm")]
    ZeroNorm,
}

/// Normalized pure state over `2^n_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self, LinalgError> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, LinalgError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(LinalgError::IndexOutOfRange { index, n_qubits });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, LinalgError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(LinalgError::BadLength(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(LinalgError::NonFinite(i));
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 {
            return Err(LinalgError::ZeroNorm);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// `|amps[k]|²` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies `u` to `target`, returning the new state.
    pub fn apply_1q(&self, u: &Unitary2, target: usize) -> Result<Self, LinalgError> {
        let mut next = self.clone();
        next.apply_1q_in_place(u, target)?;
        Ok(next)
    }

    /// Applies `u` to the ordered `(control, target)` pair, returning the new state.
    pub fn apply_2q(
        &self,
        u: &Unitary4,
        control: usize,
        target: usize,
    ) -> Result<Self, LinalgError> {
        let mut next = self.clone();
        next.apply_2q_in_place(u, control, target)?;
        Ok(next)
    }

    pub fn apply_1q_in_place(&mut self, u: &Unitary2, target: usize) -> Result<(), LinalgError> {
        self.check_index(target)?;
        u.check_unitary()?;
        let m = &u.0;
        let bit = 1usize << target;
        for k in 0..self.amps.len() {
            if k & bit != 0 {
                continue;
            }
            let a0 = self.amps[k];
            let a1 = self.amps[k | bit];
            self.amps[k] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[k | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        self.settle_norm();
        Ok(())
    }

    /// The 4×4 matrix is indexed by `2·bit(control) + bit(target)`.
    pub fn apply_2q_in_place(
        &mut self,
        u: &Unitary4,
        control: usize,
        target: usize,
    ) -> Result<(), LinalgError> {
        self.check_index(control)?;
        self.check_index(target)?;
        if control == target {
            return Err(LinalgError::EqualIndices(control));
        }
        u.check_unitary()?;
        let m = &u.0;
        let cb = 1usize << control;
        let tb = 1usize << target;
        for k in 0..self.amps.len() {
            if k & (cb | tb) != 0 {
                continue;
            }
            let idx = [k, k | tb, k | cb, k | cb | tb];
            let old = idx.map(|i| self.amps[i]);
            for (row, &out) in idx.iter().enumerate() {
                self.amps[out] = (0..4).map(|col| m[row][col] * old[col]).sum();
            }
        }
        self.settle_norm();
        Ok(())
    }

    /// True iff `self = c · other` for some unit-modulus `c`, entrywise within `tol`.
    pub fn equal_up_to_global_phase(&self, other: &Self, tol: f64) -> Result<bool, LinalgError> {
        if self.n_qubits != other.n_qubits {
            return Err(LinalgError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        // Anchor the phase on the largest amplitude of `other`.
        let (pivot, anchor) = other
            .amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .expect("state has at least two amplitudes");
        if self.amps[pivot].norm() <= tol {
            return Ok(false);
        }
        let ratio = self.amps[pivot] / anchor;
        let phase = ratio / ratio.norm();
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a - phase * b).norm() <= tol))
    }

    fn check_index(&self, index: usize) -> Result<(), LinalgError> {
        if index >= self.n_qubits {
            Err(LinalgError::IndexOutOfRange {
                index,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn settle_norm(&mut self) {
        let norm = norm_sqr(&self.amps).sqrt();
        let drift = (norm - 1.0).abs();
        if drift > DRIFT_REPORT_TOL {
            log::warn!("statevector norm drifted to {norm}; renormalizing");
        }
        if drift > STATE_TOL {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }
}

fn check_qubit_count(n: usize) -> Result<(), LinalgError> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(LinalgError::BadQubitCount(n))
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

/// Row-major 4×4 complex matrix over the `(control, target)` basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4(pub [[Complex64; 4]; 4]);

macro_rules! square_matrix {
    ($ty:ident, $n:literal) => {
        impl $ty {
            pub fn identity() -> Self {
                let mut m = [[ZERO; $n]; $n];
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = ONE;
                }
                Self(m)
            }

            pub fn zeros() -> Self {
                Self([[ZERO; $n]; $n])
            }

            pub fn adjoint(&self) -> Self {
                let mut m = [[ZERO; $n]; $n];
                for (i, row) in m.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = self.0[j][i].conj();
                    }
                }
                Self(m)
            }

            pub fn matmul(&self, rhs: &Self) -> Self {
                let mut m = [[ZERO; $n]; $n];
                for (i, row) in m.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = (0..$n).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
                    }
                }
                Self(m)
            }

            /// Largest entrywise modulus of `self - other`.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .flatten()
                    .zip(other.0.iter().flatten())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            }

            fn unitarity_error(&self) -> f64 {
                self.adjoint().matmul(self).max_abs_diff(&Self::identity())
            }

            pub fn is_unitary(&self, tol: f64) -> bool {
                self.unitarity_error() <= tol
            }

            fn check_unitary(&self) -> Result<(), LinalgError> {
                let err = self.unitarity_error();
                if err <= UNITARY_TOL {
                    Ok(())
                } else {
                    Err(LinalgError::NotUnitary(err))
                }
            }
        }
    };
}

square_matrix!(Unitary2, 2);
square_matrix!(Unitary4, 4);
