//! Gate catalogue of the five-qubit backends.
//!
//! Matrix conventions:
//!
//! * `u1(φ) = P(φ) = [[1, 0], [0, e^{iφ}]]`, with `z = P(π)`, `s = P(π/2)`, `t = P(π/4)`.
//! * `u2(φ, Φ) = (1/√2) [[1, -e^{iφ}], [e^{iΦ}, e^{i(φ+Φ)}]]`.
//! * `u3(θ, φ, Φ) = [[cos(θ/2), -e^{iφ} sin(θ/2)], [e^{iΦ} sin(θ/2), e^{i(φ+Φ)} cos(θ/2)]]`.
//! * `y = [[0, -i], [i, 0]]`, so that `Z·X = iY`.
//! * `cx` is the 4×4 CNOT over `|control target⟩`.
//!
//! Parameters are listed in the order they appear in QASM: `u2(φ, Φ)`,
//! `u3(θ, φ, Φ)`. Angles are radians.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Unitary2, Unitary4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate `{name}` takes {expected} parameter(s), got {got}")]
    WrongArity {
        name: GateName,
        expected: usize,
        got: usize,
    },
    #[error("gate `{0}` has a non-finite angle")]
    NonFiniteAngle(GateName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    U1,
    U2,
    U3,
    Cx,
}

impl GateName {
    pub const ALL: [GateName; 13] = [
        GateName::Id,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::Sdg,
        GateName::T,
        GateName::Tdg,
        GateName::U1,
        GateName::U2,
        GateName::U3,
        GateName::Cx,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::Id => "id",
            GateName::X => "x",
            GateName::Y => "y",
            GateName::Z => "z",
            GateName::H => "h",
            GateName::S => "s",
            GateName::Sdg => "sdg",
            GateName::T => "t",
            GateName::Tdg => "tdg",
            GateName::U1 => "u1",
            GateName::U2 => "u2",
            GateName::U3 => "u3",
            GateName::Cx => "cx",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateName::U1 => 1,
            GateName::U2 => 2,
            GateName::U3 => 3,
            _ => 0,
        }
    }

    pub fn qubit_count(self) -> usize {
        if self == GateName::Cx {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = GateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateName::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| GateError::UnknownGate(s.to_string()))
    }
}

/// A catalogue gate together with its angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGateSpec")]
pub struct GateSpec {
    name: GateName,
    params: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGateSpec {
    name: String,
    #[serde(default)]
    params: Vec<f64>,
}

impl TryFrom<RawGateSpec> for GateSpec {
    type Error = GateError;

    fn try_from(raw: RawGateSpec) -> Result<Self, Self::Error> {
        GateSpec::new(raw.name.parse()?, raw.params)
    }
}

impl GateSpec {
    pub fn new(name: GateName, params: Vec<f64>) -> Result<Self, GateError> {
        let expected = name.param_count();
        if params.len() != expected {
            return Err(GateError::WrongArity {
                name,
                expected,
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(GateError::NonFiniteAngle(name));
        }
        Ok(Self { name, params })
    }

    /// Looks up a gate by its QASM name.
    pub fn named(name: &str, params: Vec<f64>) -> Result<Self, GateError> {
        Self::new(name.parse()?, params)
    }

    /// A parameterless gate. Panics if `name` takes parameters.
    pub fn fixed(name: GateName) -> Self {
        Self::new(name, Vec::new()).expect("gate takes parameters")
    }

    pub fn u1(phi: f64) -> Result<Self, GateError> {
        Self::new(GateName::U1, vec![phi])
    }

    pub fn u2(phi: f64, lambda: f64) -> Result<Self, GateError> {
        Self::new(GateName::U2, vec![phi, lambda])
    }

    pub fn u3(theta: f64, phi: f64, lambda: f64) -> Result<Self, GateError> {
        Self::new(GateName::U3, vec![theta, phi, lambda])
    }

    pub fn name(&self) -> GateName {
        self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn matrix(&self) -> GateMatrix {
        matrix_of(self)
    }

    pub fn adjoint(&self) -> GateSpec {
        adjoint_of(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    Single(Unitary2),
    Two(Unitary4),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase_gate(phi: f64) -> Unitary2 {
    Unitary2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, phi)]])
}

fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Unitary2 {
    let (sin, cos) = (theta / 2.0).sin_cos();
    Unitary2([
        [c(cos, 0.0), -Complex64::from_polar(sin, phi)],
        [Complex64::from_polar(sin, lambda), Complex64::from_polar(cos, phi + lambda)],
    ])
}

pub fn cnot_matrix() -> Unitary4 {
    let mut m = Unitary4::zeros();
    m.0[0][0] = c(1.0, 0.0);
    m.0[1][1] = c(1.0, 0.0);
    m.0[2][3] = c(1.0, 0.0);
    m.0[3][2] = c(1.0, 0.0);
    m
}

/// The matrix of a catalogue gate.
pub fn matrix_of(spec: &GateSpec) -> GateMatrix {
    let p = &spec.params;
    let single = match spec.name {
        GateName::Id => Unitary2::identity(),
        GateName::X => Unitary2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]),
        GateName::Y => Unitary2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        GateName::Z => phase_gate(PI),
        GateName::H => {
            let h = FRAC_1_SQRT_2;
            Unitary2([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
        }
        GateName::S => phase_gate(FRAC_PI_2),
        GateName::Sdg => phase_gate(FRAC_PI_2).adjoint(),
        GateName::T => phase_gate(FRAC_PI_4),
        GateName::Tdg => phase_gate(FRAC_PI_4).adjoint(),
        GateName::U1 => phase_gate(p[0]),
        GateName::U2 => {
            let h = FRAC_1_SQRT_2;
            Unitary2([
                [c(h, 0.0), -Complex64::from_polar(h, p[0])],
                [Complex64::from_polar(h, p[1]), Complex64::from_polar(h, p[0] + p[1])],
            ])
        }
        GateName::U3 => u3_matrix(p[0], p[1], p[2]),
        GateName::Cx => return GateMatrix::Two(cnot_matrix()),
    };
    GateMatrix::Single(single)
}

/// The catalogue spec whose matrix is the conjugate transpose of `spec`'s.
///
/// `u2` and `u3` map to `u3(-θ, -Φ, -φ)` (with `θ = π/2` for `u2`).
pub fn adjoint_of(spec: &GateSpec) -> GateSpec {
    use GateName::*;
    let p = &spec.params;
    match spec.name {
        Id | X | Y | Z | H | Cx => spec.clone(),
        S => GateSpec::fixed(Sdg),
        Sdg => GateSpec::fixed(S),
        T => GateSpec::fixed(Tdg),
        Tdg => GateSpec::fixed(T),
        U1 => GateSpec {
            name: U1,
            params: vec![-p[0]],
        },
        U2 => GateSpec {
            name: U3,
            params: vec![-FRAC_PI_2, -p[1], -p[0]],
        },
        U3 => GateSpec {
            name: U3,
            params: vec![-p[0], -p[2], -p[1]],
        },
    }
}
