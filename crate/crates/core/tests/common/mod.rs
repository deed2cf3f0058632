#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use qxsim_core::gates::GateMatrix;
use qxsim_core::{Circuit, GateName, GateOp, GateSpec, StateVector};

/// Bell program as typed into the composer editor: header and include on
/// line 1, registers on lines 2-3, line 4 empty, gates on 5-6, reads on 7-8.
pub const BELL_QASM_COMPOSER: &str = "OPENQASM 2.0;include \"qelib1.inc\";
qreg q[5];
creg c[5];

h q[1];
cx q[1],q[0];
measure q[0] -> c[0];
measure q[1] -> c[1];
";

pub const BELL_QASM: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[5];
creg c[5];
h q[1];
cx q[1],q[0];
measure q[0] -> c[0];
measure q[1] -> c[1];
";

pub fn bell_circuit() -> Circuit {
    let mut c = Circuit::new(5, 5).unwrap();
    c.h(1).unwrap().cx(1, 0).unwrap().measure(0, 0).unwrap().measure(1, 1).unwrap();
    c
}

// ---- full-matrix oracle ----

pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn eye(d: usize) -> Mat {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn matvec(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `ops[q]` acts on qubit q; rows ordered q[n-1] ⊗ … ⊗ q[0].
pub fn tensor(ops: &[Mat]) -> Mat {
    ops.iter().rev().fold(vec![vec![c(1.0, 0.0)]], |acc, m| kron(&acc, m))
}

pub fn embed_1q(u: &Mat, target: usize, n: usize) -> Mat {
    let ops: Vec<Mat> = (0..n).map(|q| if q == target { u.clone() } else { eye(2) }).collect();
    tensor(&ops)
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t`
pub fn embed_cx(control: usize, target: usize, n: usize) -> Mat {
    let p0 = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
    let p1 = vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let x = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    let idle: Vec<Mat> = (0..n).map(|q| if q == control { p0.clone() } else { eye(2) }).collect();
    let flip: Vec<Mat> = (0..n)
        .map(|q| {
            if q == control {
                p1.clone()
            } else if q == target {
                x.clone()
            } else {
                eye(2)
            }
        })
        .collect();
    add(&tensor(&idle), &tensor(&flip))
}

pub fn mat2(spec: &GateSpec) -> Mat {
    match spec.matrix() {
        GateMatrix::Single(u) => u.0.iter().map(|r| r.to_vec()).collect(),
        GateMatrix::Two(_) => panic!("not a single-qubit gate"),
    }
}

pub fn op_matrix(op: &GateOp, n: usize) -> Mat {
    match op.qubits() {
        [q] => embed_1q(&mat2(op.spec()), *q, n),
        [ctl, tgt] => embed_cx(*ctl, *tgt, n),
        _ => unreachable!(),
    }
}

/// Evolves `|0…0⟩` by explicit 2^n × 2^n matrices.
pub fn oracle_statevector(circuit: &Circuit) -> Vec<C> {
    let n = circuit.n_qubits();
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    for op in circuit.ops() {
        v = matvec(&op_matrix(op, n), &v);
    }
    v
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

// ---- random circuits ----

fn angle() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => -TAU..TAU,
        1 => (-8i32..=8, 1u32..=8).prop_map(|(k, m)| k as f64 * PI / m as f64),
    ]
}

fn op_seed() -> impl Strategy<Value = (usize, [f64; 3], usize, usize)> {
    (0..GateName::ALL.len(), [angle(), angle(), angle()], 0usize..16, 0usize..16)
}

fn build_op(seed: (usize, [f64; 3], usize, usize), n: usize) -> GateOp {
    let (g, angles, a, b) = seed;
    let mut name = GateName::ALL[g];
    if name == GateName::Cx && n < 2 {
        name = GateName::H;
    }
    let params = angles[..name.param_count()].to_vec();
    let spec = GateSpec::new(name, params).unwrap();
    let q0 = a % n;
    let qubits = if name == GateName::Cx {
        vec![q0, (q0 + 1 + b % (n - 1)) % n]
    } else {
        vec![q0]
    };
    GateOp::new(spec, qubits).unwrap()
}

/// Gate-only circuits on `1..=max_qubits` qubits with up to `max_ops` ops.
pub fn gate_circuit(max_qubits: usize, max_ops: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_qubits, prop::collection::vec(op_seed(), 0..=max_ops)).prop_map(|(n, seeds)| {
        let mut circuit = Circuit::new(n, 0).unwrap();
        for s in seeds {
            circuit.append(build_op(s, n)).unwrap();
        }
        circuit
    })
}

/// Gates followed by terminal measurements into distinct clbits.
pub fn measured_circuit(max_qubits: usize, max_ops: usize) -> impl Strategy<Value = Circuit> {
    (
        gate_circuit(max_qubits, max_ops),
        0usize..=8,
        prop::collection::vec((0usize..16, 0usize..16), 0..=5),
    )
        .prop_map(|(gates, extra_clbits, reads)| {
            let n = gates.n_qubits();
            let n_clbits = n + extra_clbits;
            let mut circuit = Circuit::new(n, n_clbits).unwrap();
            for op in gates.ops() {
                circuit.append(op.clone()).unwrap();
            }
            let mut used = vec![false; n_clbits];
            let mut measured = vec![false; n];
            for (q, cb) in reads {
                let (q, cb) = (q % n, cb % n_clbits);
                if !used[cb] && !measured[q] {
                    used[cb] = true;
                    measured[q] = true;
                    circuit.measure(q, cb).unwrap();
                }
            }
            circuit
        })
}

/// Deterministic sample of `count` values from a strategy.
pub fn corpus<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}

// ---- noisy Bell oracle ----

fn pauli(k: usize) -> Mat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match k {
        0 => eye(2),
        1 => vec![vec![z, o], vec![o, z]],
        2 => vec![vec![z, c(0.0, -1.0)], vec![c(0.0, 1.0), z]],
        3 => vec![vec![o, z], vec![z, -o]],
        _ => unreachable!(),
    }
}

fn pauli_weights(p: f64) -> [f64; 4] {
    [1.0 - p, p / 3.0, p / 3.0, p / 3.0]
}

/// Distribution over the two measured bits `(c1 c0)` of `h q[1]; cx q[1],q[0]`
/// when each gate is followed by a uniformly random Pauli on each of its
/// qubits with probability `p_h` / `p_cx`, and each read bit flips with
/// probability `r`. Enumerates all 64 insertion patterns and 4 flip patterns.
pub fn noisy_bell_distribution(p_h: f64, p_cx: f64, r: f64) -> BTreeMap<String, f64> {
    let h = {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]
    };
    let mut ideal = [0.0; 4];
    for (a, wa) in pauli_weights(p_h).into_iter().enumerate() {
        for (b, wb) in pauli_weights(p_cx).into_iter().enumerate() {
            for (t, wt) in pauli_weights(p_cx).into_iter().enumerate() {
                let mut v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
                v = matvec(&embed_1q(&h, 1, 2), &v);
                v = matvec(&embed_1q(&pauli(a), 1, 2), &v);
                v = matvec(&embed_cx(1, 0, 2), &v);
                v = matvec(&tensor(&[pauli(t), pauli(b)]), &v);
                for k in 0..4 {
                    ideal[k] += wa * wb * wt * v[k].norm_sqr();
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (k, p) in ideal.into_iter().enumerate() {
        for flips in 0..4usize {
            let w: f64 = (0..2)
                .map(|bit| if flips >> bit & 1 == 1 { r } else { 1.0 - r })
                .product();
            let key = format!("000{:02b}", k ^ flips);
            *out.entry(key).or_insert(0.0) += p * w;
        }
    }
    out
}

pub fn state_from(amps: &[C]) -> StateVector {
    StateVector::from_amplitudes(amps.to_vec()).unwrap()
}
