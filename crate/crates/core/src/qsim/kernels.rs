//! In-place gate kernels on flat amplitude arrays.
//!
//! A register of `n` qubits stores amplitude `|b_0 … b_{n−1}⟩` at index
//! `Σ b_q 2^(n−1−q)`. Density matrices reuse these kernels on a doubled
//! register (row bits first, column bits second).

use std::f64::consts::FRAC_1_SQRT_2;

use crate::circuit::Gate;
use crate::spinham::Pauli;
use crate::C64;

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

pub fn gate_matrix(g: &Gate) -> Option<Mat2> {
    let m = match *g {
        Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
        Gate::H(_) => {
            let h = C64::new(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        Gate::Rx(_, a) => {
            let (s, c) = (a / 2.0).sin_cos();
            [
                [C64::new(c, 0.0), C64::new(0.0, -s)],
                [C64::new(0.0, -s), C64::new(c, 0.0)],
            ]
        }
        Gate::Ry(_, a) => {
            let (s, c) = (a / 2.0).sin_cos();
            [
                [C64::new(c, 0.0), C64::new(-s, 0.0)],
                [C64::new(s, 0.0), C64::new(c, 0.0)],
            ]
        }
        Gate::Rz(_, a) => [
            [C64::from_polar(1.0, -a / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, a / 2.0)],
        ],
        Gate::Cnot { .. } | Gate::PauliRot2 { .. } => return None,
    };
    Some(m)
}

pub fn conj2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[0][1].conj()],
        [m[1][0].conj(), m[1][1].conj()],
    ]
}

pub fn apply_1q(amps: &mut [C64], n: usize, q: usize, m: &Mat2) {
    let stride = bit(n, q);
    // Diagonal fast path covers RZ.
    if m[0][1] == ZERO && m[1][0] == ZERO {
        let (d0, d1) = (m[0][0], m[1][1]);
        for (i, a) in amps.iter_mut().enumerate() {
            *a *= if i & stride == 0 { d0 } else { d1 };
        }
        return;
    }
    let mut base = 0;
    while base < amps.len() {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

pub fn apply_cnot(amps: &mut [C64], n: usize, control: usize, target: usize) {
    let cb = bit(n, control);
    let tb = bit(n, target);
    for i in 0..amps.len() {
        if i & cb != 0 && i & tb == 0 {
            amps.swap(i, i | tb);
        }
    }
}

/// `amps ← c·amps + s·(σ_a ⊗ σ_b)·amps`, with `σ_Y` replaced by `−σ_Y` when
/// `conj_paulis` is set (used for the column side of `ρ U†`).
#[allow(clippy::too_many_arguments)]
pub fn apply_pauli_combo(
    amps: &mut [C64],
    n: usize,
    qubits: [usize; 2],
    paulis: [Pauli; 2],
    c: C64,
    s: C64,
    conj_paulis: bool,
) {
    let mut flip = 0usize;
    for (&q, &p) in qubits.iter().zip(&paulis) {
        if matches!(p, Pauli::X | Pauli::Y) {
            flip |= bit(n, q);
        }
    }
    // Phase of (σ_a ⊗ σ_b)|i⟩ = phase(i) |i ^ flip⟩.
    let phase = |i: usize| -> C64 {
        let mut ph = ONE;
        for (&q, &p) in qubits.iter().zip(&paulis) {
            let b = i & bit(n, q) != 0;
            ph *= match p {
                Pauli::I | Pauli::X => ONE,
                Pauli::Z => {
                    if b {
                        -ONE
                    } else {
                        ONE
                    }
                }
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                Pauli::Y => {
                    let y = if b {
                        C64::new(0.0, -1.0)
                    } else {
                        C64::new(0.0, 1.0)
                    };
                    if conj_paulis {
                        -y
                    } else {
                        y
                    }
                }
            };
        }
        ph
    };
    if flip == 0 {
        for (i, a) in amps.iter_mut().enumerate() {
            *a = c * *a + s * phase(i) * *a;
        }
        return;
    }
    for i in 0..amps.len() {
        let j = i ^ flip;
        if i < j {
            let (ai, aj) = (amps[i], amps[j]);
            // (P ψ)_j = phase(i) ψ_i, (P ψ)_i = phase(j) ψ_j
            amps[i] = c * ai + s * phase(j) * aj;
            amps[j] = c * aj + s * phase(i) * ai;
        }
    }
}

/// Apply `gate` to a pure-state register.
pub fn apply_gate(amps: &mut [C64], n: usize, gate: &Gate) {
    match *gate {
        Gate::Cnot { control, target } => apply_cnot(amps, n, control, target),
        Gate::PauliRot2 {
            qubits,
            paulis,
            angle,
        } => {
            let (s, c) = (angle / 2.0).sin_cos();
            apply_pauli_combo(
                amps,
                n,
                qubits,
                paulis,
                C64::new(c, 0.0),
                C64::new(0.0, -s),
                false,
            )
        }
        ref g => {
            let q = g.qubits()[0];
            apply_1q(amps, n, q, &gate_matrix(g).expect("single-qubit gate"));
        }
    }
}

/// Apply `ρ ← U ρ U†` to a row-major density matrix of `n` qubits.
pub fn apply_gate_density(rho: &mut [C64], n: usize, gate: &Gate) {
    let reg = 2 * n;
    match *gate {
        Gate::Cnot { control, target } => {
            apply_cnot(rho, reg, control, target);
            apply_cnot(rho, reg, n + control, n + target);
        }
        Gate::PauliRot2 {
            qubits,
            paulis,
            angle,
        } => {
            let (s, c) = (angle / 2.0).sin_cos();
            let c = C64::new(c, 0.0);
            apply_pauli_combo(rho, reg, qubits, paulis, c, C64::new(0.0, -s), false);
            apply_pauli_combo(
                rho,
                reg,
                [n + qubits[0], n + qubits[1]],
                paulis,
                c,
                C64::new(0.0, s),
                true,
            );
        }
        ref g => {
            let q = g.qubits()[0];
            let m = gate_matrix(g).expect("single-qubit gate");
            apply_1q(rho, reg, q, &m);
            apply_1q(rho, reg, n + q, &conj2(&m));
        }
    }
}

/// `ρ ← (1−p) ρ + p · (I/2 ⊗ Tr_q ρ)` on a row-major density matrix.
pub fn depolarize_density(rho: &mut [C64], n: usize, q: usize, p: f64) {
    if p == 0.0 {
        return;
    }
    let reg = 2 * n;
    let rb = bit(reg, q);
    let cb = bit(reg, n + q);
    let keep = 1.0 - p;
    for i in 0..rho.len() {
        if i & rb != 0 || i & cb != 0 {
            continue;
        }
        let i11 = i | rb | cb;
        let avg = (rho[i] + rho[i11]) * 0.5;
        rho[i] = rho[i] * keep + avg * p;
        rho[i11] = rho[i11] * keep + avg * p;
        rho[i | rb] *= keep;
        rho[i | cb] *= keep;
    }
}

/// Two-qubit depolarizing channel `(1−p) ρ + p · (I/4 ⊗ Tr_ab ρ)`.
pub fn depolarize2_density(
    rho: &mut [C64],
    n: usize,
    qa: usize,
    qb: usize,
    p: f64,
    scratch: &mut Vec<C64>,
) {
    if p == 0.0 {
        return;
    }
    scratch.clear();
    scratch.extend_from_slice(rho);
    depolarize_density(scratch, n, qa, 1.0);
    depolarize_density(scratch, n, qb, 1.0);
    for (r, s) in rho.iter_mut().zip(scratch.iter()) {
        *r = *r * (1.0 - p) + *s * p;
    }
}
