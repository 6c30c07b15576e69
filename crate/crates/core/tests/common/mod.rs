#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rpdqs_core::circuit::{Circuit, Gate};
use rpdqs_core::spinham::Pauli;
use rpdqs_core::C64;

const LETTERS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

pub fn random_gate<R: Rng>(rng: &mut R, n: usize) -> Gate {
    let q = rng.gen_range(0..n);
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let other = |rng: &mut R| loop {
        let r = rng.gen_range(0..n);
        if r != q {
            break r;
        }
    };
    match rng.gen_range(0..7) {
        0 => Gate::X(q),
        1 => Gate::H(q),
        2 => Gate::Rx(q, angle),
        3 => Gate::Ry(q, angle),
        4 => Gate::Rz(q, angle),
        5 => Gate::Cnot {
            control: q,
            target: other(rng),
        },
        _ => Gate::PauliRot2 {
            qubits: [q, other(rng)],
            paulis: [LETTERS[rng.gen_range(0..3)], LETTERS[rng.gen_range(0..3)]],
            angle,
        },
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, max_depth: usize) -> Circuit {
    let depth = rng.gen_range(0..=max_depth);
    Circuit::from_gates(n, (0..depth).map(|_| random_gate(rng, n)).collect()).unwrap()
}

pub fn random_pure<R: Rng>(rng: &mut R, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(1 << n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random full-rank density matrix `A A† / Tr(A A†)`.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let d = 1 << n;
    let a = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn min_eigenvalue(rho: &DMatrix<C64>) -> f64 {
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().min()
}
