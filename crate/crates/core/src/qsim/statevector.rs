use nalgebra::{DMatrix, DVector};

use super::kernels::apply_gate;
use crate::circuit::{Circuit, Gate};
use crate::state::QuantumState;
use crate::{Error, Result, C64};

#[derive(Clone, Debug)]
pub struct StatevectorRun {
    pub final_state: QuantumState,
    /// State after each Trotter step, when requested.
    pub step_states: Vec<QuantumState>,
}

fn expect_pure(circuit: &Circuit, initial: &QuantumState) -> Result<Vec<C64>> {
    let QuantumState::Pure(v) = initial else {
        return Err(Error::InvalidParameter(
            "statevector simulation needs a pure state".into(),
        ));
    };
    if initial.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            circuit: circuit.n_qubits(),
            state: initial.n_qubits(),
        });
    }
    Ok(v.as_slice().to_vec())
}

/// Apply every gate in order to a copy of `initial`.
pub fn run_statevector(
    circuit: &Circuit,
    initial: &QuantumState,
    record_after_each_step: bool,
) -> Result<StatevectorRun> {
    let n = circuit.n_qubits();
    let mut amps = expect_pure(circuit, initial)?;
    let mut step_states = Vec::new();
    for g in circuit.prep() {
        apply_gate(&mut amps, n, g);
    }
    let step = circuit.step();
    for _ in 0..circuit.trotter_steps() {
        for g in step {
            apply_gate(&mut amps, n, g);
        }
        if record_after_each_step {
            step_states.push(QuantumState::Pure(DVector::from_vec(amps.clone())));
        }
    }
    for g in circuit.basis_change() {
        apply_gate(&mut amps, n, g);
    }
    Ok(StatevectorRun {
        final_state: QuantumState::Pure(DVector::from_vec(amps)),
        step_states,
    })
}

/// Dense unitary of a gate sequence, built column by column with the same
/// kernels the simulator uses.
pub fn circuit_unitary(gates: &[Gate], n_qubits: usize) -> DMatrix<C64> {
    let d = 1 << n_qubits;
    let mut u = DMatrix::<C64>::zeros(d, d);
    let mut col = vec![C64::new(0.0, 0.0); d];
    for j in 0..d {
        col.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        col[j] = C64::new(1.0, 0.0);
        for g in gates {
            apply_gate(&mut col, n_qubits, g);
        }
        u.column_mut(j).copy_from_slice(&col);
    }
    u
}

fn matrix_power(base: &DMatrix<C64>, mut exp: usize) -> DMatrix<C64> {
    let d = base.nrows();
    let mut result = DMatrix::<C64>::identity(d, d);
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = &result * &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    result
}

/// Same result as [`run_statevector`] (to rounding), computed by fusing one
/// Trotter step into a dense unitary and raising it to the `n`-th power by
/// repeated squaring. Cost is `O(d³ log n)` instead of `O(n · gates · d)`.
pub fn run_statevector_fused(circuit: &Circuit, initial: &QuantumState) -> Result<QuantumState> {
    let n = circuit.n_qubits();
    let mut amps = expect_pure(circuit, initial)?;
    for g in circuit.prep() {
        apply_gate(&mut amps, n, g);
    }
    if circuit.trotter_steps() > 0 {
        let step = circuit_unitary(circuit.step(), n);
        let total = matrix_power(&step, circuit.trotter_steps());
        amps = (total * DVector::from_vec(amps)).as_slice().to_vec();
    }
    for g in circuit.basis_change() {
        apply_gate(&mut amps, n, g);
    }
    Ok(QuantumState::Pure(DVector::from_vec(amps)))
}
