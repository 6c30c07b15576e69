use nalgebra::DMatrix;

use super::kernels::{apply_gate_density, depolarize2_density, depolarize_density};
use super::NoiseProfile;
use crate::circuit::{Circuit, Gate};
use crate::state::QuantumState;
use crate::{Error, Result, C64};

/// Dense density-matrix simulator with per-gate depolarizing noise. Owns its
/// buffers so repeated runs do not reallocate.
#[derive(Clone, Debug)]
pub struct DensitySimulator {
    n_qubits: usize,
    noise: NoiseProfile,
    rho: Vec<C64>,
    scratch: Vec<C64>,
}

impl DensitySimulator {
    pub fn new(n_qubits: usize, noise: NoiseProfile) -> Result<Self> {
        noise.validate()?;
        let d = 1 << n_qubits;
        Ok(Self {
            n_qubits,
            noise,
            rho: vec![C64::new(0.0, 0.0); d * d],
            scratch: Vec::with_capacity(d * d),
        })
    }

    pub fn load(&mut self, state: &QuantumState) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                circuit: self.n_qubits,
                state: state.n_qubits(),
            });
        }
        let m = state.to_density_matrix();
        let d = m.nrows();
        for r in 0..d {
            for c in 0..d {
                self.rho[r * d + c] = m[(r, c)];
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) {
        let n = self.n_qubits;
        apply_gate_density(&mut self.rho, n, gate);
        let qs = gate.qubits();
        if gate.is_two_qubit() {
            depolarize2_density(
                &mut self.rho,
                n,
                qs[0],
                qs[1],
                self.noise.p2(),
                &mut self.scratch,
            );
        } else {
            depolarize_density(&mut self.rho, n, qs[0], self.noise.p1());
        }
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                circuit: circuit.n_qubits(),
                state: self.n_qubits,
            });
        }
        for g in circuit.gates() {
            self.apply(g);
        }
        Ok(())
    }

    /// Diagonal of ρ.
    pub fn probabilities(&self) -> Vec<f64> {
        let d = 1 << self.n_qubits;
        (0..d).map(|i| self.rho[i * d + i].re).collect()
    }

    pub fn state(&self) -> QuantumState {
        let d = 1 << self.n_qubits;
        QuantumState::Density(DMatrix::from_row_slice(d, d, &self.rho))
    }
}

/// Run `circuit` on `initial` (pure or density) under `noise`.
pub fn run_density(
    circuit: &Circuit,
    initial: &QuantumState,
    noise: &NoiseProfile,
) -> Result<QuantumState> {
    let mut sim = DensitySimulator::new(circuit.n_qubits(), *noise)?;
    sim.load(initial)?;
    sim.run(circuit)?;
    Ok(sim.state())
}
