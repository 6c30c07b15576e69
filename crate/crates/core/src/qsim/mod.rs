//! Circuit execution: noiseless statevector, noisy density matrix, shot
//! sampling.

pub mod density;
pub mod kernels;
pub mod sampling;
pub mod statevector;

use serde::{Deserialize, Serialize};

use crate::state::QuantumState;
use crate::{Error, Result};

pub use density::{run_density, DensitySimulator};
pub use sampling::{sample_measurements, sample_outcomes, ShotResult, PRNG_ALGORITHM};
pub use statevector::{circuit_unitary, run_statevector, run_statevector_fused, StatevectorRun};

/// Parametric gate-noise surrogate: depolarizing after every gate plus
/// independent readout bit flips.
///
/// The default knobs (`3e-4`, `8e-3`, `2e-2`) are device-like calibration
/// values for qualitative studies; the profile starts disabled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseProfile {
    pub enabled: bool,
    pub p_depol_1q: f64,
    pub p_depol_2q: f64,
    pub readout_flip_0to1: f64,
    pub readout_flip_1to0: f64,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        Self {
            enabled: false,
            p_depol_1q: 3e-4,
            p_depol_2q: 8e-3,
            readout_flip_0to1: 2e-2,
            readout_flip_1to0: 2e-2,
        }
    }
}

impl NoiseProfile {
    pub fn noiseless() -> Self {
        Self::default()
    }

    /// Default knobs, enabled.
    pub fn device_like() -> Self {
        Self {
            enabled: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("noise.p_depol_1q", self.p_depol_1q),
            ("noise.p_depol_2q", self.p_depol_2q),
            ("noise.readout_flip_0to1", self.readout_flip_0to1),
            ("noise.readout_flip_1to0", self.readout_flip_1to0),
        ];
        for (name, p) in fields {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn p1(&self) -> f64 {
        if self.enabled {
            self.p_depol_1q
        } else {
            0.0
        }
    }

    pub fn p2(&self) -> f64 {
        if self.enabled {
            self.p_depol_2q
        } else {
            0.0
        }
    }

    /// `(P(read 1 | 0), P(read 0 | 1))`, zero when disabled.
    pub fn readout(&self) -> (f64, f64) {
        if self.enabled {
            (self.readout_flip_0to1, self.readout_flip_1to0)
        } else {
            (0.0, 0.0)
        }
    }
}

/// Outcome probabilities of the two electron qubits, indexed `00, 01, 10, 11`
/// (qubit 0 is the high bit).
pub fn electron_outcome_probabilities(state: &QuantumState) -> [f64; 4] {
    let probs = state.probabilities();
    let n = state.n_qubits();
    let shift = n - 2;
    let mut out = [0.0; 4];
    for (i, p) in probs.iter().enumerate() {
        out[i >> shift] += p;
    }
    out
}

/// Push an outcome distribution through independent per-qubit readout flips.
pub fn apply_readout_error(probs: [f64; 4], noise: &NoiseProfile) -> [f64; 4] {
    let (f01, f10) = noise.readout();
    if f01 == 0.0 && f10 == 0.0 {
        return probs;
    }
    // P(read r | true b) for one bit
    let m = |r: usize, b: usize| match (b, r) {
        (0, 0) => 1.0 - f01,
        (0, _) => f01,
        (_, 0) => f10,
        _ => 1.0 - f10,
    };
    let mut out = [0.0; 4];
    for (r, o) in out.iter_mut().enumerate() {
        for (b, p) in probs.iter().enumerate() {
            *o += p * m(r >> 1, b >> 1) * m(r & 1, b & 1);
        }
    }
    out
}
