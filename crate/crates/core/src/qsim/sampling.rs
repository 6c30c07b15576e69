use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{electron_outcome_probabilities, NoiseProfile};
use crate::state::QuantumState;
use crate::{Error, Result};

/// Name recorded in output metadata so runs can be reproduced elsewhere.
pub const PRNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.3, seed_from_u64, per-point stream)";

pub const OUTCOMES: [&str; 4] = ["00", "01", "10", "11"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotResult {
    /// Electron-qubit bitstring (qubit 0 first) → count. All four keys present.
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotResult {
    pub fn from_counts(counts: [u64; 4], seed: u64) -> Self {
        Self {
            counts: OUTCOMES
                .iter()
                .zip(counts)
                .map(|(k, c)| (k.to_string(), c))
                .collect(),
            shots: counts.iter().sum(),
            seed,
        }
    }

    pub fn count(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }
}

/// Seeded generator for stream `stream` of `seed`; independent of thread
/// scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw `shots` outcomes from a 4-outcome distribution, then flip each read
/// bit independently with the profile's readout probabilities.
pub fn sample_outcomes<R: Rng>(
    probs: [f64; 4],
    shots: u64,
    rng: &mut R,
    noise: &NoiseProfile,
) -> [u64; 4] {
    let (f01, f10) = noise.readout();
    let total: f64 = probs.iter().sum();
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = 3;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                outcome = k;
                break;
            }
        }
        if f01 > 0.0 || f10 > 0.0 {
            for b in [2usize, 1] {
                let set = outcome & b != 0;
                let flip = if set { f10 } else { f01 };
                if rng.gen::<f64>() < flip {
                    outcome ^= b;
                }
            }
        }
        counts[outcome] += 1;
    }
    counts
}

/// Born-rule sampling of the electron qubits of `state`.
pub fn sample_measurements(
    state: &QuantumState,
    shots: u64,
    seed: u64,
    noise: &NoiseProfile,
) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    noise.validate()?;
    let probs = electron_outcome_probabilities(state);
    let mut rng = stream_rng(seed, 0);
    Ok(ShotResult::from_counts(
        sample_outcomes(probs, shots, &mut rng, noise),
        seed,
    ))
}
