//! Populations, yields, anisotropy and the extrema-matching rescale fit.

use serde::{Deserialize, Serialize};

use crate::qsim::ShotResult;
use crate::refsolver::PopulationTrace;
use crate::state::QuantumState;
use crate::{Error, Result};

/// `Tr[(|S⟩⟨S| ⊗ I) ρ]` with the electrons on sites 0 and 1.
pub fn singlet_population_from_state(state: &QuantumState) -> f64 {
    let block = state.dim() / 4;
    // |01,m⟩ and |10,m⟩ sit at block + m and 2·block + m.
    match state {
        QuantumState::Pure(v) => (0..block)
            .map(|m| {
                ((v[block + m] - v[2 * block + m]) * std::f64::consts::FRAC_1_SQRT_2).norm_sqr()
            })
            .sum(),
        QuantumState::Density(r) => (0..block)
            .map(|m| {
                let (a, b) = (block + m, 2 * block + m);
                0.5 * (r[(a, a)] + r[(b, b)] - r[(a, b)] - r[(b, a)]).re
            })
            .sum(),
    }
}

/// Fraction of shots that read `11`.
pub fn singlet_population_from_counts(result: &ShotResult) -> Result<f64> {
    if result.shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    Ok(result.count("11") as f64 / result.shots as f64)
}

fn same_grid(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0))
}

/// Pointwise mean of the `|↑⟩` and `|↓⟩` nuclear-configuration traces.
pub fn nuclear_average(up: &PopulationTrace, down: &PopulationTrace) -> Result<PopulationTrace> {
    if !same_grid(&up.times, &down.times) || up.decayed != down.decayed {
        return Err(Error::GridMismatch);
    }
    let pops = up
        .singlet_population
        .iter()
        .zip(&down.singlet_population)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    Ok(PopulationTrace::new(up.times.clone(), pops, up.decayed))
}

/// `Φ_S = k ∫₀^{t_max} Tr[P_S ρ(t)] dt` by the trapezoidal rule on a decayed trace.
pub fn singlet_yield(trace: &PopulationTrace, k: f64) -> Result<f64> {
    if !trace.decayed {
        return Err(Error::NotDecayed);
    }
    if trace.len() < 2 {
        return Ok(0.0);
    }
    let integral: f64 = trace
        .times
        .windows(2)
        .zip(trace.singlet_population.windows(2))
        .map(|(t, p)| 0.5 * (t[1] - t[0]) * (p[0] + p[1]))
        .sum();
    Ok(k * integral)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct YieldMetadata {
    pub mode: String,
    pub trotter_steps: Option<usize>,
    pub noise: Option<crate::qsim::NoiseProfile>,
    pub t_max: f64,
    pub dt: f64,
    pub shots: u64,
}

/// Singlet yield per field polar angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YieldCurve {
    pub thetas: Vec<f64>,
    pub yields: Vec<f64>,
    pub metadata: YieldMetadata,
}

impl YieldCurve {
    pub fn new(thetas: Vec<f64>, yields: Vec<f64>, metadata: YieldMetadata) -> Result<Self> {
        if thetas.len() != yields.len() {
            return Err(Error::GridMismatch);
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "thetas must be strictly increasing".into(),
            ));
        }
        if thetas
            .iter()
            .any(|t| !(0.0..=std::f64::consts::PI + 1e-12).contains(t))
        {
            return Err(Error::InvalidParameter("thetas must lie in [0, π]".into()));
        }
        if yields.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidParameter("yields must be finite".into()));
        }
        Ok(Self {
            thetas,
            yields,
            metadata,
        })
    }

    pub fn max(&self) -> f64 {
        self.yields
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.yields.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmax(&self) -> usize {
        argext(&self.yields, |a, b| a > b)
    }

    pub fn argmin(&self) -> usize {
        argext(&self.yields, |a, b| a < b)
    }
}

fn argext(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

/// `Δ_S = max Φ_S − min Φ_S` over the curve; 0 for fewer than two points.
pub fn anisotropy(curve: &YieldCurve) -> f64 {
    if curve.yields.len() < 2 {
        return 0.0;
    }
    curve.max() - curve.min()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleFit {
    pub scale: f64,
    pub offset: f64,
}

impl RescaleFit {
    pub fn apply(&self, y: f64) -> f64 {
        self.scale * y + self.offset
    }
}

/// Affine map `y ↦ a y + b` sending the noisy curve's extrema onto the
/// reference curve's extrema.
pub fn rescale_fit(noisy: &YieldCurve, reference: &YieldCurve) -> Result<(YieldCurve, RescaleFit)> {
    if !same_grid(&noisy.thetas, &reference.thetas) {
        return Err(Error::GridMismatch);
    }
    let (lo, hi) = (noisy.min(), noisy.max());
    if hi <= lo || hi.is_nan() || lo.is_nan() {
        return Err(Error::FlatCurve);
    }
    let (rlo, rhi) = (reference.min(), reference.max());
    let scale = (rhi - rlo) / (hi - lo);
    let offset = rlo - scale * lo;
    let fit = RescaleFit { scale, offset };
    let mut yields: Vec<f64> = noisy.yields.iter().map(|&y| fit.apply(y)).collect();
    // land the extrema exactly
    yields[noisy.argmin()] = rlo;
    yields[noisy.argmax()] = rhi;
    let curve = YieldCurve {
        thetas: noisy.thetas.clone(),
        yields,
        metadata: noisy.metadata.clone(),
    };
    Ok((curve, fit))
}

/// Pearson correlation coefficient; `None` if either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
