//! Sweep driver shared by the command-line harness and the browser demo.
//!
//! Every sweep point is computed independently and results are returned in
//! input order; with the `parallel` feature the points are spread over the
//! current rayon pool.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::circuit::{compile, lower_to_basis, ZeroAnglePolicy};
use crate::observables::{anisotropy, singlet_yield, YieldCurve, YieldMetadata};
use crate::qsim::sampling::{sample_outcomes, stream_rng};
use crate::qsim::{
    apply_readout_error, electron_outcome_probabilities, run_statevector_fused, DensitySimulator,
    NoiseProfile,
};
use crate::refsolver::{apply_decay, evolve_exact, PopulationTrace, TimeGrid};
use crate::spinham::{hamiltonian_matrix, RadicalPairSystem};
use crate::state::{circuit_input_state, initial_state, NuclearConfig, StateKind};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact eigendecomposition solver.
    #[default]
    Reference,
    /// Noiseless Trotter circuit, pure states.
    Statevector,
    /// Trotter circuit on density matrices with the noise profile.
    Density,
}

/// How the initial nuclear state is represented.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuclearSampling {
    /// Run `|↑⟩` and `|↓⟩` separately and average.
    #[default]
    Average,
    Up,
    Down,
    /// One run from the maximally mixed nuclear state (density or reference).
    Mixed,
}

/// Integration window for yields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// Integrate to `t_max` only.
    #[default]
    None,
    /// Extend the window until `e^{-kt} < 1e-6`.
    Extend,
}

/// Polar-angle grid: `count` uniform points over `[start, end]` inclusive, or
/// explicit `values` when given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThetaGrid {
    pub count: usize,
    pub start: f64,
    pub end: f64,
    pub values: Option<Vec<f64>>,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self {
            count: 128,
            start: 0.0,
            end: PI,
            values: None,
        }
    }
}

impl ThetaGrid {
    pub fn uniform(count: usize) -> Self {
        Self {
            count,
            ..Self::default()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.end - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: RadicalPairSystem,
    pub mode: Mode,
    pub nuclear: NuclearSampling,
    pub trotter_steps: usize,
    /// µs
    pub t_max: f64,
    /// µs
    pub dt: f64,
    /// Polar angle for single-angle commands (rad).
    pub theta: f64,
    pub theta_grid: ThetaGrid,
    /// 0 means exact expectation values.
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseProfile,
    pub lowering: ZeroAnglePolicy,
    pub tail: Tail,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: RadicalPairSystem::prototype(),
            mode: Mode::Reference,
            nuclear: NuclearSampling::Average,
            trotter_steps: 15,
            t_max: 1.0,
            dt: 0.001,
            theta: FRAC_PI_2,
            theta_grid: ThetaGrid::default(),
            shots: 0,
            seed: 0,
            noise: NoiseProfile::default(),
            lowering: ZeroAnglePolicy::PruneSingleQubit,
            tail: Tail::None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.noise.validate()?;
        if self.system.symmetric_rate().is_none() {
            return Err(Error::Unsupported(
                "system.k_singlet != system.k_triplet (asymmetric recombination)".into(),
            ));
        }
        TimeGrid::new(self.t_max, self.dt).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::InvalidParameter(format!("t_max/dt: {m}")),
            other => other,
        })?;
        if self.trotter_steps == 0 {
            return Err(Error::InvalidParameter("trotter_steps must be >= 1".into()));
        }
        let thetas = self.theta_grid.points();
        if thetas.is_empty() {
            return Err(Error::InvalidParameter(
                "theta_grid.count must be >= 1".into(),
            ));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0])
            || thetas.iter().any(|t| !(0.0..=PI + 1e-12).contains(t))
        {
            return Err(Error::InvalidParameter(
                "theta_grid must be strictly increasing within [0, π]".into(),
            ));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        if self.noise.enabled && self.mode != Mode::Density {
            return Err(Error::InvalidParameter(
                "mode: noise.enabled requires mode = \"density\"".into(),
            ));
        }
        if self.nuclear == NuclearSampling::Mixed && self.mode == Mode::Statevector {
            return Err(Error::InvalidParameter(
                "nuclear: \"mixed\" requires mode = \"density\" or \"reference\"".into(),
            ));
        }
        Ok(())
    }

    pub fn rate(&self) -> f64 {
        self.system.k_singlet
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_max, self.dt)
    }

    /// Grid used for yields, extended when `tail = extend`.
    pub fn yield_grid(&self) -> Result<TimeGrid> {
        let k = self.rate();
        let t_max = match self.tail {
            Tail::Extend if k > 0.0 => self.t_max.max(1e6f64.ln() / k),
            _ => self.t_max,
        };
        TimeGrid::new(t_max, self.dt)
    }

    fn configs(&self) -> Vec<NuclearConfig> {
        match self.nuclear {
            NuclearSampling::Average => vec![NuclearConfig::Up, NuclearConfig::Down],
            NuclearSampling::Up => vec![NuclearConfig::Up],
            NuclearSampling::Down => vec![NuclearConfig::Down],
            NuclearSampling::Mixed => vec![NuclearConfig::Mixed],
        }
    }

    fn metadata(&self, grid: &TimeGrid) -> YieldMetadata {
        YieldMetadata {
            mode: format!("{:?}", self.mode).to_lowercase(),
            trotter_steps: (self.mode != Mode::Reference).then_some(self.trotter_steps),
            noise: (self.mode == Mode::Density).then_some(self.noise),
            t_max: grid.t_max(),
            dt: grid.dt,
            shots: self.shots,
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync + Send) -> Vec<R> {
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Measured (or exact) probability of reading `11` at one grid point.
fn estimate_p11(probs: [f64; 4], cfg: &ExperimentConfig, stream: u64) -> f64 {
    let probs = apply_readout_error(
        probs,
        &if cfg.mode == Mode::Density {
            cfg.noise
        } else {
            NoiseProfile::noiseless()
        },
    );
    if cfg.shots == 0 {
        return probs[3];
    }
    // readout error is already folded into `probs`
    let mut rng = stream_rng(cfg.seed, stream);
    let counts = sample_outcomes(probs, cfg.shots, &mut rng, &NoiseProfile::noiseless());
    counts[3] as f64 / cfg.shots as f64
}

/// Undecayed singlet population at polar angle `theta` on `grid`.
///
/// `point` distinguishes sweep points so each gets its own PRNG streams.
pub fn population_trace_on(
    cfg: &ExperimentConfig,
    theta: f64,
    grid: &TimeGrid,
    point: u64,
) -> Result<PopulationTrace> {
    let system = cfg.system.clone().with_angles(theta, cfg.system.phi);
    let n_sites = system.n_sites();
    let configs = cfg.configs();
    let n_cfg = configs.len() as u64;
    let n_t = grid.len() as u64;
    let stream =
        |t_idx: usize, c_idx: usize| (point * n_t + t_idx as u64) * n_cfg.max(2) + c_idx as u64;

    let mut pops = vec![0.0; grid.len()];
    match cfg.mode {
        Mode::Reference => {
            let h = hamiltonian_matrix(&system);
            for (ci, &c) in configs.iter().enumerate() {
                let kind = if c == NuclearConfig::Mixed {
                    StateKind::Density
                } else {
                    StateKind::Pure
                };
                let s0 = initial_state(c, n_sites, kind)?;
                let tr = evolve_exact(&h, &s0, grid, system.hbar)?;
                for (i, p) in tr.singlet_population.iter().enumerate() {
                    let p = if cfg.shots == 0 {
                        *p
                    } else {
                        // singlet vs not-singlet as a two-outcome draw
                        estimate_p11([1.0 - p, 0.0, 0.0, *p], cfg, stream(i, ci))
                    };
                    pops[i] += p / n_cfg as f64;
                }
            }
        }
        Mode::Statevector => {
            for (ci, &c) in configs.iter().enumerate() {
                let input = circuit_input_state(c, n_sites, StateKind::Pure)?;
                for (i, pop) in pops.iter_mut().enumerate() {
                    let circuit = compile(&system, grid.time(i), cfg.trotter_steps)?;
                    let out = run_statevector_fused(&circuit, &input)?;
                    *pop += estimate_p11(electron_outcome_probabilities(&out), cfg, stream(i, ci))
                        / n_cfg as f64;
                }
            }
        }
        Mode::Density => {
            let mut sim = DensitySimulator::new(n_sites, cfg.noise)?;
            for (ci, &c) in configs.iter().enumerate() {
                let input = circuit_input_state(c, n_sites, StateKind::Density)?;
                for (i, pop) in pops.iter_mut().enumerate() {
                    let circuit = lower_to_basis(
                        &compile(&system, grid.time(i), cfg.trotter_steps)?,
                        cfg.lowering,
                    );
                    sim.load(&input)?;
                    sim.run(&circuit)?;
                    let probs = electron_outcome_probabilities(&sim.state());
                    *pop += estimate_p11(probs, cfg, stream(i, ci)) / n_cfg as f64;
                }
            }
        }
    }
    Ok(PopulationTrace::new(grid.times(), pops, false))
}

pub fn population_trace(cfg: &ExperimentConfig, theta: f64) -> Result<PopulationTrace> {
    population_trace_on(cfg, theta, &cfg.time_grid()?, 0)
}

/// Raw and `e^{-kt}`-weighted traces at `cfg.theta`.
pub fn population(cfg: &ExperimentConfig) -> Result<(PopulationTrace, PopulationTrace)> {
    cfg.validate()?;
    let raw = population_trace(cfg, cfg.theta)?;
    let decayed = apply_decay(&raw, cfg.rate())?;
    Ok((raw, decayed))
}

fn yield_on(cfg: &ExperimentConfig, theta: f64, grid: &TimeGrid, point: u64) -> Result<f64> {
    let raw = population_trace_on(cfg, theta, grid, point)?;
    singlet_yield(&apply_decay(&raw, cfg.rate())?, cfg.rate())
}

/// Singlet yield at a single angle.
pub fn yield_at(cfg: &ExperimentConfig, theta: f64) -> Result<f64> {
    cfg.validate()?;
    yield_on(cfg, theta, &cfg.yield_grid()?, 0)
}

/// Singlet yield over `cfg.theta_grid`.
pub fn yield_curve(cfg: &ExperimentConfig) -> Result<YieldCurve> {
    cfg.validate()?;
    let grid = cfg.yield_grid()?;
    let thetas = cfg.theta_grid.points();
    let yields = par_map(&thetas, |i, &th| yield_on(cfg, th, &grid, i as u64))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    YieldCurve::new(thetas, yields, cfg.metadata(&grid))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YieldSweep {
    pub curve: YieldCurve,
    pub anisotropy: f64,
}

pub fn yield_sweep(cfg: &ExperimentConfig) -> Result<YieldSweep> {
    let curve = yield_curve(cfg)?;
    let anisotropy = anisotropy(&curve);
    Ok(YieldSweep { curve, anisotropy })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterRow {
    pub n: usize,
    pub yield_noiseless: f64,
    pub yield_noisy: Option<f64>,
}

/// Yield at `cfg.theta` against Trotter order, noiseless and optionally under
/// `cfg.noise` (forced on).
pub fn trotter_sweep(
    cfg: &ExperimentConfig,
    n_list: &[usize],
    noisy: bool,
) -> Result<Vec<TrotterRow>> {
    let clean = ExperimentConfig {
        mode: Mode::Statevector,
        noise: NoiseProfile {
            enabled: false,
            ..cfg.noise
        },
        nuclear: if cfg.nuclear == NuclearSampling::Mixed {
            NuclearSampling::Average
        } else {
            cfg.nuclear
        },
        ..cfg.clone()
    };
    clean.validate()?;
    let dirty = ExperimentConfig {
        mode: Mode::Density,
        noise: NoiseProfile {
            enabled: true,
            ..cfg.noise
        },
        nuclear: NuclearSampling::Mixed,
        ..cfg.clone()
    };
    if noisy {
        dirty.validate()?;
    }
    let grid = cfg.yield_grid()?;
    par_map(n_list, |i, &n| {
        let clean = ExperimentConfig {
            trotter_steps: n,
            ..clean.clone()
        };
        let yield_noiseless = yield_on(&clean, cfg.theta, &grid, i as u64)?;
        let yield_noisy = if noisy {
            let dirty = ExperimentConfig {
                trotter_steps: n,
                ..dirty.clone()
            };
            Some(yield_on(&dirty, cfg.theta, &grid, i as u64)?)
        } else {
            None
        };
        Ok(TrotterRow {
            n,
            yield_noiseless,
            yield_noisy,
        })
    })
    .into_iter()
    .collect()
}

/// Yield at `cfg.theta` against the symmetric recombination rate (MHz).
pub fn rate_sweep(cfg: &ExperimentConfig, k_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    par_map(k_list, |i, &k| {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParameter(format!("rate {k} must be >= 0")));
        }
        let mut c = cfg.clone();
        c.system.k_singlet = k;
        c.system.k_triplet = k;
        let grid = c.yield_grid()?;
        Ok((k, yield_on(&c, cfg.theta, &grid, i as u64)?))
    })
    .into_iter()
    .collect()
}

/// RMS deviation of the sampled population trace from its exact expectation,
/// per shot count.
pub fn shot_sweep(cfg: &ExperimentConfig, shot_list: &[u64]) -> Result<Vec<(u64, f64)>> {
    cfg.validate()?;
    let grid = cfg.time_grid()?;
    let exact = population_trace_on(
        &ExperimentConfig {
            shots: 0,
            ..cfg.clone()
        },
        cfg.theta,
        &grid,
        0,
    )?;
    par_map(shot_list, |_, &shots| {
        if shots == 0 {
            return Err(Error::InvalidParameter("shot counts must be >= 1".into()));
        }
        let sampled = population_trace_on(
            &ExperimentConfig {
                shots,
                ..cfg.clone()
            },
            cfg.theta,
            &grid,
            0,
        )?;
        let mse = exact
            .singlet_population
            .iter()
            .zip(&sampled.singlet_population)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / exact.len() as f64;
        Ok((shots, mse.sqrt()))
    })
    .into_iter()
    .collect()
}
