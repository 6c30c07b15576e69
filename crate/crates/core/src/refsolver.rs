//! Exact reference dynamics.
//!
//! Two independent routes to the singlet population under symmetric
//! Haberkorn recombination:
//!
//! * [`evolve_exact`] diagonalizes `H` once and evaluates the unitary
//!   population `Tr[P_S U(t) ρ₀ U(t)†]` on the whole grid, then
//!   [`apply_decay`] multiplies by `e^{-kt}`.
//! * [`rk4_haberkorn`] integrates `dρ/dt = −(i/ħ)[H, ρ] − Σ_n {k_n/2 P_n, ρ}`
//!   directly with classical fixed-step RK4.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::state::{singlet_projector, triplet_projector, QuantumState};
use crate::{Error, Result, C64};

/// Uniform grid `t_i = i·dt`, `i = 0..=intervals`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub intervals: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        if !(t_max.is_finite() && t_max >= dt) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be >= dt, got t_max={t_max}, dt={dt}"
            )));
        }
        let intervals = (t_max / dt).round() as usize;
        Ok(Self { dt, intervals })
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        self.intervals as f64 * self.dt
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }
}

/// Singlet population on a uniform time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub singlet_population: Vec<f64>,
    /// Whether the `e^{-kt}` recombination weighting has been applied.
    pub decayed: bool,
}

impl PopulationTrace {
    pub fn new(times: Vec<f64>, singlet_population: Vec<f64>, decayed: bool) -> Self {
        debug_assert_eq!(times.len(), singlet_population.len());
        Self {
            times,
            singlet_population,
            decayed,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Step of a uniform grid; `None` for fewer than two points.
    pub fn dt(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.singlet_population
            .iter()
            .zip(&other.singlet_population)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn hermiticity_error(h: &DMatrix<C64>) -> f64 {
    (h - h.adjoint()).camax()
}

fn check_hermitian(h: &DMatrix<C64>) -> Result<()> {
    let err = hermiticity_error(h);
    if err > 1e-10 * h.camax().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Spectral form of `U(t) = exp(−iHt/ħ)`.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    /// Eigenvalues divided by ħ (rad/µs).
    freqs: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl SpectralPropagator {
    pub fn new(h: &DMatrix<C64>, hbar: f64) -> Result<Self> {
        check_hermitian(h)?;
        let herm = (h + h.adjoint()).scale(0.5);
        let eig = herm.symmetric_eigen();
        Ok(Self {
            freqs: eig.eigenvalues.iter().map(|e| e / hbar).collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let d = self.freqs.len();
        let phases = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::from_polar(1.0, -self.freqs[i] * t)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.vectors * phases * self.vectors.adjoint()
    }

    /// `Tr[P ρ(t)]` for every grid point, `ρ(t) = U ρ₀ U†`.
    pub fn expectation_trace(
        &self,
        rho0: &DMatrix<C64>,
        projector: &DMatrix<C64>,
        grid: &TimeGrid,
    ) -> Vec<f64> {
        let d = self.freqs.len();
        let v = &self.vectors;
        let r = v.adjoint() * rho0 * v;
        let p = v.adjoint() * projector * v;
        // Tr[P ρ(t)] = Σ_ij p_ji r_ij e^{-i(ω_i − ω_j)t}; combine (i,j) and (j,i).
        let mut diag = 0.0;
        let mut pairs = Vec::with_capacity(d * (d - 1) / 2);
        for i in 0..d {
            diag += (p[(i, i)] * r[(i, i)]).re;
            for j in i + 1..d {
                let w = p[(j, i)] * r[(i, j)];
                if w.norm() > 0.0 {
                    pairs.push((self.freqs[i] - self.freqs[j], w));
                }
            }
        }
        (0..grid.len())
            .map(|k| {
                let t = grid.time(k);
                let off: f64 = pairs
                    .iter()
                    .map(|(dw, w)| 2.0 * (w * C64::from_polar(1.0, -dw * t)).re)
                    .sum();
                diag + off
            })
            .collect()
    }
}

/// Undecayed singlet population under unitary evolution.
pub fn evolve_exact(
    h: &DMatrix<C64>,
    state0: &QuantumState,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<PopulationTrace> {
    evolve_exact_projected(h, state0, grid, hbar, &singlet_projector(state0.n_qubits()))
}

/// Like [`evolve_exact`] for an arbitrary projector (e.g. the triplet one).
pub fn evolve_exact_projected(
    h: &DMatrix<C64>,
    state0: &QuantumState,
    grid: &TimeGrid,
    hbar: f64,
    projector: &DMatrix<C64>,
) -> Result<PopulationTrace> {
    if h.nrows() != state0.dim() {
        return Err(Error::DimensionMismatch {
            circuit: h.nrows().trailing_zeros() as usize,
            state: state0.n_qubits(),
        });
    }
    let prop = SpectralPropagator::new(h, hbar)?;
    let pops = prop.expectation_trace(&state0.to_density_matrix(), projector, grid);
    Ok(PopulationTrace::new(grid.times(), pops, false))
}

/// Multiply each point by `e^{-k t}` (symmetric recombination, k in MHz).
pub fn apply_decay(trace: &PopulationTrace, k: f64) -> Result<PopulationTrace> {
    if trace.decayed {
        return Err(Error::AlreadyDecayed);
    }
    let pops = trace
        .times
        .iter()
        .zip(&trace.singlet_population)
        .map(|(t, p)| p * (-k * t).exp())
        .collect();
    Ok(PopulationTrace::new(trace.times.clone(), pops, true))
}

/// Singlet and triplet traces from direct RK4 integration of the Haberkorn
/// master equation. Only `k_S == k_T` is supported.
#[derive(Clone, Debug)]
pub struct HaberkornTraces {
    pub singlet: PopulationTrace,
    pub triplet: PopulationTrace,
    /// `Tr ρ(t)`.
    pub norm: Vec<f64>,
}

pub fn rk4_haberkorn_full(
    h: &DMatrix<C64>,
    rho0: &DMatrix<C64>,
    k_singlet: f64,
    k_triplet: f64,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<HaberkornTraces> {
    if k_singlet != k_triplet {
        return Err(Error::Unsupported(format!(
            "asymmetric recombination k_S={k_singlet} != k_T={k_triplet}"
        )));
    }
    check_hermitian(h)?;
    if h.shape() != rho0.shape() {
        return Err(Error::DimensionMismatch {
            circuit: h.nrows().trailing_zeros() as usize,
            state: rho0.nrows().trailing_zeros() as usize,
        });
    }
    let n = h.nrows().trailing_zeros() as usize;
    let ps = singlet_projector(n);
    let pt = triplet_projector(n);
    let mi = C64::new(0.0, -1.0 / hbar);
    // K = −(i/ħ)H − (k_S/2)P_S − (k_T/2)P_T, so dρ/dt = Kρ + ρK†.
    let kmat = h.map(|z| z * mi) - ps.scale(k_singlet / 2.0) - pt.scale(k_triplet / 2.0);
    let kadj = kmat.adjoint();
    let rhs = |rho: &DMatrix<C64>| &kmat * rho + rho * &kadj;

    let dt = grid.dt;
    let mut rho = rho0.clone();
    let mut singlet = Vec::with_capacity(grid.len());
    let mut triplet = Vec::with_capacity(grid.len());
    let mut norm = Vec::with_capacity(grid.len());
    let mut record = |rho: &DMatrix<C64>| {
        singlet.push((&ps * rho).trace().re);
        triplet.push((&pt * rho).trace().re);
        norm.push(rho.trace().re);
    };
    record(&rho);
    for _ in 0..grid.intervals {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + k1.scale(dt / 2.0)));
        let k3 = rhs(&(&rho + k2.scale(dt / 2.0)));
        let k4 = rhs(&(&rho + k3.scale(dt)));
        rho += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
        record(&rho);
    }
    let times = grid.times();
    Ok(HaberkornTraces {
        singlet: PopulationTrace::new(times.clone(), singlet, true),
        triplet: PopulationTrace::new(times, triplet, true),
        norm,
    })
}

/// Decayed singlet population from direct RK4 integration.
pub fn rk4_haberkorn(
    h: &DMatrix<C64>,
    state0: &QuantumState,
    k_singlet: f64,
    k_triplet: f64,
    grid: &TimeGrid,
    hbar: f64,
) -> Result<PopulationTrace> {
    let QuantumState::Density(rho0) = state0 else {
        return Err(Error::InvalidParameter(
            "rk4_haberkorn expects a density-matrix state".into(),
        ));
    };
    Ok(rk4_haberkorn_full(h, rho0, k_singlet, k_triplet, grid, hbar)?.singlet)
}
