//! Pure and mixed states over the spin register, singlet projectors.
//!
//! Basis ordering is site-0-major: basis index `Σ_q bit_q · 2^(n-1-q)`, so
//! `|010⟩` is index 2.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Initial nuclear spin configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuclearConfig {
    Up,
    Down,
    /// Maximally mixed `I/2` per nucleus (density matrices only).
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

const TOL: f64 = 1e-10;

impl QuantumState {
    /// Checked pure state: normalized to 1e-10.
    pub fn pure(amplitudes: DVector<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::InvalidState(format!("norm {norm} != 1")));
        }
        Ok(Self::Pure(amplitudes))
    }

    /// Checked density matrix: Hermitian, unit trace, PSD to -1e-10.
    pub fn density(rho: DMatrix<C64>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidState("density matrix not square".into()));
        }
        check_dim(rho.nrows())?;
        if (&rho - rho.adjoint()).camax() > TOL {
            return Err(Error::InvalidState("density matrix not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_ev = rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_ev < -TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev}")));
        }
        Ok(Self::Density(rho))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Density(m) => m.nrows(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn kind(&self) -> StateKind {
        match self {
            Self::Pure(_) => StateKind::Pure,
            Self::Density(_) => StateKind::Density,
        }
    }

    pub fn to_density_matrix(&self) -> DMatrix<C64> {
        match self {
            Self::Pure(v) => v * v.adjoint(),
            Self::Density(m) => m.clone(),
        }
    }

    /// Computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            Self::Pure(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            Self::Density(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(())
}

/// `(|01⟩ − |10⟩)/√2` on the two electron sites.
pub fn singlet_vector() -> DVector<C64> {
    DVector::from_column_slice(&[
        C64::new(0.0, 0.0),
        C64::new(FRAC_1_SQRT_2, 0.0),
        C64::new(-FRAC_1_SQRT_2, 0.0),
        C64::new(0.0, 0.0),
    ])
}

/// `|S⟩⟨S| ⊗ I` on `n_sites` sites (electrons on sites 0 and 1).
pub fn singlet_projector(n_sites: usize) -> DMatrix<C64> {
    let s = singlet_vector();
    let ps = &s * s.adjoint();
    ps.kronecker(&DMatrix::identity(1 << (n_sites - 2), 1 << (n_sites - 2)))
}

/// `I − P_S`.
pub fn triplet_projector(n_sites: usize) -> DMatrix<C64> {
    let dim = 1 << n_sites;
    DMatrix::identity(dim, dim) - singlet_projector(n_sites)
}

fn nuclear_vector(n_nuclei: usize, config: NuclearConfig) -> DVector<C64> {
    let dim = 1 << n_nuclei;
    let mut v = DVector::zeros(dim);
    // all |↑⟩ = |0..0⟩, all |↓⟩ = |1..1⟩
    let idx = match config {
        NuclearConfig::Down => dim - 1,
        _ => 0,
    };
    v[idx] = C64::new(1.0, 0.0);
    v
}

/// Electrons in the singlet, nuclei in the requested configuration.
pub fn initial_state(
    config: NuclearConfig,
    n_sites: usize,
    kind: StateKind,
) -> Result<QuantumState> {
    if n_sites < 3 {
        return Err(Error::InvalidParameter(format!(
            "initial state needs at least 3 sites, got {n_sites}"
        )));
    }
    let n_nuc = n_sites - 2;
    match (config, kind) {
        (NuclearConfig::Mixed, StateKind::Pure) => Err(Error::InvalidParameter(
            "mixed nuclear configuration requires a density-matrix state".into(),
        )),
        (NuclearConfig::Mixed, StateKind::Density) => {
            let s = singlet_vector();
            let dn = 1 << n_nuc;
            let nuc = DMatrix::<C64>::identity(dn, dn).scale(1.0 / dn as f64);
            Ok(QuantumState::Density((&s * s.adjoint()).kronecker(&nuc)))
        }
        (c, StateKind::Pure) => Ok(QuantumState::Pure(
            singlet_vector().kronecker(&nuclear_vector(n_nuc, c)),
        )),
        (c, StateKind::Density) => {
            let v = singlet_vector().kronecker(&nuclear_vector(n_nuc, c));
            Ok(QuantumState::Density(&v * v.adjoint()))
        }
    }
}

/// Register input for a compiled circuit: electrons in `|00⟩` (the circuit
/// prepares the singlet), nuclei in the requested configuration.
pub fn circuit_input_state(
    config: NuclearConfig,
    n_sites: usize,
    kind: StateKind,
) -> Result<QuantumState> {
    if n_sites < 3 {
        return Err(Error::InvalidParameter(format!(
            "circuit input needs at least 3 sites, got {n_sites}"
        )));
    }
    let n_nuc = n_sites - 2;
    let mut e = DVector::<C64>::zeros(4);
    e[0] = C64::new(1.0, 0.0);
    match (config, kind) {
        (NuclearConfig::Mixed, StateKind::Pure) => Err(Error::InvalidParameter(
            "mixed nuclear configuration requires a density-matrix state".into(),
        )),
        (NuclearConfig::Mixed, StateKind::Density) => {
            let dn = 1 << n_nuc;
            let nuc = DMatrix::<C64>::identity(dn, dn).scale(1.0 / dn as f64);
            Ok(QuantumState::Density((&e * e.adjoint()).kronecker(&nuc)))
        }
        (c, StateKind::Pure) => Ok(QuantumState::Pure(e.kronecker(&nuclear_vector(n_nuc, c)))),
        (c, StateKind::Density) => {
            let v = e.kronecker(&nuclear_vector(n_nuc, c));
            Ok(QuantumState::Density(&v * v.adjoint()))
        }
    }
}

/// `|b_0 b_1 ...⟩` for the given bits, site 0 first.
pub fn basis_state(bits: &[u8]) -> DVector<C64> {
    let n = bits.len();
    let idx = bits.iter().enumerate().fold(0usize, |acc, (q, &b)| {
        acc | ((b as usize & 1) << (n - 1 - q))
    });
    let mut v = DVector::zeros(1 << n);
    v[idx] = C64::new(1.0, 0.0);
    v
}
