//! Radical-pair spin Hamiltonians as sums of Pauli strings.
//!
//! Units: energies in neV, times in µs, fields in mT, rates in MHz. Spin
//! operators are dimensionless, `S = σ/2`, so a Zeeman component
//! `g μ_B B_α S_α` becomes the Pauli term `(g μ_B B_α / 2) σ_α` and a hyperfine
//! component `a_αβ I_α S_β`-style product becomes `(a_αβ / 4) σ_α ⊗ σ_β`.
//!
//! Qubit layout: site 0 is electron 1, site 1 is electron 2 and sites 2.. are
//! the nuclei in declaration order.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result, C64};

/// Reduced Planck constant in neV·µs.
pub const HBAR_NEV_US: f64 = 0.658_211_956_9;
/// Bohr magneton in neV/mT.
pub const BOHR_MAGNETON_NEV_PER_MT: f64 = 57.8838;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// One additive component of a Hamiltonian: a real coefficient (neV) times a
/// tensor product of Pauli letters, one letter per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, letters: Vec<Pauli>) -> Self {
        Self {
            coefficient,
            letters,
        }
    }

    /// A term acting with `ops` on the listed sites and identity elsewhere.
    pub fn on_sites(coefficient: f64, n_sites: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut letters = vec![Pauli::I; n_sites];
        for &(site, p) in ops {
            letters[site] = p;
        }
        Self::new(coefficient, letters)
    }

    pub fn n_sites(&self) -> usize {
        self.letters.len()
    }

    /// Sites carrying a non-identity letter, in ascending order.
    pub fn support(&self) -> Vec<(usize, Pauli)> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, p)| (i, *p))
            .collect()
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.symbol()).collect()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+.6} {}", self.coefficient, self.label())
    }
}

/// A nuclear spin-½ hyperfine-coupled to one of the two electrons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nucleus {
    /// 0 for electron 1, 1 for electron 2.
    pub electron: usize,
    /// Hyperfine tensor in neV, row-major.
    pub tensor: [[f64; 3]; 3],
}

/// Physical parameters of a radical pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadicalPairSystem {
    /// Field magnitude in mT.
    pub field_mt: f64,
    /// Polar angle of the field (rad).
    pub theta: f64,
    /// Azimuthal angle of the field (rad).
    pub phi: f64,
    pub g_factors: [f64; 2],
    /// neV/mT
    pub bohr_magneton: f64,
    /// neV·µs
    pub hbar: f64,
    pub nuclei: Vec<Nucleus>,
    /// MHz
    pub k_singlet: f64,
    /// MHz
    pub k_triplet: f64,
}

impl Default for RadicalPairSystem {
    fn default() -> Self {
        Self::prototype()
    }
}

impl RadicalPairSystem {
    /// Two electrons and a single proton on electron 1 with the axial tensor
    /// diag(5, 5, 10) neV in a 50 µT field, k_S = k_T = 1 MHz.
    pub fn prototype() -> Self {
        Self {
            field_mt: 0.05,
            theta: 0.0,
            phi: 0.0,
            g_factors: [2.0, 2.0],
            bohr_magneton: BOHR_MAGNETON_NEV_PER_MT,
            hbar: HBAR_NEV_US,
            nuclei: vec![Nucleus {
                electron: 0,
                tensor: [[5.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 10.0]],
            }],
            k_singlet: 1.0,
            k_triplet: 1.0,
        }
    }

    pub fn with_angles(mut self, theta: f64, phi: f64) -> Self {
        self.theta = theta;
        self.phi = phi;
        self
    }

    pub fn n_sites(&self) -> usize {
        2 + self.nuclei.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites()
    }

    /// Field vector `B (sinθ cosφ, sinθ sinφ, cosθ)` in mT.
    pub fn field_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [
            self.field_mt * st * cp,
            self.field_mt * st * sp,
            self.field_mt * ct,
        ]
    }

    /// Symmetric recombination rate, if `k_S == k_T`.
    pub fn symmetric_rate(&self) -> Option<f64> {
        (self.k_singlet == self.k_triplet).then_some(self.k_singlet)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.field_mt,
            self.theta,
            self.phi,
            self.g_factors[0],
            self.g_factors[1],
            self.bohr_magneton,
            self.hbar,
            self.k_singlet,
            self.k_triplet,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("system: non-finite value".into()));
        }
        if self.field_mt < 0.0 {
            return Err(Error::InvalidParameter(
                "system.field_mt must be >= 0".into(),
            ));
        }
        if self.k_singlet < 0.0 || self.k_triplet < 0.0 {
            return Err(Error::InvalidParameter(
                "system.k_singlet/k_triplet must be >= 0".into(),
            ));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParameter("system.hbar must be > 0".into()));
        }
        for (i, n) in self.nuclei.iter().enumerate() {
            if n.electron > 1 {
                return Err(Error::InvalidParameter(format!(
                    "system.nuclei[{i}].electron must be 0 or 1"
                )));
            }
            if n.tensor.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "system.nuclei[{i}].tensor has a non-finite entry"
                )));
            }
        }
        Ok(())
    }

    /// Stable SHA-256 over the parameter values, used to tag compiled circuits.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        let mut put = |x: f64| h.update(x.to_bits().to_le_bytes());
        put(self.field_mt);
        put(self.theta);
        put(self.phi);
        put(self.g_factors[0]);
        put(self.g_factors[1]);
        put(self.bohr_magneton);
        put(self.hbar);
        put(self.k_singlet);
        put(self.k_triplet);
        for n in &self.nuclei {
            put(n.electron as f64);
            n.tensor.iter().flatten().for_each(|&v| put(v));
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Expand the Hamiltonian into Pauli terms.
///
/// Order: electron-1 Zeeman (x, y, z), electron-2 Zeeman (x, y, z), then for
/// each nucleus its nine (electron axis α, nuclear axis β) pairs in row-major
/// order of the tensor. Zero-coefficient terms are kept.
pub fn build_pauli_terms(system: &RadicalPairSystem) -> Vec<PauliTerm> {
    let n = system.n_sites();
    let field = system.field_vector();
    let mut terms = Vec::with_capacity(6 + 9 * system.nuclei.len());
    for electron in 0..2 {
        let scale = system.g_factors[electron] * system.bohr_magneton / 2.0;
        for (axis, &b) in Pauli::AXES.iter().zip(field.iter()) {
            terms.push(PauliTerm::on_sites(scale * b, n, &[(electron, *axis)]));
        }
    }
    for (k, nucleus) in system.nuclei.iter().enumerate() {
        let site = 2 + k;
        for (a, alpha) in Pauli::AXES.iter().enumerate() {
            for (b, beta) in Pauli::AXES.iter().enumerate() {
                terms.push(PauliTerm::on_sites(
                    nucleus.tensor[a][b] / 4.0,
                    n,
                    &[(nucleus.electron, *alpha), (site, *beta)],
                ));
            }
        }
    }
    terms
}

/// Dense Hermitian matrix `Σ_k c_k σ^(k)_0 ⊗ σ^(k)_1 ⊗ ...` with site 0 as the
/// most significant tensor factor.
pub fn to_dense_matrix(terms: &[PauliTerm], n_sites: usize) -> Result<DMatrix<C64>> {
    let dim = 1usize << n_sites;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for term in terms {
        if term.n_sites() != n_sites {
            return Err(Error::SiteMismatch {
                expected: n_sites,
                found: term.n_sites(),
            });
        }
        // A Pauli string has exactly one nonzero per row: column = row ^ flip.
        let mut flip = 0usize;
        for (site, p) in term.letters.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip |= 1 << (n_sites - 1 - site);
            }
        }
        for row in 0..dim {
            let col = row ^ flip;
            let mut v = C64::new(term.coefficient, 0.0);
            for (site, p) in term.letters.iter().enumerate() {
                let shift = n_sites - 1 - site;
                let rb = (row >> shift) & 1;
                let cb = (col >> shift) & 1;
                v *= p.matrix()[rb][cb];
            }
            h[(row, col)] += v;
        }
    }
    Ok(h)
}

/// Full Hamiltonian matrix of a system in neV.
pub fn hamiltonian_matrix(system: &RadicalPairSystem) -> DMatrix<C64> {
    to_dense_matrix(&build_pauli_terms(system), system.n_sites())
        .expect("build_pauli_terms emits terms over every site")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        a.kronecker(b)
    }

    fn pauli_dm(p: Pauli) -> DMatrix<C64> {
        let m = p.matrix();
        DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
    }

    /// Independent construction: explicit Kronecker products of spin operators.
    fn brute_force_hamiltonian(sys: &RadicalPairSystem) -> DMatrix<C64> {
        let n = sys.n_sites();
        let dim = 1 << n;
        let op_on = |site: usize, p: Pauli| {
            let mut m = DMatrix::<C64>::identity(1, 1);
            for s in 0..n {
                let f = if s == site {
                    pauli_dm(p).scale(0.5)
                } else {
                    DMatrix::identity(2, 2)
                };
                m = kron(&m, &f);
            }
            m
        };
        let b = sys.field_vector();
        let mut h = DMatrix::<C64>::zeros(dim, dim);
        for e in 0..2 {
            for (ax, p) in Pauli::AXES.iter().enumerate() {
                h += op_on(e, *p).scale(sys.g_factors[e] * sys.bohr_magneton * b[ax]);
            }
        }
        for (k, nuc) in sys.nuclei.iter().enumerate() {
            for a in 0..3 {
                for c in 0..3 {
                    h += (&op_on(nuc.electron, Pauli::AXES[a]) * &op_on(2 + k, Pauli::AXES[c]))
                        .scale(nuc.tensor[a][c]);
                }
            }
        }
        h
    }

    #[test]
    fn prototype_zeeman_coefficients_along_z() {
        let terms = build_pauli_terms(&RadicalPairSystem::prototype().with_angles(0.0, 0.0));
        assert_eq!(terms.len(), 15);
        assert_abs_diff_eq!(terms[0].coefficient, 0.0);
        assert_abs_diff_eq!(terms[1].coefficient, 0.0);
        assert_abs_diff_eq!(terms[2].coefficient, 2.89419, epsilon = 1e-9);
        assert_eq!(terms[2].label(), "ZII");
        assert_eq!(terms[5].label(), "IZI");
    }

    #[test]
    fn prototype_hyperfine_coefficients() {
        let terms = build_pauli_terms(&RadicalPairSystem::prototype());
        let hf = &terms[6..];
        let labels: Vec<_> = hf.iter().map(|t| t.label()).collect();
        assert_eq!(
            labels,
            ["XIX", "XIY", "XIZ", "YIX", "YIY", "YIZ", "ZIX", "ZIY", "ZIZ"]
        );
        let expect = [1.25, 0.0, 0.0, 0.0, 1.25, 0.0, 0.0, 0.0, 2.5];
        for (t, e) in hf.iter().zip(expect) {
            assert_abs_diff_eq!(t.coefficient, e);
        }
    }

    #[test]
    fn empty_interaction_gives_zero_coefficients() {
        let mut sys = RadicalPairSystem::prototype();
        sys.field_mt = 0.0;
        sys.nuclei[0].tensor = [[0.0; 3]; 3];
        assert!(build_pauli_terms(&sys).iter().all(|t| t.coefficient == 0.0));
    }

    #[test]
    fn dense_matrix_basics() {
        let h = to_dense_matrix(&[], 3).unwrap();
        assert_eq!(h.shape(), (8, 8));
        assert!(h.iter().all(|z| z.norm() == 0.0));

        let z = to_dense_matrix(&[PauliTerm::new(1.5, vec![Pauli::Z])], 1).unwrap();
        assert_eq!(z[(0, 0)], C64::new(1.5, 0.0));
        assert_eq!(z[(1, 1)], C64::new(-1.5, 0.0));
        assert_eq!(z[(0, 1)], C64::new(0.0, 0.0));

        let err = to_dense_matrix(&[PauliTerm::new(1.0, vec![Pauli::Z])], 2);
        assert!(matches!(err, Err(Error::SiteMismatch { .. })));
    }

    #[test]
    fn dense_matrix_matches_kronecker_oracle() {
        for theta in [0.0, 0.3, PI / 2.0, 2.0] {
            for phi in [0.0, 0.7] {
                let sys = RadicalPairSystem::prototype().with_angles(theta, phi);
                let h = hamiltonian_matrix(&sys);
                let oracle = brute_force_hamiltonian(&sys);
                assert!((&h - &oracle).camax() < 1e-12);
                assert!(h.trace().norm() < 1e-12);
                let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
                let mut eo: Vec<f64> = oracle.symmetric_eigenvalues().iter().copied().collect();
                ev.sort_by(f64::total_cmp);
                eo.sort_by(f64::total_cmp);
                for (a, b) in ev.iter().zip(&eo) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut sys = RadicalPairSystem::prototype();
        sys.field_mt = -1.0;
        assert!(sys.validate().is_err());
        let mut sys = RadicalPairSystem::prototype();
        sys.nuclei[0].electron = 2;
        assert!(sys.validate().is_err());
        assert!(RadicalPairSystem::prototype().validate().is_ok());
    }
}
