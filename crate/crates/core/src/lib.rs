//! Classical emulation of digital quantum simulation of radical-pair spin
//! dynamics.
//!
//! The pipeline is: build a Zeeman + hyperfine Hamiltonian as Pauli terms
//! ([`spinham`]), compile it into a first-order Trotter circuit
//! ([`circuit`]), execute the circuit with or without gate noise ([`qsim`]),
//! and reduce the resulting singlet populations to yields and anisotropy
//! ([`observables`]). [`refsolver`] provides the exact master-equation
//! reference that every circuit result is checked against, and
//! [`experiment`] drives whole sweeps.

pub mod circuit;
pub mod experiment;
pub mod observables;
pub mod qsim;
pub mod refsolver;
pub mod spinham;
pub mod state;

pub use num_complex::Complex64 as C64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("term has {found} sites, expected {expected}")]
    SiteMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: circuit acts on {circuit} qubits, state has {state}")]
    DimensionMismatch { circuit: usize, state: usize },
    #[error("time grid mismatch")]
    GridMismatch,
    #[error("trace already has recombination decay applied")]
    AlreadyDecayed,
    #[error("trace has no recombination decay applied")]
    NotDecayed,
    #[error("curve is flat; rescale fit undefined")]
    FlatCurve,
    #[error("term with {0} non-identity letters cannot be compiled to a single rotation")]
    TermTooWide(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
