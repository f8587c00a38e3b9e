//! One- and two-mode Z3 quantum Rabi models.
//!
//! Sparse Hamiltonians on qutrit x Fock spaces, their Z3 symmetry sectors,
//! exact and first-order perturbative spectra, Z3 cat states and joint
//! qutrit-boson Wigner functions.

pub mod error;
pub mod models;
pub mod operators;
pub mod params;
pub mod perturbation;
pub mod states;
pub mod verify;
pub mod wigner;


pub use error::{Error, Result};
pub use models::{build_hamiltonian, build_parity, ModelId, SectorIndex};
pub use operators::{lowest_eigenpairs, EigenPair, Factor, HilbertSpace, Operator};
pub use params::ModelParams;
pub use perturbation::{spectrum_sweep, SpectrumResult};
pub use states::{CatKind, DensityMatrix, RefKind, StateVector};
pub use verify::{run_verification, VerificationReport};
pub use wigner::{wigner_value, PhasePoint, PlaneSection, WignerGrid};

pub use num_complex::Complex64;
