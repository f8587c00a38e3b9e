//! Hilbert spaces, sparse operators, ladder and clock/shift operators, and
//! the low-lying eigensolver.

mod eigen;
mod ladder;
mod space;
mod sparse;

pub use eigen::{
    dense_hermitian_eigen, lowest_eigen_csr, lowest_eigenpairs, lowest_eigenpairs_with,
    lowest_eigenvalues, EigenMethod, EigenOptions, EigenPair,
};
pub use ladder::{
    embed, fock_annihilation, fock_creation, fourier_state, number_operator, omega,
    qudit_clock_shift, qutrit_clock_shift_on, root_of_unity,
};
pub use space::{Factor, HilbertSpace};
pub use sparse::{CsrMatrix, Operator, HERMITIAN_RTOL};
