use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{fock_annihilation, HilbertSpace, Operator};

fn two_modes(space: &HilbertSpace) -> Result<(usize, usize)> {
    match space.fock_slots()[..] {
        [a, b] => Ok((a, b)),
        ref s => Err(Error::ShapeMismatch(format!(
            "SU(2) generators need exactly two Fock modes, {space} has {}",
            s.len()
        ))),
    }
}

/// Schwinger generators `(L1, L2, L3)` of the two Fock modes in `space`:
/// `L1 = a1^dag a2 + a2^dag a1`, `L2 = i(a2^dag a1 - a1^dag a2)`,
/// `L3 = a1^dag a1 - a2^dag a2`, so that `[L1, L2] = 2i L3`.
pub fn su2_generators(space: &HilbertSpace) -> Result<(Operator, Operator, Operator)> {
    let (s1, s2) = two_modes(space)?;
    let a1 = fock_annihilation(space, s1)?;
    let a2 = fock_annihilation(space, s2)?;
    let h12 = &a1.adjoint() * &a2;
    let h21 = &a2.adjoint() * &a1;
    let l1 = (&h12 + &h21).into_hermitian()?;
    let l2 = (&h21 - &h12).scale(C64::new(0.0, 1.0)).into_hermitian()?;
    let l3 = Operator::real_diagonal(space, |i| {
        space.level(i, s1) as f64 - space.level(i, s2) as f64
    });
    Ok((l1, l2, l3))
}

/// `Omega (a1^dag a1 + a2^dag a2 + 1)` on the two Fock modes of `space`.
pub fn qho2d_hamiltonian(space: &HilbertSpace, omega: f64) -> Result<Operator> {
    let (s1, s2) = two_modes(space)?;
    Ok(Operator::real_diagonal(space, |i| {
        omega * (space.level(i, s1) + space.level(i, s2) + 1) as f64
    }))
}

/// Whether basis state `index` lies strictly below the truncation boundary,
/// i.e. every mode occupation is below its cutoff.
pub fn interior_columns(space: &HilbertSpace) -> impl Fn(usize) -> bool + '_ {
    let slots = space.fock_slots();
    move |index| {
        slots
            .iter()
            .all(|&s| space.level(index, s) + 1 < space.dims()[s])
    }
}
