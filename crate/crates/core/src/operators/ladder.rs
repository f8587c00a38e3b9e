use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::space::{Factor, HilbertSpace};
use super::sparse::Operator;
use crate::error::{Error, Result};
use crate::states::StateVector;

/// Primitive n-th root of unity raised to `k`, reduced mod n before the
/// exponential so that integer powers are reproduced to machine precision.
pub fn root_of_unity(n: usize, k: i64) -> C64 {
    let r = k.rem_euclid(n as i64);
    match (n, r) {
        (_, 0) => C64::new(1.0, 0.0),
        (3, 1) => C64::new(-0.5, 0.75f64.sqrt()),
        (3, 2) => C64::new(-0.5, -0.75f64.sqrt()),
        (n, r) if 2 * r as usize == n => C64::new(-1.0, 0.0),
        (n, r) if 4 * r as usize == n => C64::new(0.0, 1.0),
        (n, r) if 4 * r as usize == 3 * n => C64::new(0.0, -1.0),
        _ => C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64),
    }
}

/// omega = exp(2 pi i / 3) raised to `k`.
pub fn omega(k: i64) -> C64 {
    root_of_unity(3, k)
}

fn fock_cutoff(space: &HilbertSpace, slot: usize) -> Result<usize> {
    match space.factor(slot)? {
        Factor::Fock { n_max } => Ok(n_max),
        Factor::Qudit { .. } => Err(Error::NotAFockMode { slot }),
    }
}

/// Annihilation operator of the Fock mode at `slot`, embedded in `space`.
pub fn fock_annihilation(space: &HilbertSpace, slot: usize) -> Result<Operator> {
    fock_cutoff(space, slot)?;
    let stride = space.stride(slot);
    let trip = (0..space.dim()).filter_map(|i| {
        let n = space.level(i, slot);
        (n > 0).then(|| (i - stride, i, C64::new((n as f64).sqrt(), 0.0)))
    });
    Ok(Operator::from_triplets(space.clone(), trip.collect::<Vec<_>>()))
}

/// Creation operator, the adjoint of [`fock_annihilation`].
pub fn fock_creation(space: &HilbertSpace, slot: usize) -> Result<Operator> {
    Ok(fock_annihilation(space, slot)?.adjoint())
}

/// Number operator of the Fock mode at `slot`.
pub fn number_operator(space: &HilbertSpace, slot: usize) -> Result<Operator> {
    fock_cutoff(space, slot)?;
    Ok(Operator::real_diagonal(space, |i| space.level(i, slot) as f64))
}

/// Clock and shift matrices `(Z, X)` of a single n-level qudit:
/// `Z|j> = w^j |j>`, `X|j> = |j+1 mod n>`, with `ZX = w XZ`.
pub fn qudit_clock_shift(n: usize) -> Result<(Operator, Operator)> {
    if n < 2 {
        return Err(Error::InvalidQuditDimension(n));
    }
    let space = HilbertSpace::qudit(n)?;
    let z = Operator::from_triplets(
        space.clone(),
        (0..n).map(|j| (j, j, root_of_unity(n, j as i64))).collect::<Vec<_>>(),
    );
    let x = Operator::from_triplets(
        space,
        (0..n).map(|j| ((j + 1) % n, j, C64::new(1.0, 0.0))).collect::<Vec<_>>(),
    );
    Ok((z, x))
}

/// Fourier state `|w^k> = n^{-1/2} sum_j w^{kj} |j>`, an eigenvector of the
/// shift with `X|w^k> = w^{-k}|w^k>`.
pub fn fourier_state(n: usize, k: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidQuditDimension(n));
    }
    if k >= n {
        return Err(Error::ValueOutOfRange { index: k, bound: n });
    }
    let s = 1.0 / (n as f64).sqrt();
    let amps = (0..n)
        .map(|j| root_of_unity(n, (k * j) as i64) * s)
        .collect();
    StateVector::new(HilbertSpace::qudit(n)?, amps)
}

/// Lifts a single-factor operator to `space`, acting as identity elsewhere.
pub fn embed(op: &Operator, space: &HilbertSpace, slot: usize) -> Result<Operator> {
    let factor = space.factor(slot)?;
    if op.dim() != factor.dim() {
        return Err(Error::DimensionMismatch {
            expected: factor.dim(),
            found: op.dim(),
        });
    }
    let stride = space.stride(slot);
    let m = op.matrix();
    let mut trip = Vec::with_capacity(space.dim() / factor.dim() * m.nnz());
    for i in 0..space.dim() {
        let l = space.level(i, slot);
        let base = i - l * stride;
        let (cols, vals) = m.row(l);
        for (&c, &v) in cols.iter().zip(vals) {
            trip.push((i, base + c * stride, v));
        }
    }
    let out = Operator::from_triplets(space.clone(), trip);
    if op.is_hermitian() {
        out.into_hermitian()
    } else {
        Ok(out)
    }
}

/// Clock and shift of the qutrit at `slot`, embedded in `space`.
pub fn qutrit_clock_shift_on(space: &HilbertSpace, slot: usize) -> Result<(Operator, Operator)> {
    let factor = space.factor(slot)?;
    if !factor.is_qutrit() {
        return Err(Error::ShapeMismatch(format!(
            "factor {slot} is {factor}, expected a qutrit"
        )));
    }
    let (z, x) = qudit_clock_shift(3)?;
    Ok((embed(&z, space, slot)?, embed(&x, space, slot)?))
}
