//! Hamiltonians of the one- and two-mode Z3 Rabi models, their symmetry
//! generators, sector projectors, dressed-frame Hamiltonians and SU(2)
//! generators.

mod parity;
mod su2;
mod transformed;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{
    fock_annihilation, number_operator, qutrit_clock_shift_on, Factor, HilbertSpace, Operator,
};
use crate::params::ModelParams;

pub use parity::{
    build_parity, diagonal_sector_labels, sector_indices, sector_lowest_eigenvalues,
    sector_projector, shell_parity_blocks,
};
pub use su2::{interior_columns, qho2d_hamiltonian, su2_generators};
pub use transformed::{build_transformed_hamiltonian, transformed_embedding};

/// Which Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    /// Qutrit coupled to one mode.
    R1,
    /// Qutrit coupled to two modes through `(a1 + a2^dag) X`.
    R2,
    /// Two-mode model written with quadratures `x1 +- i x2`.
    R2P,
    /// Two modes coupled symmetrically through `(a1 + a2) X`.
    Alt,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::R1, ModelId::R2, ModelId::R2P, ModelId::Alt];

    pub fn modes(self) -> usize {
        match self {
            ModelId::R1 => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelId::R1 => "r1",
            ModelId::R2 => "r2",
            ModelId::R2P => "r2p",
            ModelId::Alt => "alt",
        }
    }

    /// Product space `qutrit x Fock(n_max)^modes` for this model.
    pub fn space(self, n_max: usize) -> Result<HilbertSpace> {
        match self.modes() {
            1 => HilbertSpace::qutrit_fock(n_max),
            _ => HilbertSpace::qutrit_fock2(n_max),
        }
    }

    /// Checks that `space` is a qutrit followed by the right number of modes.
    pub fn check_space(self, space: &HilbertSpace) -> Result<()> {
        let f = space.factors();
        let ok = f.len() == self.modes() + 1
            && f[0].is_qutrit()
            && f[1..].iter().all(Factor::is_fock);
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceModelMismatch {
                model: self.to_string(),
                reason: format!(
                    "expected a qutrit followed by {} Fock mode(s), got {space}",
                    self.modes()
                ),
            })
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r1" => Ok(ModelId::R1),
            "r2" => Ok(ModelId::R2),
            "r2p" | "r2'" | "r2prime" => Ok(ModelId::R2P),
            "alt" => Ok(ModelId::Alt),
            _ => Err(Error::InvalidParams(format!(
                "unknown model `{s}` (expected r1, r2, r2p or alt)"
            ))),
        }
    }
}

/// Label `k` of the parity eigenvalue `w^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorIndex(u8);

impl SectorIndex {
    pub const ALL: [SectorIndex; 3] = [SectorIndex(0), SectorIndex(1), SectorIndex(2)];

    pub fn new(k: usize) -> Result<Self> {
        if k < 3 {
            Ok(Self(k as u8))
        } else {
            Err(Error::ValueOutOfRange { index: k, bound: 3 })
        }
    }

    /// Reduces any integer mod 3.
    pub fn wrapping(k: i64) -> Self {
        Self(k.rem_euclid(3) as u8)
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Qutrit energies `2B cos(phi + 2 pi j / 3)` of `B(e^{i phi} Z + e^{-i phi} Z^dag)`.
pub fn magnetic_levels(params: &ModelParams) -> [f64; 3] {
    std::array::from_fn(|j| {
        2.0 * params.b_field
            * (params.phi + 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos()
    })
}

/// Hermitian Hamiltonian of `model` on `space` (qutrit in slot 0, modes after).
pub fn build_hamiltonian(
    model: ModelId,
    params: &ModelParams,
    space: &HilbertSpace,
) -> Result<Operator> {
    params.validate()?;
    model.check_space(space)?;
    let levels = magnetic_levels(params);
    let free = Operator::real_diagonal(space, |i| {
        let bosons: usize = (1..space.len()).map(|s| space.level(i, s)).sum();
        params.omega * bosons as f64 + levels[space.level(i, 0)]
    });
    let (_, x) = qutrit_clock_shift_on(space, 0)?;
    let lam = params.lambda;
    let a1 = fock_annihilation(space, 1)?;
    // coupling C such that H = free - lam (C X + (C X)^dag)
    let c = match model {
        ModelId::R1 => a1,
        ModelId::R2 => &a1 + &fock_annihilation(space, 2)?.adjoint(),
        ModelId::R2P => {
            let a2 = fock_annihilation(space, 2)?;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let x1 = (&a1 + &a1.adjoint()).scale_re(s);
            let x2 = (&a2 + &a2.adjoint()).scale_re(s);
            &x1 + &x2.scale(C64::new(0.0, 1.0))
        }
        ModelId::Alt => &a1 + &fock_annihilation(space, 2)?,
    };
    let cx = &c * &x;
    let coupling = &cx + &cx.adjoint();
    (&free - &coupling.scale_re(lam)).into_hermitian()
}

/// Total boson number operator over every Fock factor.
pub fn total_number(space: &HilbertSpace) -> Result<Operator> {
    let mut out = Operator::zero(space);
    for s in space.fock_slots() {
        out = &out + &number_operator(space, s)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{dense_hermitian_eigen, lowest_eigenvalues};
    use std::f64::consts::PI;

    fn default_params() -> ModelParams {
        ModelParams::new(1.0, 0.1, 7.0 * PI / 6.0, 0.5).unwrap()
    }

    #[test]
    fn rejects_mismatched_space() {
        let p = default_params();
        let s1 = HilbertSpace::qutrit_fock(4).unwrap();
        let s2 = HilbertSpace::qutrit_fock2(4).unwrap();
        assert!(build_hamiltonian(ModelId::R2, &p, &s1).is_err());
        assert!(build_hamiltonian(ModelId::R1, &p, &s2).is_err());
        assert!(build_hamiltonian(ModelId::R1, &p, &HilbertSpace::fock(4).unwrap()).is_err());
    }

    #[test]
    fn decoupled_r1_spectrum() {
        let p = ModelParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let s = HilbertSpace::qutrit_fock(5).unwrap();
        let h = build_hamiltonian(ModelId::R1, &p, &s).unwrap();
        let (vals, _) = dense_hermitian_eigen(&h.to_dense());
        for (i, v) in vals.iter().enumerate() {
            assert!((v - (i / 3) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn magnetic_levels_at_default_phase() {
        let p = default_params();
        let e = magnetic_levels(&p);
        let r = 3f64.sqrt() / 10.0;
        assert!((e[0] + r).abs() < 1e-15);
        assert!((e[1] - r).abs() < 1e-15);
        assert!(e[2].abs() < 1e-15);
        // qutrit-diagonal blocks of the R1 matrix carry these levels for any lambda
        let s = HilbertSpace::qutrit_fock(3).unwrap();
        let h = build_hamiltonian(ModelId::R1, &p.with_lambda(0.9), &s).unwrap();
        for j in 0..3 {
            let i = s.index_of(&[j, 2]).unwrap();
            assert!((h.get(i, i).re - (2.0 + e[j])).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coupling_low_triplet() {
        let p = default_params().with_lambda(0.0);
        let s = HilbertSpace::qutrit_fock(20).unwrap();
        let h = build_hamiltonian(ModelId::R1, &p, &s).unwrap();
        let vals = lowest_eigenvalues(&h, 3, 1e-12).unwrap();
        let r = 3f64.sqrt() / 10.0;
        for (v, w) in vals.iter().zip([-r, 0.0, r]) {
            assert!((v - w).abs() < 1e-12);
        }
    }

    #[test]
    fn model_names_roundtrip() {
        for m in ModelId::ALL {
            assert_eq!(m.name().parse::<ModelId>().unwrap(), m);
        }
        assert!("r3".parse::<ModelId>().is_err());
        assert!(SectorIndex::new(3).is_err());
        assert_eq!(SectorIndex::wrapping(-1).value(), 2);
    }
}
