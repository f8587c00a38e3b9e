use std::f64::consts::PI;

use super::{ModelId, SectorIndex};
use crate::error::{Error, Result};
use crate::operators::{fock_annihilation, HilbertSpace, Operator};
use crate::params::ModelParams;

fn unsupported(model: ModelId) -> Error {
    Error::UnsupportedModel {
        model: model.to_string(),
        operation: "build_transformed_hamiltonian".into(),
    }
}

/// Sector-`k` Hamiltonian in the dressed frame, on pure Fock space(s).
///
/// `R1`: `Omega (b^dag - s)(b - s) - lambda^2/Omega + 2B cos[(2 pi/3)(b^dag b - k) - phi]`
/// with `b = a X` and `s = lambda / Omega`.
/// `R2`: the same with two shifted oscillators (`b1 = a1 X`, `b2 = a2 X^dag`),
/// offset `-2 lambda^2 / Omega` and the cosine taken of `L3 - k`.
pub fn build_transformed_hamiltonian(
    model: ModelId,
    params: &ModelParams,
    k: SectorIndex,
    n_max: usize,
) -> Result<Operator> {
    params.validate()?;
    let space = match model {
        ModelId::R1 => HilbertSpace::fock(n_max)?,
        ModelId::R2 => HilbertSpace::fock2(n_max)?,
        _ => return Err(unsupported(model)),
    };
    let (om, lam, b, phi) = (params.omega, params.lambda, params.b_field, params.phi);
    let s = lam / om;
    let kk = k.value() as f64;
    let modes = space.len();
    let diag = Operator::real_diagonal(&space, |i| {
        let l = space.levels_of(i);
        let l3 = if modes == 1 {
            l[0] as f64
        } else {
            l[0] as f64 - l[1] as f64
        };
        let n: usize = l.iter().sum();
        om * (n as f64 + modes as f64 * s * s) - modes as f64 * lam * lam / om
            + 2.0 * b * ((2.0 * PI / 3.0) * (l3 - kk) - phi).cos()
    });
    let mut h = diag;
    for slot in 0..modes {
        let bm = fock_annihilation(&space, slot)?;
        let shift = &bm + &bm.adjoint();
        h = &h - &shift.scale_re(om * s);
    }
    h.into_hermitian()
}

/// Full-space basis index of each dressed-frame basis state of sector `k`.
///
/// `R1`: `|m>_b -> |j = k - m, n = m>`; `R2`: `|m1, m2>_b -> |j = k - m1 + m2, m1, m2>`.
/// The map is a bijection onto the sector, so restricting the full
/// Hamiltonian to these indices reproduces the dressed-frame matrix.
pub fn transformed_embedding(model: ModelId, k: SectorIndex, n_max: usize) -> Result<Vec<usize>> {
    let full = model.space(n_max)?;
    let kk = k.value() as i64;
    match model {
        ModelId::R1 => (0..=n_max)
            .map(|m| full.index_of(&[(kk - m as i64).rem_euclid(3) as usize, m]))
            .collect(),
        ModelId::R2 => {
            let sub = HilbertSpace::fock2(n_max)?;
            (0..sub.dim())
                .map(|i| {
                    let l = sub.levels_of(i);
                    let j = (kk - l[0] as i64 + l[1] as i64).rem_euclid(3) as usize;
                    full.index_of(&[j, l[0], l[1]])
                })
                .collect()
        }
        _ => Err(unsupported(model)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_hamiltonian, build_parity, sector_indices};
    use crate::operators::{lowest_eigenvalues, CsrMatrix};

    #[test]
    fn r1_diagonal_at_zero_coupling() {
        let p = ModelParams::new(1.0, 0.1, 0.0, 0.0).unwrap();
        let h = build_transformed_hamiltonian(ModelId::R1, &p, SectorIndex::new(0).unwrap(), 6)
            .unwrap();
        for n in 0..=6 {
            let want = n as f64 + 0.2 * (2.0 * PI * n as f64 / 3.0).cos();
            assert!((h.get(n, n).re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_oscillator_ground_energy() {
        let p = ModelParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        for k in SectorIndex::ALL {
            let h = build_transformed_hamiltonian(ModelId::R1, &p, k, 50).unwrap();
            let e = lowest_eigenvalues(&h, 1, 1e-12).unwrap()[0];
            assert!((e + 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_other_models() {
        let p = ModelParams::default();
        assert!(build_transformed_hamiltonian(ModelId::Alt, &p, SectorIndex::new(0).unwrap(), 5)
            .is_err());
    }

    fn restricted(h: &Operator, idx: &[usize]) -> CsrMatrix {
        let n = idx.len();
        CsrMatrix::from_triplets(
            n,
            (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .map(|(r, c)| (r, c, h.get(idx[r], idx[c])))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn embedding_reproduces_sector_blocks() {
        let p = ModelParams::new(1.0, 0.13, 0.7, 0.6).unwrap();
        for model in [ModelId::R1, ModelId::R2] {
            let n = 5;
            let space = model.space(n).unwrap();
            let h = build_hamiltonian(model, &p, &space).unwrap();
            let par = build_parity(model, &space).unwrap();
            for k in SectorIndex::ALL {
                let idx = transformed_embedding(model, k, n).unwrap();
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, sector_indices(&par, k).unwrap());
                let t = build_transformed_hamiltonian(model, &p, k, n).unwrap();
                let block = restricted(&h, &idx);
                let dev = block.add_scaled(t.matrix(), (-1.0).into()).max_abs();
                assert!(dev < 1e-13, "{model} k={k}: {dev}");
            }
        }
    }
}
