use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{ModelId, SectorIndex};
use crate::error::{Error, Result};
use crate::operators::{
    dense_hermitian_eigen, lowest_eigen_csr, omega, EigenOptions, HilbertSpace, Operator,
};

/// Unitary Z3 symmetry generator of `model` on `space`.
///
/// For `R1`, `R2` and `Alt` the generator is diagonal with entries
/// `w^{n + j}`, `w^{n1 - n2 + j}` and `w^{n1 + n2 + j}`. For `R2P` it is
/// `exp[(2 pi i / 3)(i a1^dag a2 - i a2^dag a1)] Z`, exponentiated per shell of
/// fixed `n1 + n2`; shells above the cutoff are incomplete and there the cube
/// is only approximately the identity.
pub fn build_parity(model: ModelId, space: &HilbertSpace) -> Result<Operator> {
    model.check_space(space)?;
    let diag = |f: &dyn Fn(&[usize]) -> i64| {
        let d: Vec<C64> = (0..space.dim())
            .map(|i| omega(f(&space.levels_of(i))))
            .collect();
        Operator::diagonal(space, &d)
    };
    match model {
        ModelId::R1 => diag(&|l| (l[1] + l[0]) as i64),
        ModelId::R2 => diag(&|l| l[1] as i64 - l[2] as i64 + l[0] as i64),
        ModelId::Alt => diag(&|l| (l[1] + l[2] + l[0]) as i64),
        ModelId::R2P => rotation_parity(space),
    }
}

type ShellBlocks = Vec<(Vec<(usize, usize)>, DMatrix<C64>)>;

fn shell_cache() -> &'static Mutex<HashMap<usize, Arc<ShellBlocks>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ShellBlocks>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Blocks of `exp[(2 pi i / 3) G]` with `G = i a1^dag a2 - i a2^dag a1`, one
/// per shell `s = n1 + n2`, each listing its `(n1, n2)` basis and the unitary.
/// Cached per cutoff.
pub fn shell_parity_blocks(n_max: usize) -> Arc<ShellBlocks> {
    if let Some(b) = shell_cache().lock().unwrap().get(&n_max) {
        return b.clone();
    }
    let mut blocks = Vec::with_capacity(2 * n_max + 1);
    for s in 0..=2 * n_max {
        let lo = s.saturating_sub(n_max);
        let hi = s.min(n_max);
        let basis: Vec<(usize, usize)> = (lo..=hi).map(|n1| (n1, s - n1)).collect();
        let d = basis.len();
        // i a1^dag a2 |n1, n2> = i sqrt((n1 + 1) n2) |n1 + 1, n2 - 1>
        let g = DMatrix::from_fn(d, d, |r, c| {
            let (n1, n2) = basis[c];
            let (m1, _) = basis[r];
            if m1 == n1 + 1 {
                C64::new(0.0, ((n1 + 1) as f64 * n2 as f64).sqrt())
            } else if m1 + 1 == n1 {
                C64::new(0.0, -((n1 as f64) * (n2 + 1) as f64).sqrt())
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let (vals, vecs) = dense_hermitian_eigen(&g);
        let phases = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::from_polar(1.0, 2.0 * PI * vals[r] / 3.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let u = &vecs * phases * vecs.adjoint();
        blocks.push((basis, u));
    }
    let blocks = Arc::new(blocks);
    shell_cache().lock().unwrap().insert(n_max, blocks.clone());
    blocks
}

fn rotation_parity(space: &HilbertSpace) -> Result<Operator> {
    let n_max = space.factor(1)?.dim() - 1;
    if space.factor(2)?.dim() - 1 != n_max {
        return Err(Error::SpaceModelMismatch {
            model: ModelId::R2P.to_string(),
            reason: "both modes need the same truncation".into(),
        });
    }
    let blocks = shell_parity_blocks(n_max);
    let mut trip = Vec::new();
    for j in 0..3 {
        let z = omega(j as i64);
        for (basis, u) in blocks.iter() {
            for (r, &(m1, m2)) in basis.iter().enumerate() {
                let row = space.index_of(&[j, m1, m2])?;
                for (c, &(n1, n2)) in basis.iter().enumerate() {
                    let v = u[(r, c)];
                    if v.norm() > 1e-15 {
                        trip.push((row, space.index_of(&[j, n1, n2])?, z * v));
                    }
                }
            }
        }
    }
    Ok(Operator::from_triplets(space.clone(), trip))
}

/// `P_k = (1/3) sum_j w^{-kj} P^j`; fails unless `P^3 = I` to 1e-10.
pub fn sector_projector(parity: &Operator, k: SectorIndex) -> Result<Operator> {
    let p2 = parity * parity;
    let p3 = &p2 * parity;
    let dev = p3.distance(&Operator::identity(parity.space()))?;
    if dev > 1e-10 {
        return Err(Error::NotOrderThree { deviation: dev });
    }
    let kk = k.value() as i64;
    let id = Operator::identity(parity.space());
    let sum = &(&id + &parity.scale(omega(-kk))) + &p2.scale(omega(-2 * kk));
    let proj = sum.scale_re(1.0 / 3.0);
    let herm = proj.hermiticity_error();
    if herm <= 1e-12 {
        proj.into_hermitian()
    } else {
        Ok(proj)
    }
}

/// Sector label of every basis state for a diagonal parity with entries
/// `w^k`; `None` if the parity is not diagonal or has other entries.
pub fn diagonal_sector_labels(parity: &Operator) -> Option<Vec<SectorIndex>> {
    let d = parity.matrix().as_diagonal()?;
    d.iter()
        .map(|&v| {
            (0..3)
                .find(|&k| (v - omega(k as i64)).norm() < 1e-12)
                .map(|k| SectorIndex::new(k).unwrap())
        })
        .collect()
}

/// Basis indices of sector `k` for a diagonal parity.
pub fn sector_indices(parity: &Operator, k: SectorIndex) -> Result<Vec<usize>> {
    let labels = diagonal_sector_labels(parity).ok_or_else(|| {
        Error::ShapeMismatch("sector restriction needs a diagonal Z3 parity".into())
    })?;
    Ok(labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == k)
        .map(|(i, _)| i)
        .collect())
}

/// Lowest `count` eigenvalues of `h` restricted to sector `k` of a diagonal parity.
pub fn sector_lowest_eigenvalues(
    h: &Operator,
    parity: &Operator,
    k: SectorIndex,
    count: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let idx = sector_indices(parity, k)?;
    let sub = h.matrix().submatrix(&idx);
    Ok(lowest_eigen_csr(&sub, count, &EigenOptions::with_tol(tol))?.0)
}
