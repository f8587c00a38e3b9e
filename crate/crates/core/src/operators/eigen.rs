use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sparse::{CsrMatrix, Operator, HERMITIAN_RTOL};
use crate::error::{Error, Result};
use crate::states::StateVector;

/// Iterative algorithm used above the dense threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Chebyshev-filtered subspace iteration.
    Chebyshev,
    /// Thick-restart block Lanczos.
    Lanczos,
}

/// Tuning knobs for [`lowest_eigenpairs_with`].
#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Residual bound relative to `||H||_inf`.
    pub tol: f64,
    pub method: EigenMethod,
    /// Restarts (Lanczos) or filter sweeps (Chebyshev).
    pub max_restarts: usize,
    /// Block width (Lanczos) or number of guard vectors beyond `count`
    /// (Chebyshev); defaults to `count + 2` resp. `max(4, count / 2)`.
    pub block_size: Option<usize>,
    /// Basis size before a restart; defaults to `max(4 * block, count + 2 * block, 40)`.
    pub krylov_dim: Option<usize>,
    /// Matrices below this dimension are diagonalized densely.
    pub dense_threshold: usize,
    /// Polynomial degree of one Chebyshev sweep.
    pub filter_degree: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            method: EigenMethod::Chebyshev,
            max_restarts: 1000,
            block_size: None,
            krylov_dim: None,
            dense_threshold: 512,
            filter_degree: 40,
            seed: 0x5eed_cafe,
        }
    }
}

impl EigenOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: StateVector,
}

/// The `count` smallest eigenpairs of a Hermitian operator, ascending.
pub fn lowest_eigenpairs(h: &Operator, count: usize, tol: f64) -> Result<Vec<EigenPair>> {
    lowest_eigenpairs_with(h, count, &EigenOptions::with_tol(tol))
}

pub fn lowest_eigenpairs_with(
    h: &Operator,
    count: usize,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>> {
    if !h.is_hermitian() {
        let dev = h.hermiticity_error();
        if dev > HERMITIAN_RTOL * h.max_abs() {
            return Err(Error::NotHermitian { deviation: dev });
        }
    }
    let (values, vectors) = lowest_eigen_csr(h.matrix(), count, opts)?;
    values
        .into_iter()
        .zip(vectors)
        .map(|(value, v)| {
            Ok(EigenPair {
                value,
                vector: StateVector::new(h.space().clone(), v)?,
            })
        })
        .collect()
}

/// Lowest eigenvalues only.
pub fn lowest_eigenvalues(h: &Operator, count: usize, tol: f64) -> Result<Vec<f64>> {
    Ok(lowest_eigenpairs(h, count, tol)?
        .into_iter()
        .map(|p| p.value)
        .collect())
}

/// Full spectrum of a Hermitian matrix, ascending, with eigenvectors as columns.
pub fn dense_hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigensolver on a raw Hermitian CSR matrix; returns values and unit vectors.
pub fn lowest_eigen_csr(
    m: &CsrMatrix,
    count: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = m.dim();
    if count == 0 || count > n {
        return Err(Error::ValueOutOfRange {
            index: count,
            bound: n + 1,
        });
    }
    let (block, kdim, width) = match opts.method {
        EigenMethod::Lanczos => {
            let block = opts.block_size.unwrap_or(count + 2).max(1);
            let kdim = opts
                .krylov_dim
                .unwrap_or((4 * block).max(count + 2 * block).max(40));
            (block, kdim, kdim + block)
        }
        EigenMethod::Chebyshev => {
            let guard = opts.block_size.unwrap_or((count / 2).max(4));
            (guard, 0, 2 * (count + guard))
        }
    };
    if n < opts.dense_threshold || width >= n {
        let (vals, vecs) = dense_hermitian_eigen(&m.to_dense());
        let vectors = (0..count)
            .map(|c| vecs.column(c).iter().copied().collect())
            .collect();
        return Ok((vals[..count].to_vec(), vectors));
    }
    match opts.method {
        EigenMethod::Lanczos => block_lanczos(m, count, block, kdim, opts),
        EigenMethod::Chebyshev => chebyshev_subspace(m, count, count + block, opts),
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |s, (x, y)| s + x.conj() * y)
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Classical Gram-Schmidt against `basis`, applied twice.
fn project_out(basis: &[Vec<C64>], w: &mut [C64]) {
    for _ in 0..2 {
        let coeffs: Vec<C64> = basis.par_iter().map(|v| dot(v, w)).collect();
        for (v, c) in basis.iter().zip(coeffs) {
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
        }
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Appends the orthonormalized `pending` vectors to `basis`, replacing
/// deflated directions with random ones. Returns how many were appended.
fn extend_basis(
    basis: &mut Vec<Vec<C64>>,
    pending: Vec<Vec<C64>>,
    rng: &mut ChaCha8Rng,
) -> usize {
    let n = basis.first().map_or_else(|| pending[0].len(), |v| v.len());
    let mut added = 0;
    for mut w in pending {
        let mut attempts = 0;
        loop {
            let before = norm(&w);
            project_out(basis, &mut w);
            let after = norm(&w);
            if after > 1e-8 * before.max(f64::MIN_POSITIVE) && after > 0.0 {
                let s = 1.0 / after;
                w.iter_mut().for_each(|x| *x *= s);
                basis.push(w);
                added += 1;
                break;
            }
            attempts += 1;
            if attempts > 5 || basis.len() >= n {
                break;
            }
            w = random_vector(n, rng);
        }
    }
    added
}

fn combine(cols: &[Vec<C64>], coeffs: impl Fn(usize) -> C64 + Sync, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    out.par_chunks_mut(1024).enumerate().for_each(|(chunk, o)| {
        let off = chunk * 1024;
        for (j, v) in cols.iter().enumerate() {
            let c = coeffs(j);
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (i, oi) in o.iter_mut().enumerate() {
                *oi += c * v[off + i];
            }
        }
    });
    out
}

/// Thick-restart block Lanczos with full reorthogonalization.
///
/// The basis is grown by block Krylov steps until `kdim` vectors; the
/// Rayleigh quotient `V^dag H V` is diagonalized densely; the lowest Ritz
/// vectors are kept and the basis regrown from their residuals.
fn block_lanczos(
    m: &CsrMatrix,
    count: usize,
    block: usize,
    kdim: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = m.dim();
    let hnorm = m.norm_inf().max(f64::MIN_POSITIVE);
    let target = opts.tol * hnorm;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(kdim + block);
    let mut hbasis: Vec<Vec<C64>> = Vec::with_capacity(kdim + block);
    let mut pending: Vec<Vec<C64>> = (0..block).map(|_| random_vector(n, &mut rng)).collect();
    let keep_max = (count + block).max(kdim / 2).min(kdim - block);
    let mut worst = f64::INFINITY;

    for restart in 0..=opts.max_restarts {
        while basis.len() < kdim && !pending.is_empty() {
            let room = kdim - basis.len();
            pending.truncate(room);
            let start = basis.len();
            let added = extend_basis(&mut basis, std::mem::take(&mut pending), &mut rng);
            if added == 0 {
                break;
            }
            for v in &basis[start..] {
                hbasis.push(m.apply(v));
            }
            pending = hbasis[start..].to_vec();
        }

        let k = basis.len();
        let t_rows: Vec<Vec<C64>> = (0..k)
            .into_par_iter()
            .map(|i| (0..k).map(|j| dot(&basis[i], &hbasis[j])).collect())
            .collect();
        let t = DMatrix::from_fn(k, k, |i, j| t_rows[i][j]);
        let (theta, s) = dense_hermitian_eigen(&t);

        let keep = keep_max.min(k);
        let ritz: Vec<Vec<C64>> = (0..keep)
            .into_par_iter()
            .map(|c| combine(&basis, |j| s[(j, c)], n))
            .collect();
        let hritz: Vec<Vec<C64>> = (0..keep)
            .into_par_iter()
            .map(|c| combine(&hbasis, |j| s[(j, c)], n))
            .collect();
        let residuals: Vec<Vec<C64>> = (0..keep)
            .map(|c| {
                hritz[c]
                    .iter()
                    .zip(&ritz[c])
                    .map(|(hy, y)| hy - y * theta[c])
                    .collect()
            })
            .collect();
        let rnorms: Vec<f64> = residuals.iter().map(|r| norm(r)).collect();
        worst = rnorms[..count].iter().cloned().fold(0.0, f64::max);
        if worst <= target {
            let vectors = ritz
                .into_iter()
                .take(count)
                .map(|mut v| {
                    let s = 1.0 / norm(&v);
                    v.iter_mut().for_each(|x| *x *= s);
                    v
                })
                .collect();
            return Ok((theta[..count].to_vec(), vectors));
        }
        if restart == opts.max_restarts {
            break;
        }

        let mut order: Vec<usize> = (0..keep).filter(|&c| rnorms[c] > target).collect();
        order.extend((0..keep).filter(|&c| rnorms[c] <= target));
        pending = order
            .into_iter()
            .take(block)
            .map(|c| residuals[c].clone())
            .collect();
        basis = ritz;
        hbasis = hritz;
    }
    Err(Error::NotConverged {
        achieved: worst / hnorm,
        required: opts.tol,
        iterations: opts.max_restarts,
    })
}

/// Orthonormal basis of the span of `vectors` (random fill-in on deflation).
fn orthonormalize(vectors: Vec<Vec<C64>>, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut basis = Vec::with_capacity(vectors.len());
    extend_basis(&mut basis, vectors, rng);
    basis
}

/// Rayleigh-Ritz on an orthonormal block: Ritz values, vectors and their images.
fn rayleigh_ritz(m: &CsrMatrix, basis: &[Vec<C64>]) -> (Vec<f64>, Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let n = m.dim();
    let k = basis.len();
    let hbasis: Vec<Vec<C64>> = basis.par_iter().map(|v| m.apply(v)).collect();
    let t_rows: Vec<Vec<C64>> = (0..k)
        .into_par_iter()
        .map(|i| (0..k).map(|j| dot(&basis[i], &hbasis[j])).collect())
        .collect();
    let t = DMatrix::from_fn(k, k, |i, j| t_rows[i][j]);
    let (theta, s) = dense_hermitian_eigen(&t);
    let ritz = (0..k)
        .into_par_iter()
        .map(|c| combine(basis, |j| s[(j, c)], n))
        .collect();
    let hritz = (0..k)
        .into_par_iter()
        .map(|c| combine(&hbasis, |j| s[(j, c)], n))
        .collect();
    (theta, ritz, hritz)
}

/// Degree-`degree` Chebyshev polynomial of `m` that damps `[cut, upper]`
/// and grows below it, applied to `x` with the scaled three-term recurrence;
/// `lower` estimates the bottom of the spectrum and sets the scale.
fn chebyshev_filter(
    m: &CsrMatrix,
    x: &[C64],
    degree: usize,
    lower: f64,
    cut: f64,
    upper: f64,
) -> Vec<C64> {
    let e = 0.5 * (upper - cut);
    let c = 0.5 * (upper + cut);
    let mut sigma = e / (lower - c);
    let tau = 2.0 / sigma;
    let mut prev = x.to_vec();
    let mut cur: Vec<C64> = m
        .apply(x)
        .iter()
        .zip(x)
        .map(|(hx, xi)| (hx - xi * c) * (sigma / e))
        .collect();
    let mut hy = vec![C64::new(0.0, 0.0); x.len()];
    for _ in 1..degree {
        let next_sigma = 1.0 / (tau - sigma);
        m.apply_into(&cur, &mut hy);
        let f1 = 2.0 * next_sigma / e;
        let f2 = sigma * next_sigma;
        for ((p, &y), &h) in prev.iter_mut().zip(&cur).zip(&hy) {
            *p = (h - y * c) * f1 - *p * f2;
        }
        std::mem::swap(&mut prev, &mut cur);
        sigma = next_sigma;
    }
    cur
}

/// Chebyshev-filtered subspace iteration on a block of `width` vectors.
///
/// Each sweep filters the current Ritz vectors with a polynomial that
/// damps everything above the largest Ritz value, re-orthonormalizes, and
/// repeats Rayleigh-Ritz until the lowest `count` residuals are below tolerance.
fn chebyshev_subspace(
    m: &CsrMatrix,
    count: usize,
    width: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = m.dim();
    let hnorm = m.norm_inf().max(f64::MIN_POSITIVE);
    let target = opts.tol * hnorm;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = (0..width).map(|_| random_vector(n, &mut rng)).collect();
    let mut basis = orthonormalize(start, &mut rng);
    let mut worst = f64::INFINITY;
    for _ in 0..=opts.max_restarts {
        let (theta, ritz, hritz) = rayleigh_ritz(m, &basis);
        worst = (0..count)
            .map(|c| {
                hritz[c]
                    .iter()
                    .zip(&ritz[c])
                    .map(|(hy, y)| (hy - y * theta[c]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if worst <= target {
            let vectors = ritz.into_iter().take(count).collect();
            return Ok((theta[..count].to_vec(), vectors));
        }
        let lower = theta[0] - worst;
        let cut = theta[theta.len() - 1];
        let filtered = ritz
            .par_iter()
            .map(|v| chebyshev_filter(m, v, opts.filter_degree, lower, cut, hnorm))
            .collect();
        basis = orthonormalize(filtered, &mut rng);
    }
    Err(Error::NotConverged {
        achieved: worst / hnorm,
        required: opts.tol,
        iterations: opts.max_restarts,
    })
}
