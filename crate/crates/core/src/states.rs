//! State vectors, coherent and cat states, and density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::models::SectorIndex;
use crate::operators::{dense_hermitian_eigen, fourier_state, omega, HilbertSpace, Operator};

/// Dense complex vector on a [`HilbertSpace`].
///
/// Constructors renormalize numerically. Vectors produced by applying an
/// operator carry whatever norm the product yields.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: Vec<C64>,
}

impl StateVector {
    /// Normalizes `amps`; fails on a zero vector or a length mismatch.
    pub fn new(space: HilbertSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amps.len(),
            });
        }
        let mut v = Self { space, amps };
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ShapeMismatch(format!("cannot normalize vector of norm {n}")));
        }
        v.amps.iter_mut().for_each(|a| *a /= n);
        Ok(v)
    }

    pub(crate) fn from_raw(space: HilbertSpace, amps: Vec<C64>) -> Self {
        debug_assert_eq!(space.dim(), amps.len());
        Self { space, amps }
    }

    /// Basis vector at flat index `index`.
    pub fn basis(space: &HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::ValueOutOfRange {
                index,
                bound: space.dim(),
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self::from_raw(space.clone(), amps))
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(C64::new(0.0, 0.0), |s, (a, b)| s + a.conj() * b)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::from_raw(self.space.clone(), self.amps.iter().map(|a| a * s).collect())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Tensor product; factors of `other` follow those of `self`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut factors = self.space.factors().to_vec();
        factors.extend_from_slice(other.space.factors());
        let space = HilbertSpace::new(factors)?;
        let mut amps = Vec::with_capacity(space.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self::from_raw(space, amps))
    }

    /// Sum of `c_i |v_i>` over vectors on a common space, unnormalized.
    pub fn linear_combination(terms: &[(C64, &StateVector)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty linear combination".into()))?;
        let space = first.1.space.clone();
        let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
        for (c, v) in terms {
            if v.space != space {
                return Err(Error::ShapeMismatch(format!(
                    "cannot add vectors on {} and {}",
                    space, v.space
                )));
            }
            for (o, a) in amps.iter_mut().zip(&v.amps) {
                *o += c * a;
            }
        }
        Ok(Self::from_raw(space, amps))
    }

    pub fn normalized(self) -> Result<Self> {
        Self::new(self.space, self.amps)
    }
}

/// Smallest Fock truncation accepted for coherent amplitude `|alpha|`.
pub fn required_truncation(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0).ceil() as usize
}

pub fn check_truncation(alpha_abs: f64, n_max: usize) -> Result<()> {
    let required = required_truncation(alpha_abs);
    if n_max < required {
        return Err(Error::TruncationGuard {
            alpha: alpha_abs,
            required,
            found: n_max,
        });
    }
    Ok(())
}

/// Overlap `<beta|gamma>` of two untruncated coherent states.
pub fn coherent_overlap(beta: C64, gamma: C64) -> C64 {
    (beta.conj() * gamma - 0.5 * (beta.norm_sqr() + gamma.norm_sqr())).exp()
}

fn coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    out.push(c);
    for n in 1..=n_max {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Coherent state `|alpha>` on a single mode truncated at `n_max`.
pub fn coherent_state(alpha: C64, n_max: usize) -> Result<StateVector> {
    check_truncation(alpha.norm(), n_max)?;
    StateVector::new(HilbertSpace::fock(n_max)?, coherent_amplitudes(alpha, n_max))
}

fn raw_coherent(alpha: C64, n_max: usize) -> Result<StateVector> {
    Ok(StateVector::from_raw(
        HilbertSpace::fock(n_max)?,
        coherent_amplitudes(alpha, n_max),
    ))
}

/// Cat-state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatKind {
    /// Qutrit entangled with one mode, on qutrit x Fock.
    Qb1,
    /// Qutrit entangled with two modes, on qutrit x Fock x Fock.
    Q2b,
    /// Two-mode cat without a qutrit, on Fock x Fock.
    B2,
}

impl std::str::FromStr for CatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qb1" | "qb" => Ok(CatKind::Qb1),
            "q2b" => Ok(CatKind::Q2b),
            "b2" | "2b" => Ok(CatKind::B2),
            _ => Err(Error::InvalidParams(format!("unknown cat kind `{s}`"))),
        }
    }
}

/// One branch of a cat: qutrit Fourier label (if any) and the coherent
/// amplitudes of each mode.
struct Branch {
    qutrit: Option<usize>,
    modes: Vec<C64>,
}

fn branches(kind: CatKind, alpha: C64) -> [Branch; 3] {
    std::array::from_fn(|l| {
        let l = l as i64;
        let minus = (-l).rem_euclid(3) as usize;
        match kind {
            CatKind::Qb1 => Branch {
                qutrit: Some(minus),
                modes: vec![omega(-l) * alpha],
            },
            CatKind::Q2b => Branch {
                qutrit: Some(minus),
                modes: vec![omega(-l) * alpha, omega(l) * alpha],
            },
            CatKind::B2 => Branch {
                qutrit: None,
                modes: vec![omega(-l) * alpha, omega(l) * alpha],
            },
        }
    })
}

/// Branch weights `w^{lk}`.
fn branch_weights(k: SectorIndex) -> [C64; 3] {
    std::array::from_fn(|l| omega(l as i64 * k.value() as i64))
}

/// Squared norm of `sum_l w^{lk} |branch_l>` from the 3x3 Gram matrix of
/// analytic overlaps (untruncated modes).
pub fn cat_gram_norm_sq(kind: CatKind, k: SectorIndex, alpha: C64) -> f64 {
    let br = branches(kind, alpha);
    let w = branch_weights(k);
    let mut total = C64::new(0.0, 0.0);
    for (i, bi) in br.iter().enumerate() {
        for (j, bj) in br.iter().enumerate() {
            let q = match (bi.qutrit, bj.qutrit) {
                (Some(a), Some(b)) if a != b => continue,
                _ => C64::new(1.0, 0.0),
            };
            let modes = bi
                .modes
                .iter()
                .zip(&bj.modes)
                .fold(q, |acc, (&x, &y)| acc * coherent_overlap(x, y));
            total += w[i].conj() * w[j] * modes;
        }
    }
    total.re
}

fn branch_vector(b: &Branch, n_max: usize) -> Result<StateVector> {
    let mut v: Option<StateVector> = match b.qutrit {
        Some(q) => Some(fourier_state(3, q)?),
        None => None,
    };
    for &m in &b.modes {
        let c = raw_coherent(m, n_max)?;
        v = Some(match v {
            Some(acc) => acc.tensor(&c)?,
            None => c,
        });
    }
    Ok(v.expect("branch has at least one mode"))
}

/// Z3 cat state of the given family with sector label `k`.
///
/// `Qb1` is `3^{-1/2} sum_l w^{lk} |w^{-l} alpha>|w^{-l}>`, `Q2b` is
/// `3^{-1/2} sum_l w^{lk} |w^{-l} alpha>|w^{l} alpha>|w^{-l}>` and `B2` is
/// `N^{-1/2} sum_l w^{lk} |w^{-l} alpha>|w^{l} alpha>`; qutrit kets are
/// Fourier states and the qutrit is the first tensor factor.
pub fn cat_state(kind: CatKind, k: SectorIndex, alpha: C64, n_max: usize) -> Result<StateVector> {
    check_truncation(alpha.norm(), n_max)?;
    let w = branch_weights(k);
    let vecs = branches(kind, alpha)
        .iter()
        .map(|b| branch_vector(b, n_max))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(C64, &StateVector)> = w.iter().copied().zip(vecs.iter()).collect();
    let sum = StateVector::linear_combination(&terms)?;
    let gram = cat_gram_norm_sq(kind, k, alpha);
    if gram <= 1e-300 {
        return Err(Error::InvalidParams(format!(
            "cat state with k = {} vanishes at alpha = {alpha}",
            k.value()
        )));
    }
    let scaled = sum.scaled(C64::new(gram.sqrt().recip(), 0.0));
    let drift = (scaled.norm() - 1.0).abs();
    if drift > 1e-8 {
        return Err(Error::InvalidParams(format!(
            "truncated cat norm deviates from Gram normalization by {drift:.3e}"
        )));
    }
    scaled.normalized()
}

/// One-mode Z2 cat `(|alpha> +- |-alpha>) / sqrt(N2)`.
pub fn z2_cat_state(plus: bool, alpha: C64, n_max: usize) -> Result<StateVector> {
    check_truncation(alpha.norm(), n_max)?;
    let s = if plus { 1.0 } else { -1.0 };
    let a = raw_coherent(alpha, n_max)?;
    let b = raw_coherent(-alpha, n_max)?;
    StateVector::linear_combination(&[(C64::new(1.0, 0.0), &a), (C64::new(s, 0.0), &b)])?
        .normalized()
}

/// `2 (1 +- e^{-2|alpha|^2})`
pub fn z2_cat_norm_sq(plus: bool, alpha: C64) -> f64 {
    let s = if plus { 1.0 } else { -1.0 };
    2.0 * (1.0 + s * (-2.0 * alpha.norm_sqr()).exp())
}

/// Density operator stored as a convex combination of pure states.
///
/// Large joint spaces make a dense matrix impractical, so the ensemble form
/// is kept; trace, Hermiticity and positivity hold by construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: HilbertSpace,
    components: Vec<(f64, StateVector)>,
}

impl DensityMatrix {
    pub fn from_pure(v: StateVector) -> Self {
        Self {
            space: v.space().clone(),
            components: vec![(1.0, v)],
        }
    }

    /// Convex mixture; weights must be non-negative and sum to one.
    pub fn mixture(components: Vec<(f64, StateVector)>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidDensity("empty mixture".into()))?;
        let space = first.1.space().clone();
        let mut total = 0.0;
        for (w, v) in &components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidDensity(format!("weight {w} is not a probability")));
            }
            if v.space() != &space {
                return Err(Error::InvalidDensity("components on different spaces".into()));
            }
            if (v.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidDensity("component is not normalized".into()));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { space, components })
    }

    /// From an explicit matrix; checks Hermiticity, unit trace and positivity.
    pub fn from_dense(space: HilbertSpace, m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: m.nrows(),
            });
        }
        let herm = (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::InvalidDensity(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let (vals, vecs) = dense_hermitian_eigen(m);
        if vals[0] < -1e-10 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {}", vals[0])));
        }
        let mut components = Vec::new();
        for (i, &w) in vals.iter().enumerate() {
            if w > 1e-14 {
                let v = StateVector::new(space.clone(), vecs.column(i).iter().copied().collect())?;
                components.push((w, v));
            }
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        components.iter_mut().for_each(|c| c.0 /= total);
        Ok(Self { space, components })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(w, v)| w * v.norm().powi(2)).sum()
    }

    fn gram(&self) -> DMatrix<C64> {
        let n = self.components.len();
        DMatrix::from_fn(n, n, |i, j| {
            let (wi, vi) = &self.components[i];
            let (wj, vj) = &self.components[j];
            vi.inner(vj) * (wi * wj).sqrt()
        })
    }

    /// `tr(rho^2)`
    pub fn purity(&self) -> f64 {
        let g = self.gram();
        g.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Nonzero spectrum of `rho`, ascending, via the weighted Gram matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        dense_hermitian_eigen(&self.gram()).0
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let d = self.space.dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, v) in &self.components {
            let a = v.amplitudes();
            for r in 0..d {
                if a[r] == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    m[(r, c)] += a[r] * a[c].conj() * w;
                }
            }
        }
        m
    }

    /// `tr(rho O)`
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (w, v) in &self.components {
            s += op.expectation(v)? * w;
        }
        Ok(s)
    }

    /// Reduced matrix of the qudit at `slot`, tracing out every other factor.
    pub fn reduced_qudit(&self, slot: usize) -> Result<DMatrix<C64>> {
        let d = self.space.factor(slot)?.dim();
        if self.space.factor(slot)?.is_fock() {
            return Err(Error::ShapeMismatch(format!("factor {slot} is not a qudit")));
        }
        let stride = self.space.stride(slot);
        let mut m = DMatrix::zeros(d, d);
        for (w, v) in &self.components {
            let a = v.amplitudes();
            for (i, ai) in a.iter().enumerate() {
                let qi = self.space.level(i, slot);
                let base = i - qi * stride;
                for qj in 0..d {
                    m[(qi, qj)] += ai * a[base + qj * stride].conj() * w;
                }
            }
        }
        Ok(m)
    }

    /// Traces out the qudit at `slot`, keeping the remaining factors in order.
    pub fn trace_out_qudit(&self, slot: usize) -> Result<Self> {
        let factor = self.space.factor(slot)?;
        if factor.is_fock() {
            return Err(Error::ShapeMismatch(format!("factor {slot} is not a qudit")));
        }
        let rest = self.space.without(&[slot])?;
        let mut comps = Vec::new();
        for (w, v) in &self.components {
            for q in 0..factor.dim() {
                let amps: Vec<C64> = (0..self.space.dim())
                    .filter(|&i| self.space.level(i, slot) == q)
                    .map(|i| v.amplitudes()[i])
                    .collect();
                let part = StateVector::from_raw(rest.clone(), amps);
                let p = part.norm().powi(2);
                if p > 1e-300 {
                    comps.push((w * p, part.normalized()?));
                }
            }
        }
        Ok(Self {
            space: rest,
            components: comps,
        })
    }
}

/// The three reference densities used to compare cat, mixed and product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefKind {
    /// Pure Q2B cat `|psi_k><psi_k|`.
    Q2bCat,
    /// `(1/3) sum_i |w^{-i} alpha, w^{i} alpha, w^{i}><...|`.
    Mix,
    /// Two-mode cat times the qutrit Fourier state `|w^0>`.
    Product2b,
}

impl std::str::FromStr for RefKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "q2b_cat" | "cat" => Ok(RefKind::Q2bCat),
            "mix" => Ok(RefKind::Mix),
            "product_2b" | "product" => Ok(RefKind::Product2b),
            _ => Err(Error::InvalidParams(format!("unknown reference state `{s}`"))),
        }
    }
}

/// Reference density on qutrit x Fock x Fock. `k` is ignored for `Mix`.
pub fn reference_density(
    kind: RefKind,
    k: SectorIndex,
    alpha: C64,
    n_max: usize,
) -> Result<DensityMatrix> {
    match kind {
        RefKind::Q2bCat => Ok(DensityMatrix::from_pure(cat_state(CatKind::Q2b, k, alpha, n_max)?)),
        RefKind::Mix => {
            check_truncation(alpha.norm(), n_max)?;
            let comps = (0..3)
                .map(|i| {
                    let q = fourier_state(3, i as usize)?;
                    let v = q
                        .tensor(&coherent_state(omega(-i) * alpha, n_max)?)?
                        .tensor(&coherent_state(omega(i) * alpha, n_max)?)?;
                    Ok((1.0 / 3.0, v.normalized()?))
                })
                .collect::<Result<Vec<_>>>()?;
            DensityMatrix::mixture(comps)
        }
        RefKind::Product2b => {
            let cat = cat_state(CatKind::B2, k, alpha, n_max)?;
            let v = fourier_state(3, 0)?.tensor(&cat)?;
            Ok(DensityMatrix::from_pure(v.normalized()?))
        }
    }
}
