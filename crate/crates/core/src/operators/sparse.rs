use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::states::StateVector;

/// Rows above this count are applied in parallel.
const PARALLEL_ROWS: usize = 4096;

/// Square compressed-row matrix with complex entries.
///
/// Assembled from coordinate triplets; duplicate entries are summed and exact
/// zeros dropped, so the stored pattern is canonical (sorted columns per row).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn from_triplets<I>(n: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<C64> = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        // drop exact zeros (cancelled duplicates included)
        let mut k = 0;
        for i in 0..vals.len() {
            if vals[i] != C64::new(0.0, 0.0) {
                rows[k] = rows[i];
                cols[k] = cols[i];
                vals[k] = vals[i];
                k += 1;
            }
        }
        rows.truncate(k);
        cols.truncate(k);
        vals.truncate(k);
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        Self::from_triplets(
            n,
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c, m[(r, c)]))),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[C64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |r| {
            let (c, v) = self.row(r);
            c.iter().zip(v).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        if s == C64::new(0.0, 0.0) {
            return Self::zeros(self.n);
        }
        out
    }

    /// `self + s * other`
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in sparse add");
        Self::from_triplets(
            self.n,
            self.iter()
                .chain(other.iter().map(|(r, c, v)| (r, c, s * v))),
        )
    }

    /// Sparse product `self * other` (Gustavson, dense row accumulator).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in sparse product");
        let n = self.n;
        let rows: Vec<Vec<(usize, C64)>> = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![C64::new(0.0, 0.0); n], vec![false; n], Vec::new()),
                |(acc, seen, touched), r| {
                    touched.clear();
                    let (ac, av) = self.row(r);
                    for (&k, &a) in ac.iter().zip(av) {
                        let (bc, bv) = other.row(k);
                        for (&c, &b) in bc.iter().zip(bv) {
                            if !seen[c] {
                                seen[c] = true;
                                touched.push(c);
                            }
                            acc[c] += a * b;
                        }
                    }
                    touched.sort_unstable();
                    let mut out = Vec::with_capacity(touched.len());
                    for &c in touched.iter() {
                        if acc[c] != C64::new(0.0, 0.0) {
                            out.push((c, acc[c]));
                        }
                        acc[c] = C64::new(0.0, 0.0);
                        seen[c] = false;
                    }
                    out
                },
            )
            .collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// `y = A x`
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let row_dot = |r: usize| {
            let (c, v) = self.row(r);
            c.iter()
                .zip(v)
                .fold(C64::new(0.0, 0.0), |s, (&c, &v)| s + v * x[c])
        };
        if self.n >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, yr)| *yr = row_dot(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, yr)| *yr = row_dot(r));
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        self.apply_into(x, &mut y);
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum; an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| self.row(r).1.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |M - M^dag|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        self.add_scaled(&self.adjoint(), C64::new(-1.0, 0.0)).max_abs()
    }

    /// Diagonal entries if the matrix has no off-diagonal entries.
    pub fn as_diagonal(&self) -> Option<Vec<C64>> {
        let mut d = vec![C64::new(0.0, 0.0); self.n];
        for (r, c, v) in self.iter() {
            if r != c {
                return None;
            }
            d[r] = v;
        }
        Some(d)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Principal submatrix on the given (sorted, distinct) indices.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (new, &old) in indices.iter().enumerate() {
            pos[old] = new;
        }
        Self::from_triplets(
            indices.len(),
            indices.iter().enumerate().flat_map(|(new_r, &old_r)| {
                let (c, v) = self.row(old_r);
                let pos = &pos;
                c.iter().zip(v).filter_map(move |(&c, &v)| {
                    (pos[c] != usize::MAX).then(|| (new_r, pos[c], v))
                })
            }),
        )
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }
}

/// A linear operator on a [`HilbertSpace`], stored sparsely.
///
/// The `hermitian` flag is only ever set after checking
/// `max|M - M^dag| <= 1e-12 * max|M|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CsrMatrix,
    hermitian: bool,
}

pub const HERMITIAN_RTOL: f64 = 1e-12;

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CsrMatrix) -> Result<Self> {
        if matrix.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: matrix.dim(),
            });
        }
        Ok(Self {
            space,
            matrix,
            hermitian: false,
        })
    }

    pub fn from_triplets<I>(space: HilbertSpace, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let matrix = CsrMatrix::from_triplets(space.dim(), triplets);
        Self {
            space,
            matrix,
            hermitian: false,
        }
    }

    pub fn from_dense(space: HilbertSpace, m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: m.nrows(),
            });
        }
        Self::new(space, CsrMatrix::from_dense(m))
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        Self {
            matrix: CsrMatrix::identity(space.dim()),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        Self {
            matrix: CsrMatrix::zeros(space.dim()),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn diagonal(space: &HilbertSpace, diag: &[C64]) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: diag.len(),
            });
        }
        let hermitian = diag.iter().all(|d| d.im == 0.0);
        Ok(Self {
            matrix: CsrMatrix::from_diagonal(diag),
            space: space.clone(),
            hermitian,
        })
    }

    /// Real diagonal operator `f(i)` over flat basis indices.
    pub fn real_diagonal<F: Fn(usize) -> f64>(space: &HilbertSpace, f: F) -> Self {
        let d: Vec<C64> = (0..space.dim()).map(|i| C64::new(f(i), 0.0)).collect();
        Self {
            matrix: CsrMatrix::from_diagonal(&d),
            space: space.clone(),
            hermitian: true,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.hermiticity_error()
    }

    /// Checks the Hermiticity invariant and sets the flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let dev = self.matrix.hermiticity_error();
        if dev > HERMITIAN_RTOL * self.matrix.max_abs() {
            return Err(Error::NotHermitian { deviation: dev });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(s),
            hermitian: self.hermitian && s.im == 0.0,
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch(format!(
                "operators act on different spaces: {} vs {}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.add_scaled(&other.matrix, C64::new(1.0, 0.0)),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.add_scaled(&other.matrix, C64::new(-1.0, 0.0)),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// Operator product `self * other`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.matmul(&other.matrix),
            hermitian: false,
        })
    }

    /// `[self, other] = self*other - other*self`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        ab.checked_sub(&ba)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::identity(&self.space);
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    pub fn apply_slice(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.apply(v)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.space() != &self.space {
            return Err(Error::ShapeMismatch(format!(
                "state on {} but operator on {}",
                v.space(),
                self.space
            )));
        }
        Ok(StateVector::from_raw(
            self.space.clone(),
            self.matrix.apply(v.amplitudes()),
        ))
    }

    /// `<v|A|v>` for a normalized `v`.
    pub fn expectation(&self, v: &StateVector) -> Result<C64> {
        let av = self.apply(v)?;
        Ok(v.inner(&av))
    }

    /// `<u|A|v>`
    pub fn matrix_element(&self, u: &StateVector, v: &StateVector) -> Result<C64> {
        let av = self.apply(v)?;
        Ok(u.inner(&av))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn norm_inf(&self) -> f64 {
        self.matrix.norm_inf()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.matrix.get(r, c)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    /// `max |A - B|` entrywise.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.checked_sub(other)?.max_abs())
    }
}

impl Add for &Operator {
    type Output = Operator;

    /// Panics if the operands act on different spaces.
    fn add(self, rhs: &Operator) -> Operator {
        self.checked_add(rhs).expect("operator sum")
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.checked_sub(rhs).expect("operator difference")
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.checked_mul(rhs).expect("operator product")
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale_re(self)
    }
}

impl Mul<&Operator> for C64 {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale_re(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![
                (0, 1, c(1.0, 0.0)),
                (0, 1, c(2.0, 0.0)),
                (2, 2, c(1.0, 0.0)),
                (2, 2, c(-1.0, 0.0)),
            ],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
    }

    #[test]
    fn product_matches_dense() {
        let a = CsrMatrix::from_triplets(
            3,
            vec![(0, 1, c(1.0, 2.0)), (1, 2, c(-1.0, 0.5)), (2, 0, c(0.0, 1.0))],
        );
        let b = CsrMatrix::from_triplets(
            3,
            vec![(0, 0, c(2.0, 0.0)), (1, 0, c(1.0, 1.0)), (2, 1, c(3.0, 0.0))],
        );
        let sparse = a.matmul(&b).to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).norm() < 1e-14);
    }

    #[test]
    fn submatrix_keeps_principal_block() {
        let m = CsrMatrix::from_triplets(
            4,
            vec![(0, 0, c(1.0, 0.0)), (0, 2, c(2.0, 0.0)), (2, 3, c(5.0, 0.0)), (3, 3, c(7.0, 0.0))],
        );
        let s = m.submatrix(&[0, 2, 3]);
        assert_eq!(s.get(0, 1), c(2.0, 0.0));
        assert_eq!(s.get(1, 2), c(5.0, 0.0));
        assert_eq!(s.get(2, 2), c(7.0, 0.0));
        assert_eq!(s.nnz(), 4);
    }

    proptest! {
        #[test]
        fn adjoint_is_an_involution(entries in proptest::collection::vec(
            (0usize..6, 0usize..6, -3.0f64..3.0, -3.0f64..3.0), 0..30)
        ) {
            let m = CsrMatrix::from_triplets(6, entries.into_iter().map(|(r, c, a, b)| (r, c, C64::new(a, b))));
            prop_assert_eq!(m.adjoint().adjoint(), m);
        }
    }
}
