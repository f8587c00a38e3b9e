use std::fmt;

use crate::error::{Error, Result};

/// One tensor factor of a composite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    /// Finite-dimensional qudit; the models only ever use `dim == 3`.
    Qudit { dim: usize },
    /// Boson mode truncated to |0>..|n_max>.
    Fock { n_max: usize },
}

impl Factor {
    pub const fn qutrit() -> Self {
        Factor::Qudit { dim: 3 }
    }

    pub const fn fock(n_max: usize) -> Self {
        Factor::Fock { n_max }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Factor::Qudit { dim } => dim,
            Factor::Fock { n_max } => n_max + 1,
        }
    }

    pub fn is_fock(&self) -> bool {
        matches!(self, Factor::Fock { .. })
    }

    pub fn is_qutrit(&self) -> bool {
        matches!(self, Factor::Qudit { dim: 3 })
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Qudit { dim } => write!(f, "Qudit({dim})"),
            Factor::Fock { n_max } => write!(f, "Fock({n_max})"),
        }
    }
}

/// Ordered tensor product of factors. Basis indices are row-major over the
/// factors in declared order, so the last factor varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl HilbertSpace {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::ShapeMismatch("a space needs at least one factor".into()));
        }
        for f in &factors {
            match *f {
                Factor::Qudit { dim } if dim < 2 => return Err(Error::InvalidQuditDimension(dim)),
                Factor::Fock { n_max } if n_max < 1 => return Err(Error::InvalidTruncation(n_max)),
                _ => {}
            }
        }
        let dims: Vec<usize> = factors.iter().map(Factor::dim).collect();
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let dim = dims.iter().product();
        Ok(Self {
            factors,
            dims,
            strides,
            dim,
        })
    }

    /// Qutrit tensor one boson mode.
    pub fn qutrit_fock(n_max: usize) -> Result<Self> {
        Self::new(vec![Factor::qutrit(), Factor::fock(n_max)])
    }

    /// Qutrit tensor two boson modes with equal truncation.
    pub fn qutrit_fock2(n_max: usize) -> Result<Self> {
        Self::new(vec![Factor::qutrit(), Factor::fock(n_max), Factor::fock(n_max)])
    }

    pub fn fock(n_max: usize) -> Result<Self> {
        Self::new(vec![Factor::fock(n_max)])
    }

    pub fn fock2(n_max: usize) -> Result<Self> {
        Self::new(vec![Factor::fock(n_max), Factor::fock(n_max)])
    }

    pub fn qudit(dim: usize) -> Result<Self> {
        Self::new(vec![Factor::Qudit { dim }])
    }

    pub fn single(factor: Factor) -> Result<Self> {
        Self::new(vec![factor])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, slot: usize) -> Result<Factor> {
        self.factors.get(slot).copied().ok_or(Error::IndexOutOfRange {
            index: slot,
            len: self.factors.len(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stride(&self, slot: usize) -> usize {
        self.strides[slot]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Slots holding Fock modes, in declared order.
    pub fn fock_slots(&self) -> Vec<usize> {
        (0..self.factors.len())
            .filter(|&i| self.factors[i].is_fock())
            .collect()
    }

    pub fn qudit_slots(&self) -> Vec<usize> {
        (0..self.factors.len())
            .filter(|&i| !self.factors[i].is_fock())
            .collect()
    }

    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found: levels.len(),
            });
        }
        let mut idx = 0;
        for ((&l, &d), &s) in levels.iter().zip(&self.dims).zip(&self.strides) {
            if l >= d {
                return Err(Error::ValueOutOfRange { index: l, bound: d });
            }
            idx += l * s;
        }
        Ok(idx)
    }

    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &s) in self.strides.iter().enumerate() {
            out[slot] = index / s;
            index %= s;
        }
        out
    }

    /// Level of a single factor for a flat basis index.
    #[inline]
    pub fn level(&self, index: usize, slot: usize) -> usize {
        (index / self.strides[slot]) % self.dims[slot]
    }

    /// Space obtained by removing the given slots.
    pub fn without(&self, slots: &[usize]) -> Result<Self> {
        let kept: Vec<Factor> = self
            .factors
            .iter()
            .enumerate()
            .filter(|(i, _)| !slots.contains(i))
            .map(|(_, f)| *f)
            .collect();
        Self::new(kept)
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}
