//! Boson, qutrit and joint qutrit-boson Wigner functions.
//!
//! Conventions: `W_B = (1/pi) Tr[rho D(2z) Pi]` per mode with
//! `z = (q + ip)/sqrt(2)` (normalized over `dq dp`), `W_Q = (1/3) Tr[rho
//! D_Q(2q, 2p) Pi_Q]` for the qutrit, and products of kernels and prefactors
//! for composite systems, so the joint qutrit + two-mode prefactor is
//! `1 / (3 pi^2)`.

mod analytic;
mod grid;
mod kernel;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{Factor, HilbertSpace};
use crate::states::DensityMatrix;

pub use analytic::{analytic_cat_wigner, AnalyticCat};
pub use grid::{wigner_grid, wigner_panels, PlaneSection, WignerGrid};
pub use kernel::{
    boson_kernel, displacement, displacement_elements, qutrit_displacement, qutrit_kernel,
    qutrit_parity,
};

/// Largest imaginary part of a trace accepted before it is discarded.
pub const IMAG_TOL: f64 = 1e-10;

/// Phase-space coordinates; the variant must match the system of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasePoint {
    Boson { z: C64 },
    TwoBoson { z1: C64, z2: C64 },
    Qutrit { q: i64, p: i64 },
    QutritBoson { z: C64, a: i64, b: i64 },
    QutritTwoBoson { z1: C64, z2: C64, a: i64, b: i64 },
}

/// Shape of a system whose Wigner function can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Boson,
    TwoBoson,
    Qutrit,
    QutritBoson,
    QutritTwoBoson,
}

impl SystemKind {
    pub fn of(space: &HilbertSpace) -> Result<Self> {
        use Factor::*;
        match space.factors() {
            [Fock { .. }] => Ok(SystemKind::Boson),
            [Fock { .. }, Fock { .. }] => Ok(SystemKind::TwoBoson),
            [Qudit { dim: 3 }] => Ok(SystemKind::Qutrit),
            [Qudit { dim: 3 }, Fock { .. }] => Ok(SystemKind::QutritBoson),
            [Qudit { dim: 3 }, Fock { .. }, Fock { .. }] => Ok(SystemKind::QutritTwoBoson),
            _ => Err(Error::ShapeMismatch(format!(
                "no Wigner function for a system on {space}"
            ))),
        }
    }

    pub fn has_qutrit(self) -> bool {
        matches!(
            self,
            SystemKind::Qutrit | SystemKind::QutritBoson | SystemKind::QutritTwoBoson
        )
    }

    pub fn modes(self) -> usize {
        match self {
            SystemKind::Qutrit => 0,
            SystemKind::Boson | SystemKind::QutritBoson => 1,
            SystemKind::TwoBoson | SystemKind::QutritTwoBoson => 2,
        }
    }

    /// `3^{-[qutrit]} pi^{-modes}`
    pub fn prefactor(self) -> f64 {
        let q = if self.has_qutrit() { 1.0 / 3.0 } else { 1.0 };
        q / PI.powi(self.modes() as i32)
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Boson => "boson",
            SystemKind::TwoBoson => "two-boson",
            SystemKind::Qutrit => "qutrit",
            SystemKind::QutritBoson => "qutrit-boson",
            SystemKind::QutritTwoBoson => "qutrit-two-boson",
        }
    }
}

impl PhasePoint {
    fn kind(&self) -> SystemKind {
        match self {
            PhasePoint::Boson { .. } => SystemKind::Boson,
            PhasePoint::TwoBoson { .. } => SystemKind::TwoBoson,
            PhasePoint::Qutrit { .. } => SystemKind::Qutrit,
            PhasePoint::QutritBoson { .. } => SystemKind::QutritBoson,
            PhasePoint::QutritTwoBoson { .. } => SystemKind::QutritTwoBoson,
        }
    }

    /// `(z1, z2)`; absent modes are `0`.
    fn modes(&self) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        match *self {
            PhasePoint::Boson { z } | PhasePoint::QutritBoson { z, .. } => (z, zero),
            PhasePoint::TwoBoson { z1, z2 } | PhasePoint::QutritTwoBoson { z1, z2, .. } => {
                (z1, z2)
            }
            PhasePoint::Qutrit { .. } => (zero, zero),
        }
    }

    fn qutrit(&self) -> Option<(i64, i64)> {
        match *self {
            PhasePoint::Qutrit { q, p } => Some((q, p)),
            PhasePoint::QutritBoson { a, b, .. } | PhasePoint::QutritTwoBoson { a, b, .. } => {
                Some((a, b))
            }
            _ => None,
        }
    }
}

/// A density matrix split into qutrit blocks, each reshaped to a
/// `mode1 x mode2` matrix, ready for repeated kernel evaluation.
#[derive(Debug, Clone)]
pub struct WignerEvaluator {
    kind: SystemKind,
    d1: usize,
    d2: usize,
    /// (weight, per-qutrit-level block)
    comps: Vec<(f64, Vec<DMatrix<C64>>)>,
}

impl WignerEvaluator {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let space = rho.space();
        let kind = SystemKind::of(space)?;
        let dims = space.dims();
        let off = usize::from(kind.has_qutrit());
        let nq = if kind.has_qutrit() { 3 } else { 1 };
        let d1 = dims.get(off).copied().unwrap_or(1);
        let d2 = dims.get(off + 1).copied().unwrap_or(1);
        let comps = rho
            .components()
            .iter()
            .map(|(w, v)| {
                let a = v.amplitudes();
                let blocks = (0..nq)
                    .map(|q| DMatrix::from_fn(d1, d2, |r, c| a[(q * d1 + r) * d2 + c]))
                    .collect();
                (*w, blocks)
            })
            .collect();
        Ok(Self {
            kind,
            d1,
            d2,
            comps,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    fn mode_kernel(&self, z: C64, d: usize) -> DMatrix<C64> {
        if d == 1 {
            DMatrix::identity(1, 1)
        } else {
            boson_kernel(z, d - 1)
        }
    }

    /// `G[q][q'] = sum_w w <v_q|(K1 x K2)|v_q'>` at the given mode coordinates.
    fn gram(&self, z1: C64, z2: C64) -> Vec<Vec<C64>> {
        let k1 = self.mode_kernel(z1, self.d1);
        let k2t = self.mode_kernel(z2, self.d2).transpose();
        let nq = if self.kind.has_qutrit() { 3 } else { 1 };
        let mut g = vec![vec![C64::new(0.0, 0.0); nq]; nq];
        for (w, blocks) in &self.comps {
            let applied: Vec<DMatrix<C64>> = blocks.iter().map(|v| &k1 * v * &k2t).collect();
            for (q, vq) in blocks.iter().enumerate() {
                for (qp, kv) in applied.iter().enumerate() {
                    g[q][qp] += vq.dotc(kv) * *w;
                }
            }
        }
        g
    }

    fn finish(&self, t: C64) -> Result<f64> {
        if t.im.abs() > IMAG_TOL {
            return Err(Error::InvalidDensity(format!(
                "Wigner trace has imaginary part {:.3e}",
                t.im
            )));
        }
        Ok(self.kind.prefactor() * t.re)
    }

    fn contract(g: &[Vec<C64>], a: i64, b: i64) -> C64 {
        let kq = qutrit_kernel(a, b);
        let mut t = C64::new(0.0, 0.0);
        for q in 0..3 {
            for qp in 0..3 {
                t += kq[q][qp] * g[q][qp];
            }
        }
        t
    }

    pub fn value(&self, point: &PhasePoint) -> Result<f64> {
        if point.kind() != self.kind {
            return Err(Error::ShapeMismatch(format!(
                "{} phase point for a {} state",
                point.kind().name(),
                self.kind.name()
            )));
        }
        let (z1, z2) = point.modes();
        let g = self.gram(z1, z2);
        let t = match point.qutrit() {
            Some((a, b)) => Self::contract(&g, a, b),
            None => g[0][0],
        };
        self.finish(t)
    }

    /// Values at all nine qutrit coordinates `[a][b]` for fixed mode coordinates.
    pub fn qutrit_table(&self, z1: C64, z2: C64) -> Result<[[f64; 3]; 3]> {
        if !self.kind.has_qutrit() {
            return Err(Error::ShapeMismatch(format!(
                "{} state has no qutrit coordinates",
                self.kind.name()
            )));
        }
        let g = self.gram(z1, z2);
        let mut out = [[0.0; 3]; 3];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.finish(Self::contract(&g, a as i64, b as i64))?;
            }
        }
        Ok(out)
    }
}

/// Wigner function of `rho` at `point`.
pub fn wigner_value(rho: &DensityMatrix, point: &PhasePoint) -> Result<f64> {
    WignerEvaluator::new(rho)?.value(point)
}
