use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::PhasePoint;
use crate::error::{Error, Result};
use crate::models::SectorIndex;
use crate::operators::omega;
use crate::states::{cat_gram_norm_sq, z2_cat_norm_sq, CatKind};

/// Cat states with closed-form Wigner functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticCat {
    /// One-mode `|alpha> +- |-alpha>`.
    Z2 { plus: bool },
    /// Two-mode Z3 cat without qutrit.
    Z3TwoBoson { k: SectorIndex },
    /// Joint qutrit + two-mode Z3 cat.
    Z3Joint { k: SectorIndex },
}

/// Joint cat terms at fixed `(a, b)`, without the `1/(9 pi^2)` prefactor:
/// the coherent blob of branch `b` plus the interference of the other two.
fn joint_terms(k: SectorIndex, alpha: C64, z1: C64, z2: C64, a: i64, b: i64) -> f64 {
    let wb = omega(b);
    let wmb = omega(-b);
    let blob = (-2.0 * (alpha - wmb * z1).norm_sqr() - 2.0 * (alpha - wb * z2).norm_sqr()).exp();
    let env = (-0.5 * (alpha + 2.0 * wmb * z1).norm_sqr()
        - 0.5 * (alpha + 2.0 * wb * z2).norm_sqr())
    .exp();
    let phase = 2.0 * 3f64.sqrt() * (alpha * (wb * z1.conj() - wmb * z2.conj())).re
        + 2.0 * PI * (k.value() as i64 - a) as f64 / 3.0;
    blob + 2.0 * env * phase.cos()
}

/// Closed-form Wigner function of a cat state at `point`.
///
/// Normalization constants come from the Gram matrix of coherent overlaps.
/// For the joint cat the interference term enters with weight 2 and phase
/// `2 pi (k - a) / 3`; the two-mode cat is `3 / N3` times the sum over `b`
/// of the joint terms at `a = 0`.
pub fn analytic_cat_wigner(kind: AnalyticCat, alpha: C64, point: &PhasePoint) -> Result<f64> {
    match (kind, *point) {
        (AnalyticCat::Z2 { plus }, PhasePoint::Boson { z }) => {
            let n2 = z2_cat_norm_sq(plus, alpha);
            let s = if plus { 1.0 } else { -1.0 };
            let v = (-2.0 * (alpha - z).norm_sqr()).exp()
                + (-2.0 * (alpha + z).norm_sqr()).exp()
                + s * 2.0 * (-2.0 * z.norm_sqr()).exp() * (4.0 * (alpha * z.conj()).im).cos();
            Ok(v / (PI * n2))
        }
        (AnalyticCat::Z3TwoBoson { k }, PhasePoint::TwoBoson { z1, z2 }) => {
            let n3 = cat_gram_norm_sq(CatKind::B2, k, alpha);
            let sum: f64 = (0..3).map(|b| joint_terms(k, alpha, z1, z2, 0, b)).sum();
            Ok(sum / (PI * PI * n3))
        }
        (AnalyticCat::Z3Joint { k }, PhasePoint::QutritTwoBoson { z1, z2, a, b }) => {
            Ok(joint_terms(k, alpha, z1, z2, a, b) / (9.0 * PI * PI))
        }
        (kind, point) => Err(Error::ShapeMismatch(format!(
            "closed form {kind:?} cannot be evaluated at {point:?}"
        ))),
    }
}
