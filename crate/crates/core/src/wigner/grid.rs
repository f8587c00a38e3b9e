use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{PhasePoint, SystemKind, WignerEvaluator};
use crate::error::{Error, Result};
use crate::operators::omega;
use crate::states::DensityMatrix;

/// Two-dimensional section `w -> (z1, z2)` of the two-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneSection {
    /// `(scale * w, scale * w^*)`.
    Diagonal { scale: f64 },
    /// Plane through the blobs of qutrit coordinate `b` that shows the
    /// interference fringes:
    /// `z1 = w^b [cos(pi/4 + 2 pi b/3) Re w + sin(pi/4 + 2 pi b/3) Im w]`,
    /// `z2 = w^{-b} [cos(pi/4 - 2 pi b/3) Re w - sin(pi/4 - 2 pi b/3) Im w]`.
    Fringe { b: i64 },
    /// One-mode systems: `z = w`.
    Single,
}

impl PlaneSection {
    /// `Diagonal` with `scale = 1/sqrt(2)`.
    pub fn diagonal() -> Self {
        PlaneSection::Diagonal {
            scale: FRAC_1_SQRT_2,
        }
    }

    pub fn map(&self, w: C64) -> (C64, C64) {
        match *self {
            PlaneSection::Diagonal { scale } => (w * scale, w.conj() * scale),
            PlaneSection::Fringe { b } => {
                let t1 = PI / 4.0 + 2.0 * PI * b as f64 / 3.0;
                let t2 = PI / 4.0 - 2.0 * PI * b as f64 / 3.0;
                let z1 = omega(b) * (t1.cos() * w.re + t1.sin() * w.im);
                let z2 = omega(-b) * (t2.cos() * w.re - t2.sin() * w.im);
                (z1, z2)
            }
            PlaneSection::Single => (w, C64::new(0.0, 0.0)),
        }
    }

    /// Human-readable map, recorded next to exported grids.
    pub fn describe(&self) -> String {
        match *self {
            PlaneSection::Diagonal { scale } => {
                format!("diag: z1 = {scale:.12} * w, z2 = {scale:.12} * conj(w)")
            }
            PlaneSection::Fringe { b } => format!(
                "fringe(b={b}): z1 = omega^{b} * (cos(pi/4 + 2pi*{b}/3) Re w + sin(pi/4 + 2pi*{b}/3) Im w), \
                 z2 = omega^-{b} * (cos(pi/4 - 2pi*{b}/3) Re w - sin(pi/4 - 2pi*{b}/3) Im w)"
            ),
            PlaneSection::Single => "single: z = w".into(),
        }
    }
}

/// Wigner values on a square grid of `w`, row-major with rows along `Im w`
/// and columns along `Re w`, both ascending.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub section: PlaneSection,
    pub system: SystemKind,
    pub extent: f64,
    pub resolution: usize,
    pub qutrit_coords: Option<(i64, i64)>,
    pub w_samples: Vec<C64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }

    pub fn sample(&self, row: usize, col: usize) -> C64 {
        self.w_samples[row * self.resolution + col]
    }

    /// Grid spacing in `w`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.resolution - 1) as f64
    }

    /// `(row, col, value)` of the largest value; the first one on ties.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let (i, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (i / self.resolution, i % self.resolution, v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Row-major `w` samples over `[-extent, extent]^2`.
pub fn sample_points(extent: f64, resolution: usize) -> Vec<C64> {
    let step = 2.0 * extent / (resolution - 1) as f64;
    (0..resolution)
        .flat_map(|r| {
            (0..resolution).map(move |c| C64::new(-extent + step * c as f64, -extent + step * r as f64))
        })
        .collect()
}

fn point_for(kind: SystemKind, z1: C64, z2: C64, ab: Option<(i64, i64)>) -> Result<PhasePoint> {
    let (a, b) = ab.unwrap_or((0, 0));
    match (kind, ab) {
        (SystemKind::Boson, None) => Ok(PhasePoint::Boson { z: z1 }),
        (SystemKind::TwoBoson, None) => Ok(PhasePoint::TwoBoson { z1, z2 }),
        (SystemKind::QutritBoson, Some(_)) => Ok(PhasePoint::QutritBoson { z: z1, a, b }),
        (SystemKind::QutritTwoBoson, Some(_)) => Ok(PhasePoint::QutritTwoBoson { z1, z2, a, b }),
        (SystemKind::Qutrit, _) => Err(Error::ShapeMismatch(
            "a qutrit alone has no continuous phase-space section".into(),
        )),
        (k, _) => Err(Error::ShapeMismatch(format!(
            "qutrit coordinates {} for a {} state",
            if ab.is_some() { "given" } else { "missing" },
            k.name()
        ))),
    }
}

fn validate(extent: f64, resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidParams(format!("resolution must be >= 2, got {resolution}")));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::InvalidParams(format!("extent must be positive, got {extent}")));
    }
    Ok(())
}

/// Wigner function of `rho` sampled over a plane section.
pub fn wigner_grid(
    rho: &DensityMatrix,
    section: PlaneSection,
    extent: f64,
    resolution: usize,
    qutrit_coords: Option<(i64, i64)>,
) -> Result<WignerGrid> {
    match qutrit_coords {
        Some(ab) => Ok(wigner_panels(rho, section, extent, resolution, &[ab])?.remove(0)),
        None => {
            validate(extent, resolution)?;
            let ev = WignerEvaluator::new(rho)?;
            let w_samples = sample_points(extent, resolution);
            let values = w_samples
                .par_iter()
                .map(|&w| {
                    let (z1, z2) = section.map(w);
                    ev.value(&point_for(ev.kind(), z1, z2, None)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(WignerGrid {
                section,
                system: ev.kind(),
                extent,
                resolution,
                qutrit_coords: None,
                w_samples,
                values,
            })
        }
    }
}

/// Several qutrit-coordinate panels over the same section, sharing the
/// boson-kernel work at each sample.
pub fn wigner_panels(
    rho: &DensityMatrix,
    section: PlaneSection,
    extent: f64,
    resolution: usize,
    coords: &[(i64, i64)],
) -> Result<Vec<WignerGrid>> {
    validate(extent, resolution)?;
    let ev = WignerEvaluator::new(rho)?;
    if !ev.kind().has_qutrit() {
        return Err(Error::ShapeMismatch(format!(
            "{} state has no qutrit panels",
            ev.kind().name()
        )));
    }
    point_for(ev.kind(), C64::new(0.0, 0.0), C64::new(0.0, 0.0), Some((0, 0)))?;
    let w_samples = sample_points(extent, resolution);
    let tables = w_samples
        .par_iter()
        .map(|&w| {
            let (z1, z2) = section.map(w);
            ev.qutrit_table(z1, z2)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(coords
        .iter()
        .map(|&(a, b)| {
            let (ia, ib) = (a.rem_euclid(3) as usize, b.rem_euclid(3) as usize);
            WignerGrid {
                section,
                system: ev.kind(),
                extent,
                resolution,
                qutrit_coords: Some((a, b)),
                w_samples: w_samples.clone(),
                values: tables.iter().map(|t| t[ia][ib]).collect(),
            }
        })
        .collect())
}
