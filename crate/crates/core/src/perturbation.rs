//! First-order energies of the ground triplet and exact-versus-perturbative
//! sweeps over the coupling.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{build_hamiltonian, build_parity, magnetic_levels, ModelId, SectorIndex};
use crate::operators::{lowest_eigenpairs, omega, Operator};
use crate::params::ModelParams;
use crate::states::{cat_state, CatKind};

fn unsupported(model: ModelId, op: &str) -> Error {
    Error::UnsupportedModel {
        model: model.to_string(),
        operation: op.into(),
    }
}

/// First-order splitting `eps_k` of the ground triplet.
///
/// `R1`: `2B exp(-3 s^2 / 2) cos(2 pi k / 3 + phi - sqrt(3) s^2 / 2)`;
/// `R2`: `2B exp(-3 s^2) cos(2 pi k / 3 + phi)`, with `s = lambda / Omega`.
pub fn perturbative_correction(model: ModelId, params: &ModelParams, k: SectorIndex) -> Result<f64> {
    params.validate()?;
    let s2 = params.alpha().powi(2);
    let base = 2.0 * PI * k.value() as f64 / 3.0 + params.phi;
    match model {
        ModelId::R1 => Ok(2.0
            * params.b_field
            * (-1.5 * s2).exp()
            * (base - 0.75f64.sqrt() * s2).cos()),
        ModelId::R2 => Ok(2.0 * params.b_field * (-3.0 * s2).exp() * base.cos()),
        _ => Err(unsupported(model, "perturbative_correction")),
    }
}

/// Full first-order estimate `eps_k - m lambda^2 / Omega`, `m` the number of modes.
pub fn perturbative_energy(model: ModelId, params: &ModelParams, k: SectorIndex) -> Result<f64> {
    Ok(perturbative_correction(model, params, k)? - energy_offset(model, params))
}

/// `m lambda^2 / Omega`, the shift removed from exact energies.
pub fn energy_offset(model: ModelId, params: &ModelParams) -> f64 {
    model.modes() as f64 * params.lambda * params.lambda / params.omega
}

/// Matrix `<psi_k| V |psi_l>` of the qutrit field term between the cat
/// states with `alpha = lambda / Omega` (one-mode cats for `R1`, two-mode
/// cats for `R2`). Its diagonal is the first-order correction.
pub fn cat_perturbation_matrix(
    model: ModelId,
    params: &ModelParams,
    n_max: usize,
) -> Result<[[C64; 3]; 3]> {
    let kind = match model {
        ModelId::R1 => CatKind::Qb1,
        ModelId::R2 => CatKind::Q2b,
        _ => return Err(unsupported(model, "cat_perturbation_matrix")),
    };
    let space = model.space(n_max)?;
    let levels = magnetic_levels(params);
    let v = Operator::real_diagonal(&space, |i| levels[space.level(i, 0)]);
    let alpha = C64::new(params.alpha(), 0.0);
    let cats = SectorIndex::ALL
        .iter()
        .map(|&k| cat_state(kind, k, alpha, n_max))
        .collect::<Result<Vec<_>>>()?;
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = v.matrix_element(&cats[r], &cats[c])?;
        }
    }
    Ok(out)
}

/// Nearest sector label for a parity expectation value.
pub fn nearest_sector(expectation: C64) -> SectorIndex {
    let k = (0..3)
        .min_by(|&a, &b| {
            let da = (expectation - omega(a)).norm();
            let db = (expectation - omega(b)).norm();
            da.total_cmp(&db)
        })
        .unwrap();
    SectorIndex::wrapping(k)
}

/// Exact and perturbative data at one coupling.
#[derive(Debug, Clone)]
pub struct SpectrumPoint {
    pub lambda: f64,
    /// Lowest energies plus `m lambda^2 / Omega`, ascending.
    pub exact: Vec<f64>,
    /// Sector label of each exact level from its parity expectation.
    pub labels: Vec<SectorIndex>,
    /// `eps_k` for `k = 0, 1, 2`, where a closed form exists.
    pub perturbative: Option<[f64; 3]>,
}

impl SpectrumPoint {
    /// Offset-removed exact energy of the lowest level labelled `k`.
    pub fn exact_for_sector(&self, k: SectorIndex) -> Option<f64> {
        self.exact
            .iter()
            .zip(&self.labels)
            .find(|(_, &l)| l == k)
            .map(|(&e, _)| e)
    }

    /// `max_k |exact_k - eps_k|` over the three sectors.
    pub fn max_deviation(&self) -> Option<f64> {
        let pert = self.perturbative?;
        SectorIndex::ALL
            .iter()
            .map(|&k| Some((self.exact_for_sector(k)? - pert[k.value()]).abs()))
            .try_fold(0.0f64, |m, d| Some(m.max(d?)))
    }
}

/// Sweep of the low spectrum over a coupling grid.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub model: ModelId,
    pub params: ModelParams,
    pub truncation: usize,
    pub count: usize,
    pub lambda_grid: Vec<f64>,
    /// One entry per grid point, in grid order; failures do not stop the sweep.
    pub points: Vec<std::result::Result<SpectrumPoint, Error>>,
}

impl SpectrumResult {
    pub fn failures(&self) -> impl Iterator<Item = (f64, &Error)> + '_ {
        self.lambda_grid
            .iter()
            .zip(&self.points)
            .filter_map(|(&l, p)| p.as_ref().err().map(|e| (l, e)))
    }

    pub fn successful(&self) -> impl Iterator<Item = &SpectrumPoint> + '_ {
        self.points.iter().filter_map(|p| p.as_ref().ok())
    }

    /// Largest exact-versus-perturbative deviation over points with `lambda >= from`.
    pub fn max_deviation_from(&self, from: f64) -> Option<f64> {
        self.successful()
            .filter(|p| p.lambda >= from)
            .map(|p| p.max_deviation())
            .try_fold(0.0f64, |m, d| Some(m.max(d?)))
    }
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn sweep_point(
    model: ModelId,
    params: &ModelParams,
    count: usize,
    truncation: usize,
) -> Result<SpectrumPoint> {
    let space = model.space(truncation)?;
    let h = build_hamiltonian(model, params, &space)?;
    let parity = build_parity(model, &space)?;
    let pairs = lowest_eigenpairs(&h, count, 1e-10)?;
    let offset = energy_offset(model, params);
    let mut exact = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for p in &pairs {
        exact.push(p.value + offset);
        labels.push(nearest_sector(parity.expectation(&p.vector)?));
    }
    let perturbative = match model {
        ModelId::R1 | ModelId::R2 => {
            let mut e = [0.0; 3];
            for k in SectorIndex::ALL {
                e[k.value()] = perturbative_correction(model, params, k)?;
            }
            Some(e)
        }
        _ => None,
    };
    Ok(SpectrumPoint {
        lambda: params.lambda,
        exact,
        labels,
        perturbative,
    })
}

/// Exact lowest `count` levels and first-order values at each coupling.
pub fn spectrum_sweep(
    model: ModelId,
    params: &ModelParams,
    lambda_grid: &[f64],
    count: usize,
    truncation: usize,
) -> Result<SpectrumResult> {
    params.validate()?;
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParams("empty coupling grid".into()));
    }
    if count < 3 {
        return Err(Error::InvalidParams(format!("need at least 3 levels, got {count}")));
    }
    let grid_params = lambda_grid
        .iter()
        .map(|&l| {
            let p = params.with_lambda(l);
            p.validate().map(|_| p)
        })
        .collect::<Result<Vec<_>>>()?;
    let points = grid_params
        .par_iter()
        .map(|p| sweep_point(model, p, count, truncation))
        .collect();
    Ok(SpectrumResult {
        model,
        params: *params,
        truncation,
        count,
        lambda_grid: lambda_grid.to_vec(),
        points,
    })
}
