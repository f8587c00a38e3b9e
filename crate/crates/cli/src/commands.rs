use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use qrabi_core::operators::Factor;
use qrabi_core::perturbation::spectrum_sweep;
use qrabi_core::states::{cat_state, check_truncation, reference_density, z2_cat_state};
use qrabi_core::verify::run_verification_with;
use qrabi_core::wigner::{wigner_grid, wigner_panels, PlaneSection, SystemKind, WignerGrid};
use qrabi_core::{build_hamiltonian, lowest_eigenpairs, Complex64, DensityMatrix, HilbertSpace};

use crate::config::{RunConfig, StateKind};
use crate::output::{fmt_num, Csv, OutputSet};

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub summary: String,
    /// False only when the command ran but its verdict is negative (`verify`).
    pub success: bool,
}

fn param_lines(cfg: &RunConfig) -> Result<String> {
    let p = &cfg.params;
    Ok(format!(
        "model = {}\nomega = {}\nb-field = {}\nphi = {}\nlambda = {}\ntruncation = {}\n",
        cfg.model,
        fmt_num(p.omega)?,
        fmt_num(p.b_field)?,
        fmt_num(p.phi)?,
        fmt_num(p.lambda)?,
        cfg.truncation
    ))
}

/// `spectrum.csv`: offset-removed exact low triplet and first-order values
/// over the coupling grid.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.lambda_grid.values();
    let result = spectrum_sweep(cfg.model, &cfg.params, &grid, 3, cfg.truncation)?;
    if let Some((lambda, err)) = result.failures().next() {
        bail!("spectrum failed at lambda = {lambda}: {err}");
    }
    let mut csv = Csv::new(&[
        "lambda", "exact_e0", "exact_e1", "exact_e2", "pert_k0", "pert_k1", "pert_k2",
    ]);
    for point in result.successful() {
        let mut row = vec![fmt_num(point.lambda)?];
        for &e in &point.exact {
            row.push(fmt_num(e)?);
        }
        match point.perturbative {
            Some(eps) => {
                for e in eps {
                    row.push(fmt_num(e)?);
                }
            }
            None => row.extend(std::iter::repeat_n(String::new(), 3)),
        }
        csv.row(&row);
    }
    let mut out = OutputSet::default();
    out.add("spectrum.csv", csv.into_string());
    let written = out.commit(&cfg.out)?;
    let summary = match result.max_deviation_from(f64::NEG_INFINITY) {
        Some(d) => format!(
            "{} points, max |exact - first order| = {}",
            grid.len(),
            fmt_num(d)?
        ),
        None => format!("{} points (no closed form for {})", grid.len(), cfg.model),
    };
    Ok(Outcome {
        written,
        summary,
        success: true,
    })
}

/// Density matrix of the configured state.
pub fn build_state(cfg: &RunConfig) -> Result<DensityMatrix> {
    let w = &cfg.wigner;
    let alpha = Complex64::new(w.alpha, 0.0);
    let n = cfg.truncation;
    Ok(match w.kind {
        StateKind::Ground => {
            let space = cfg.model.space(n)?;
            let h = build_hamiltonian(cfg.model, &cfg.params, &space)?;
            let pair = lowest_eigenpairs(&h, 1, 1e-10)?.remove(0);
            DensityMatrix::from_pure(pair.vector)
        }
        StateKind::Cat(kind) => DensityMatrix::from_pure(cat_state(kind, w.k, alpha, n)?),
        StateKind::Reference(kind) => reference_density(kind, w.k, alpha, n)?,
        StateKind::Z2 { plus } => DensityMatrix::from_pure(z2_cat_state(plus, alpha, n)?),
    })
}

fn grid_csv(g: &WignerGrid) -> Result<String> {
    let mut csv = Csv::new(&["re_w", "im_w", "value"]);
    for (w, &v) in g.w_samples.iter().zip(&g.values) {
        csv.row(&[fmt_num(w.re)?, fmt_num(w.im)?, fmt_num(v)?]);
    }
    Ok(csv.into_string())
}

/// Wigner panels of the configured state over a plane section, plus `meta.txt`.
pub fn cmd_wigner(cfg: &RunConfig) -> Result<Outcome> {
    let w = &cfg.wigner;
    let rho = build_state(cfg)?;
    let system = SystemKind::of(rho.space())?;
    let section = if system.modes() == 1 {
        PlaneSection::Single
    } else {
        w.plane_section()
    };
    let grids = if system.has_qutrit() {
        let coords: Vec<(i64, i64)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        wigner_panels(&rho, section, w.extent, w.resolution, &coords)?
    } else {
        vec![wigner_grid(&rho, section, w.extent, w.resolution, None)?]
    };
    let mut out = OutputSet::default();
    let mut meta = format!(
        "command = wigner\n{}state = {}\nk = {}\nalpha = {}\nsystem = {}\nsection = {}\n\
         section-map = {}\nextent = {}\nresolution = {}\nspacing = {}\n\
         layout = row-major, rows along im_w ascending, columns along re_w ascending\n\
         prefactor = {}\n",
        param_lines(cfg)?,
        w.kind.name(),
        w.k.value(),
        fmt_num(w.alpha)?,
        system.name(),
        match section {
            PlaneSection::Diagonal { .. } => "diag",
            PlaneSection::Fringe { .. } => "fringe",
            PlaneSection::Single => "single",
        },
        section.describe(),
        fmt_num(w.extent)?,
        w.resolution,
        fmt_num(grids[0].spacing())?,
        fmt_num(system.prefactor())?,
    );
    for g in &grids {
        let name = match g.qutrit_coords {
            Some((a, b)) => format!("wigner_a{a}_b{b}.csv"),
            None => "wigner.csv".into(),
        };
        let (r, c, v) = g.argmax();
        let s = g.sample(r, c);
        meta.push_str(&format!(
            "max[{}] = {} at w = ({}, {}) cell ({r}, {c})\n",
            name,
            fmt_num(v)?,
            fmt_num(s.re)?,
            fmt_num(s.im)?
        ));
        out.add(name, grid_csv(g)?);
    }
    out.add("meta.txt", meta);
    let written = out.commit(&cfg.out)?;
    Ok(Outcome {
        summary: format!("{} panel(s) of {} points", grids.len(), grids[0].values.len()),
        written,
        success: true,
    })
}

/// Verification report as `verify.txt` and `verify.kv`.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.truncation < 20 {
        bail!("verification needs truncation >= 20, got {}", cfg.truncation);
    }
    check_truncation(cfg.wigner.alpha, cfg.truncation)
        .with_context(|| format!("cat states with alpha = {}", cfg.wigner.alpha))?;
    let report = run_verification_with(cfg.params, cfg.truncation, cfg.wigner.alpha);
    let text = report.render_text();
    let mut out = OutputSet::default();
    out.add("verify.txt", text.clone());
    out.add("verify.kv", report.render_kv());
    let written = out.commit(&cfg.out)?;
    Ok(Outcome {
        written,
        summary: text,
        success: report.overall,
    })
}

fn level_names(space: &HilbertSpace) -> Vec<String> {
    let modes = space.fock_slots().len();
    let mut mode = 0;
    space
        .factors()
        .iter()
        .map(|f| match f {
            Factor::Qudit { .. } => "q".to_string(),
            Factor::Fock { .. } => {
                mode += 1;
                if modes == 1 {
                    "n".into()
                } else {
                    format!("n{mode}")
                }
            }
        })
        .collect()
}

/// `state.csv`: every amplitude of every ensemble component.
pub fn cmd_state(cfg: &RunConfig) -> Result<Outcome> {
    let rho = build_state(cfg)?;
    let space = rho.space();
    let names = level_names(space);
    let mut header = vec!["component", "weight", "index"];
    header.extend(names.iter().map(|s| s.as_str()));
    header.extend(["re", "im"]);
    let mut csv = Csv::new(&header);
    for (ci, (weight, v)) in rho.components().iter().enumerate() {
        let wt = fmt_num(*weight)?;
        for (i, a) in v.amplitudes().iter().enumerate() {
            let mut row = vec![ci.to_string(), wt.clone(), i.to_string()];
            row.extend(space.levels_of(i).iter().map(|l| l.to_string()));
            row.push(fmt_num(a.re)?);
            row.push(fmt_num(a.im)?);
            csv.row(&row);
        }
    }
    let mut out = OutputSet::default();
    out.add("state.csv", csv.into_string());
    let written = out.commit(&cfg.out)?;
    Ok(Outcome {
        written,
        summary: format!(
            "{} on {} ({} component(s), dim {})",
            cfg.wigner.kind.name(),
            space,
            rho.components().len(),
            space.dim()
        ),
        success: true,
    })
}
