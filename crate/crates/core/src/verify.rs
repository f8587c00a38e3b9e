//! One-shot verification suite over the symmetry, frame, equivalence and
//! Wigner-kernel identities of the models.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::{
    build_hamiltonian, build_parity, build_transformed_hamiltonian, interior_columns,
    qho2d_hamiltonian, sector_lowest_eigenvalues, sector_projector, su2_generators, ModelId,
    SectorIndex,
};
use crate::operators::{
    fock_annihilation, lowest_eigenvalues, omega, qudit_clock_shift, HilbertSpace, Operator,
};
use crate::params::ModelParams;
use crate::states::{cat_state, check_truncation, CatKind, DensityMatrix};
use crate::wigner::{analytic_cat_wigner, qutrit_kernel, AnalyticCat, WignerEvaluator};

const EIG_TOL: f64 = 1e-10;

/// How a measured value is judged against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `value <= tol`.
    AtMost,
    /// `|value - target| <= tol`.
    Near(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tol: f64,
    pub criterion: Criterion,
    pub context: String,
}

impl Check {
    fn judge(name: &str, value: f64, tol: f64, criterion: Criterion, context: String) -> Self {
        let passed = match criterion {
            Criterion::AtMost => value <= tol,
            Criterion::Near(t) => (value - t).abs() <= tol,
        };
        Check {
            name: name.into(),
            passed,
            value,
            tol,
            criterion,
            context,
        }
    }

    fn failed(name: &str, tol: f64, criterion: Criterion, err: &Error) -> Self {
        Check {
            name: name.into(),
            passed: false,
            value: f64::NAN,
            tol,
            criterion,
            context: format!("error: {err}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.11e}")
    }
}

impl VerificationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let overall = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self { checks, overall }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Aligned, human-readable table followed by the overall verdict.
    pub fn render_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let rel = match c.criterion {
                Criterion::AtMost => format!("<= {}", num(c.tol)),
                Criterion::Near(t) => format!("within {} of {}", num(c.tol), num(t)),
            };
            let _ = writeln!(
                out,
                "{:<4} {:<width$}  {}  ({rel})  [{}]",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                num(c.value),
                c.context,
            );
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(
            out,
            "overall: {} ({passed}/{} checks passed)",
            if self.overall { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        out
    }

    /// One `key=value; ...` line per check plus a final `overall=` line.
    pub fn render_kv(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let target = match c.criterion {
                Criterion::AtMost => String::new(),
                Criterion::Near(t) => format!("; target={}", num(t)),
            };
            let _ = writeln!(
                out,
                "check.name={}; status={}; value={}; tol={}{target}; context={}",
                c.name,
                if c.passed { "pass" } else { "fail" },
                num(c.value),
                num(c.tol),
                c.context,
            );
        }
        let _ = writeln!(out, "overall={}", if self.overall { "pass" } else { "fail" });
        out
    }
}

fn max_on<F: Fn(usize) -> bool>(op: &Operator, keep: F) -> f64 {
    op.matrix()
        .iter()
        .filter(|&(_, c, _)| keep(c))
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max)
}

fn shell(space: &HilbertSpace, index: usize) -> usize {
    space.fock_slots().iter().map(|&s| space.level(index, s)).sum()
}

/// Distinct values (clustered within `thr`) with multiplicities.
pub fn cluster_levels(values: &[f64], thr: f64) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((_, n, last)) if v - *last <= thr => {
                *n += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(v, n, _)| (v, n)).collect()
}

/// Compare the distinct levels of two low spectra below the energy both
/// resolve completely. Returns the largest distance from a level of either
/// set to the nearest level of the other, and whether any multiplicity differs.
fn compare_level_sets(a: &[f64], b: &[f64], thr: f64) -> (f64, bool) {
    let top = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = top(a).min(top(b)) - 10.0 * thr;
    let below = |v: &[f64]| {
        cluster_levels(v, thr)
            .into_iter()
            .filter(|&(e, _)| e < cut)
            .collect::<Vec<_>>()
    };
    let (la, lb) = (below(a), below(b));
    let nearest = |e: f64, set: &[(f64, usize)]| {
        set.iter()
            .map(|&(f, _)| (e - f).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let dist = la
        .iter()
        .map(|&(e, _)| nearest(e, &lb))
        .chain(lb.iter().map(|&(e, _)| nearest(e, &la)))
        .fold(0.0, f64::max);
    let mult_differ = la.len() != lb.len() || la.iter().zip(&lb).any(|(x, y)| x.1 != y.1);
    (dist, mult_differ)
}

fn clock_shift_algebra() -> Result<f64> {
    let (z, x) = qudit_clock_shift(3)?;
    let id = Operator::identity(z.space());
    let braid = (&z * &x).distance(&(&x * &z).scale(omega(1)))?;
    Ok(braid
        .max(z.pow(3).distance(&id)?)
        .max(x.pow(3).distance(&id)?))
}

fn canonical_commutator(n_max: usize) -> Result<f64> {
    let s = HilbertSpace::fock(n_max)?;
    let a = fock_annihilation(&s, 0)?;
    let c = &a.commutator(&a.adjoint())? - &Operator::identity(&s);
    Ok(max_on(&c, |col| col < n_max))
}

fn parity_commutator(model: ModelId, params: &ModelParams, n: usize) -> Result<f64> {
    let s = model.space(n)?;
    let h = build_hamiltonian(model, params, &s)?;
    let p = build_parity(model, &s)?;
    let c = h.commutator(&p)?;
    Ok(max_on(&c, |col| shell(&s, col) < n) / h.norm_inf())
}

fn parity_cube(n: usize) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for m in ModelId::ALL {
        let s = m.space(n)?;
        let p = build_parity(m, &s)?;
        let d = &p.pow(3) - &Operator::identity(&s);
        let v = if m == ModelId::R2P {
            max_on(&d, |c| shell(&s, c) <= n)
        } else {
            d.max_abs()
        };
        dev = dev.max(v);
    }
    Ok(dev)
}

fn projector_completeness(n: usize) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for m in [ModelId::R1, ModelId::R2] {
        let s = m.space(n)?;
        let p = build_parity(m, &s)?;
        let proj = SectorIndex::ALL
            .iter()
            .map(|&k| sector_projector(&p, k))
            .collect::<Result<Vec<_>>>()?;
        let total = proj.iter().fold(Operator::zero(&s), |acc, q| &acc + q);
        dev = dev.max(total.distance(&Operator::identity(&s))?);
        for (i, a) in proj.iter().enumerate() {
            for (j, b) in proj.iter().enumerate() {
                let prod = a * b;
                let want = if i == j { a.clone() } else { Operator::zero(&s) };
                dev = dev.max(prod.distance(&want)?);
            }
        }
    }
    Ok(dev)
}

fn frame_equivalence(model: ModelId, params: &ModelParams, n: usize, count: usize) -> Result<f64> {
    let s = model.space(n)?;
    let h = build_hamiltonian(model, params, &s)?;
    let p = build_parity(model, &s)?;
    let mut dev: f64 = 0.0;
    for k in SectorIndex::ALL {
        let full = sector_lowest_eigenvalues(&h, &p, k, count, EIG_TOL)?;
        let t = build_transformed_hamiltonian(model, params, k, n)?;
        let dressed = lowest_eigenvalues(&t, count, EIG_TOL)?;
        for (a, b) in full.iter().zip(&dressed) {
            dev = dev.max((a - b).abs());
        }
    }
    Ok(dev)
}

fn rotated_frame(params: &ModelParams, n: usize) -> Result<f64> {
    let h2 = build_hamiltonian(ModelId::R2, params, &ModelId::R2.space(n)?)?;
    let hp = build_hamiltonian(ModelId::R2P, params, &ModelId::R2P.space(n)?)?;
    let a = lowest_eigenvalues(&h2, 10, EIG_TOL)?;
    let b = lowest_eigenvalues(&hp, 10, EIG_TOL)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn low_levels(model: ModelId, params: &ModelParams, n: usize, count: usize) -> Result<Vec<f64>> {
    let h = build_hamiltonian(model, params, &model.space(n)?)?;
    lowest_eigenvalues(&h, count, EIG_TOL)
}

/// Distinct-level comparison of `Alt(lambda)` against `R1(lambda_r1)`.
fn alt_vs_r1(params: &ModelParams, lambda_r1: f64, n: usize) -> Result<(f64, bool)> {
    let thr = 1e-6 * params.omega;
    let r1 = low_levels(ModelId::R1, &params.with_lambda(lambda_r1), n, 12)?;
    let alt = low_levels(ModelId::Alt, params, n, 24)?;
    Ok(compare_level_sets(&alt, &r1, thr))
}

/// Low `Alt` spectrum against `{E_i^R1(sqrt(2) lambda) + m Omega}`.
fn alt_dressed(params: &ModelParams, n: usize) -> Result<f64> {
    let count = 12;
    let r1 = low_levels(
        ModelId::R1,
        &params.with_lambda(2f64.sqrt() * params.lambda),
        n,
        count,
    )?;
    let mut combined: Vec<f64> = (0..count)
        .flat_map(|m| r1.iter().map(move |e| e + m as f64 * params.omega))
        .collect();
    combined.sort_by(f64::total_cmp);
    let alt = low_levels(ModelId::Alt, params, n, count)?;
    Ok(alt
        .iter()
        .zip(&combined)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn qho_degeneracies(omega_: f64, n: usize) -> Result<(f64, String)> {
    let s = HilbertSpace::fock2(n)?;
    let h = qho2d_hamiltonian(&s, omega_)?;
    let values = lowest_eigenvalues(&h, 21, EIG_TOL)?;
    let levels = cluster_levels(&values, 1e-6 * omega_);
    let found: Vec<usize> = levels.iter().take(6).map(|l| l.1).collect();
    let worst = (0..6)
        .map(|i| found.get(i).map_or(i + 1, |&d| d.abs_diff(i + 1)))
        .max()
        .unwrap_or(0);
    let ctx = found
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",");
    Ok((worst as f64, format!("degeneracies={ctx}")))
}

fn su2_checks(omega_: f64, n: usize) -> Result<(f64, f64)> {
    let s = HilbertSpace::fock2(n)?;
    let h = qho2d_hamiltonian(&s, omega_)?;
    let (l1, l2, l3) = su2_generators(&s)?;
    let inside = interior_columns(&s);
    let mut sym: f64 = 0.0;
    for l in [&l1, &l2, &l3] {
        sym = sym.max(max_on(&l.commutator(&h)?, &inside));
    }
    let alg = &l1.commutator(&l2)? - &l3.scale(C64::new(0.0, 2.0));
    Ok((sym, max_on(&alg, |c| shell(&s, c) < n)))
}

fn zero_field_triplet(params: &ModelParams, n: usize) -> Result<f64> {
    let p = params.with_b_field(0.0);
    let e = low_levels(ModelId::R1, &p, n, 3)?;
    let want = -p.lambda * p.lambda / p.omega;
    Ok(e.iter().map(|v| (v - want).abs()).fold(0.0, f64::max))
}

fn kernel_completeness() -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            let sum: C64 = (0..3)
                .flat_map(|a| (0..3).map(move |b| qutrit_kernel(a, b)[r][c]))
                .sum();
            let want = if r == c { 3.0 } else { 0.0 };
            dev = dev.max((sum - want).norm());
        }
    }
    dev
}

fn cat_parities(alpha: f64, n: usize) -> Result<f64> {
    let a = C64::new(alpha, 0.0);
    let mut dev: f64 = 0.0;
    for (model, kind) in [(ModelId::R1, CatKind::Qb1), (ModelId::R2, CatKind::Q2b)] {
        let p = build_parity(model, &model.space(n)?)?;
        for k in SectorIndex::ALL {
            let psi = cat_state(kind, k, a, n)?;
            let image = p.apply(&psi)?;
            dev = dev.max(image.distance(&psi.scaled(omega(k.value() as i64))));
        }
    }
    Ok(dev)
}

/// Least-squares constant `c` with `numerical ~ c * closed_form` for the
/// joint cat, and the largest residual after calibration.
fn wigner_fit(alpha: f64, n: usize) -> Result<(f64, f64)> {
    let a = C64::new(alpha, 0.0);
    let k = SectorIndex::new(0)?;
    let rho = DensityMatrix::from_pure(cat_state(CatKind::Q2b, k, a, n)?);
    let ev = WignerEvaluator::new(&rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pairs = Vec::new();
    for _ in 0..24 {
        let b = rng.random_range(0..3i64);
        let qa = rng.random_range(0..3i64);
        let mut jitter = || C64::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
        let z1 = omega(b) * a * 0.5 + jitter();
        let z2 = omega(-b) * a * 0.5 + jitter();
        let point = crate::wigner::PhasePoint::QutritTwoBoson { z1, z2, a: qa, b };
        let numeric = ev.value(&point)?;
        let closed = analytic_cat_wigner(AnalyticCat::Z3Joint { k }, a, &point)?;
        pairs.push((numeric, closed));
    }
    let c = pairs.iter().map(|(x, y)| x * y).sum::<f64>() / pairs.iter().map(|(_, y)| y * y).sum::<f64>();
    let resid = pairs
        .iter()
        .map(|(x, y)| (x - c * y).abs())
        .fold(0.0, f64::max);
    Ok((c, resid))
}

/// Runs every check with cat states at `alpha = 1`.
pub fn run_verification(params: ModelParams, truncation: usize) -> VerificationReport {
    run_verification_with(params, truncation, 1.0)
}

/// Runs every check; `cat_alpha` sets the coherent amplitude of the cat
/// states used for the parity and Wigner checks.
pub fn run_verification_with(
    params: ModelParams,
    truncation: usize,
    cat_alpha: f64,
) -> VerificationReport {
    let n = truncation;
    let mut checks = Vec::new();
    let pre = params.validate().and_then(|_| {
        if n < 20 {
            Err(Error::InvalidParams(format!("verification needs truncation >= 20, got {n}")))
        } else {
            Ok(())
        }
    });
    if let Err(e) = pre {
        checks.push(Check::failed("input.preconditions", 0.0, Criterion::AtMost, &e));
        return VerificationReport::from_checks(checks);
    }
    let ctx_p = format!(
        "omega={}, b_field={}, phi={}, lambda={}, n_max={n}",
        num(params.omega),
        num(params.b_field),
        num(params.phi),
        num(params.lambda)
    );

    let mut push = |name: &str, tol: f64, crit: Criterion, r: Result<f64>, ctx: String| {
        checks.push(match r {
            Ok(v) => Check::judge(name, v, tol, crit, ctx),
            Err(e) => Check::failed(name, tol, crit, &e),
        });
    };

    push("operators.clock_shift_algebra", 1e-12, Criterion::AtMost, clock_shift_algebra(), "dim=3".into());
    push(
        "operators.canonical_commutator",
        1e-12,
        Criterion::AtMost,
        canonical_commutator(n),
        format!("n_max={n}, columns n < n_max"),
    );
    for m in ModelId::ALL {
        push(
            &format!("parity.commutator.{}", m.name()),
            1e-10,
            Criterion::AtMost,
            parity_commutator(m, &params, n),
            format!("{ctx_p}, relative to |H|_inf, shells < n_max"),
        );
    }
    push("parity.cube", 1e-10, Criterion::AtMost, parity_cube(n), format!("n_max={n}, all models"));
    push(
        "parity.projector_completeness",
        1e-12,
        Criterion::AtMost,
        projector_completeness(n),
        format!("n_max={n}, models R1,R2"),
    );
    for m in [ModelId::R1, ModelId::R2] {
        push(
            &format!("frame.{}_sector_spectra", m.name()),
            1e-6,
            Criterion::AtMost,
            frame_equivalence(m, &params, n, 4),
            format!("{ctx_p}, 4 levels per sector"),
        );
    }
    push(
        "equivalence.r2_vs_r2p",
        1e-6,
        Criterion::AtMost,
        rotated_frame(&params, n),
        format!("{ctx_p}, 10 lowest levels"),
    );
    let thr = 1e-6 * params.omega;
    let mut alt = |name: &str, p: ModelParams, lambda_r1: f64, what: &str| {
        let r = alt_vs_r1(&p, lambda_r1, n);
        let ctx = format!(
            "{what}, b_field={}, lambda={}, r1 lambda={}",
            num(p.b_field),
            num(p.lambda),
            num(lambda_r1)
        );
        checks.push(match r {
            Ok((dist, differ)) => {
                let mut c = Check::judge(name, dist, thr, Criterion::AtMost, ctx);
                if !differ {
                    c.passed = false;
                    c.context.push_str(", multiplicities identical");
                } else {
                    c.context.push_str(", multiplicities differ");
                }
                c
            }
            Err(e) => Check::failed(name, thr, Criterion::AtMost, &e),
        });
    };
    alt(
        "equivalence.alt_vs_r1.zero_coupling",
        params.with_lambda(0.0),
        0.0,
        "distinct levels",
    );
    alt(
        "equivalence.alt_vs_r1.zero_field",
        params.with_b_field(0.0),
        2f64.sqrt() * params.lambda,
        "distinct levels",
    );
    let mut push = |name: &str, tol: f64, crit: Criterion, r: Result<f64>, ctx: String| {
        checks.push(match r {
            Ok(v) => Check::judge(name, v, tol, crit, ctx),
            Err(e) => Check::failed(name, tol, crit, &e),
        });
    };
    push(
        "equivalence.alt_dressed_spectrum",
        1e-6,
        Criterion::AtMost,
        alt_dressed(&params, n),
        format!("{ctx_p}, alt vs R1(sqrt(2) lambda) + m omega, 12 levels"),
    );
    match qho_degeneracies(params.omega, n) {
        Ok((v, ctx)) => push("su2.qho_degeneracies", 0.0, Criterion::AtMost, Ok(v), format!("{ctx}, n=0..5")),
        Err(e) => push("su2.qho_degeneracies", 0.0, Criterion::AtMost, Err(e), String::new()),
    }
    let su2 = su2_checks(params.omega, n);
    push(
        "su2.generators_commute_with_h",
        1e-12,
        Criterion::AtMost,
        su2.clone().map(|r| r.0),
        format!("n_max={n}, interior columns"),
    );
    push(
        "su2.algebra",
        1e-12,
        Criterion::AtMost,
        su2.map(|r| r.1),
        format!("[L1,L2] - 2i L3, n_max={n}, shells < n_max"),
    );
    push(
        "spectrum.zero_field_r1_triplet",
        1e-6,
        Criterion::AtMost,
        zero_field_triplet(&params, n),
        format!("lambda={}, target -lambda^2/omega", num(params.lambda)),
    );
    push(
        "wigner.qutrit_kernel_completeness",
        1e-12,
        Criterion::AtMost,
        Ok(kernel_completeness()),
        "sum_ab D_Q(2a,2b) Pi_Q = 3 I".into(),
    );
    let guard = check_truncation(cat_alpha.abs(), n);
    push(
        "states.cat_parity_eigenvalues",
        1e-10,
        Criterion::AtMost,
        guard.clone().and_then(|_| cat_parities(cat_alpha, n)),
        format!("alpha={}, n_max={n}, cats QB1 and Q2B", num(cat_alpha)),
    );
    let fit = guard.and_then(|_| wigner_fit(cat_alpha, n));
    push(
        "wigner.closed_form_prefactor",
        1e-6,
        Criterion::Near(1.0),
        fit.clone().map(|r| r.0),
        format!("alpha={}, n_max={n}, fitted global constant, 24 points", num(cat_alpha)),
    );
    push(
        "wigner.closed_form_residual",
        1e-5,
        Criterion::AtMost,
        fit.map(|r| r.1),
        format!("alpha={}, n_max={n}, after calibration", num(cat_alpha)),
    );
    VerificationReport::from_checks(checks)
}
