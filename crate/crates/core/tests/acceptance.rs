//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::SQRT_2;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use qrabi_cli::{cmd_wigner, RunConfig};
use qrabi_core::models::{
    build_transformed_hamiltonian, interior_columns, qho2d_hamiltonian, sector_lowest_eigenvalues,
    sector_projector, su2_generators,
};
use qrabi_core::operators::{
    dense_hermitian_eigen, fock_annihilation, lowest_eigen_csr, lowest_eigenvalues, number_operator,
    omega, CsrMatrix, EigenMethod, EigenOptions,
};
use qrabi_core::perturbation::linspace;
use qrabi_core::states::{
    cat_state, coherent_state, reference_density, required_truncation, CatKind, RefKind,
};
use qrabi_core::verify::cluster_levels;
use qrabi_core::wigner::{analytic_cat_wigner, wigner_panels, AnalyticCat, WignerEvaluator};
use qrabi_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, String);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sector(k: usize) -> SectorIndex {
    SectorIndex::new(k).unwrap()
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"))
        }
    };
    let tag = if ok { "PASS" } else { "FAIL" };
    println!(
        "{tag} [{id}] {title} ({detail}; {:.1} s)",
        start.elapsed().as_secs_f64()
    );
    ok
}

fn max_on(op: &Operator, keep: impl Fn(usize) -> bool) -> f64 {
    op.matrix()
        .iter()
        .filter(|&(_, col, _)| keep(col))
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max)
}

fn shell(space: &HilbertSpace, i: usize) -> usize {
    space.fock_slots().iter().map(|&s| space.level(i, s)).sum()
}

/// First-order agreement over `lambda in [0, 1.5]`: overall and on `lambda >= 1`.
fn perturbative_agreement(model: ModelId, n: usize) -> Verdict {
    let grid = linspace(0.0, 1.5, 16);
    let t = Instant::now();
    let result = spectrum_sweep(model, &ModelParams::default(), &grid, 3, n).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let failures = result.failures().count();
    let all = result.max_deviation_from(f64::NEG_INFINITY).unwrap_or(f64::NAN);
    let strong = result.max_deviation_from(1.0).unwrap_or(f64::NAN);
    let ok = failures == 0 && all <= 2e-2 && strong <= 2e-3 && secs < 60.0;
    (
        ok,
        format!(
            "N={n}, max dev {all:.3e} (bound 2e-2), max dev at lambda>=1 {strong:.3e} (bound 2e-3), sweep {secs:.1} s"
        ),
    )
}

fn sector_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let params = ModelParams::new(
            rng.random_range(0.5..1.5),
            rng.random_range(0.0..0.5),
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..1.5),
        )
        .unwrap();
        for (model, n) in [(ModelId::R1, 40), (ModelId::R2, 25)] {
            let space = model.space(n).unwrap();
            let h = build_hamiltonian(model, &params, &space).unwrap();
            let p = build_parity(model, &space).unwrap();
            for k in SectorIndex::ALL {
                let full = sector_lowest_eigenvalues(&h, &p, k, 4, 1e-12).unwrap();
                let t = build_transformed_hamiltonian(model, &params, k, n).unwrap();
                let dressed = lowest_eigenvalues(&t, 4, 1e-12).unwrap();
                for (a, b) in full.iter().zip(&dressed) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    (worst <= 1e-6, format!("5 random points, 4 levels per sector, max dev {worst:.2e} (tol 1e-6)"))
}

fn rotated_equivalence() -> Verdict {
    let params = ModelParams::default();
    let n = 30;
    let a = lowest_eigenvalues(
        &build_hamiltonian(ModelId::R2, &params, &ModelId::R2.space(n).unwrap()).unwrap(),
        10,
        1e-12,
    )
    .unwrap();
    let b = lowest_eigenvalues(
        &build_hamiltonian(ModelId::R2P, &params, &ModelId::R2P.space(n).unwrap()).unwrap(),
        10,
        1e-12,
    )
    .unwrap();
    let dev = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    (dev <= 1e-6, format!("N={n}, 10 levels, max dev {dev:.2e} (tol 1e-6)"))
}

fn levels(model: ModelId, params: &ModelParams, n: usize, count: usize) -> Vec<f64> {
    let h = build_hamiltonian(model, params, &model.space(n).unwrap()).unwrap();
    lowest_eigenvalues(&h, count, 1e-12).unwrap()
}

/// Largest distance between distinct levels below the common cutoff, and
/// whether the multiplicity patterns agree.
fn level_set_distance(a: &[f64], b: &[f64], thr: f64) -> (f64, bool) {
    let cut = a.last().unwrap().min(*b.last().unwrap()) - 10.0 * thr;
    let below = |v: &[f64]| -> Vec<(f64, usize)> {
        cluster_levels(v, thr).into_iter().filter(|l| l.0 < cut).collect()
    };
    let (la, lb) = (below(a), below(b));
    let near = |e: f64, s: &[(f64, usize)]| s.iter().map(|l| (e - l.0).abs()).fold(f64::INFINITY, f64::min);
    let dist = la
        .iter()
        .map(|l| near(l.0, &lb))
        .chain(lb.iter().map(|l| near(l.0, &la)))
        .fold(0.0, f64::max);
    let same_mult = la.len() == lb.len() && la.iter().zip(&lb).all(|(x, y)| x.1 == y.1);
    (dist, same_mult)
}

fn alt_equivalence() -> Verdict {
    let n = 30;
    let thr = 1e-6;
    let base = ModelParams::default();
    let r = SQRT_2 * base.lambda;

    let p0 = base.with_lambda(0.0);
    let (d_a, same_a) = level_set_distance(&levels(ModelId::Alt, &p0, n, 24), &levels(ModelId::R1, &p0, n, 12), thr);
    let pb = base.with_b_field(0.0);
    let (d_b, same_b) = level_set_distance(
        &levels(ModelId::Alt, &pb, n, 24),
        &levels(ModelId::R1, &pb.with_lambda(r), n, 12),
        thr,
    );
    let r1 = levels(ModelId::R1, &base.with_lambda(r), n, 12);
    let mut dressed: Vec<f64> = (0..12)
        .flat_map(|m| r1.iter().map(move |e| e + m as f64 * base.omega))
        .collect();
    dressed.sort_by(f64::total_cmp);
    let alt = levels(ModelId::Alt, &base, n, 12);
    let d_c = alt.iter().zip(&dressed).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let ok = d_a <= thr && !same_a && d_b <= thr && !same_b && d_c <= 1e-6;
    (
        ok,
        format!(
            "lambda=0: dist {d_a:.1e}, multiplicities differ {}; B=0 vs R1(sqrt2 lambda): dist {d_b:.1e}, differ {}; \
             ALT vs R1(sqrt2 lambda)+m*Omega: {d_c:.1e}",
            !same_a, !same_b
        ),
    )
}

fn su2_structure() -> Verdict {
    let n = 20;
    let s = HilbertSpace::fock2(n).unwrap();
    let h = qho2d_hamiltonian(&s, 1.0).unwrap();
    let vals = lowest_eigenvalues(&h, 21, 1e-12).unwrap();
    let degs: Vec<usize> = cluster_levels(&vals, 1e-6).iter().take(6).map(|l| l.1).collect();
    let (l1, l2, l3) = su2_generators(&s).unwrap();
    let inside = interior_columns(&s);
    let sym = [&l1, &l2, &l3]
        .iter()
        .map(|l| max_on(&l.commutator(&h).unwrap(), &inside))
        .fold(0.0, f64::max);
    let alg = &l1.commutator(&l2).unwrap() - &l3.scale(c(0.0, 2.0));
    let alg = max_on(&alg, |col| shell(&s, col) < n);
    let ok = degs == [1, 2, 3, 4, 5, 6] && sym <= 1e-10 && alg <= 1e-10;
    (ok, format!("degeneracies {degs:?}, |[L,H]| {sym:.1e}, |[L1,L2]-2iL3| {alg:.1e}"))
}

fn joint_wigner_checks() -> Verdict {
    let alpha = c(3.0, 0.0);
    let n = 50;
    let k = sector(0);
    let rho = DensityMatrix::from_pure(cat_state(CatKind::Q2b, k, alpha, n).unwrap());
    let ev = WignerEvaluator::new(&rho).unwrap();
    let reduced = rho.trace_out_qudit(0).unwrap();
    let ev2 = WignerEvaluator::new(&reduced).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = Vec::new();
    let mut reduction: f64 = 0.0;
    for i in 0..100 {
        let b = rng.random_range(0..3i64);
        let mut jitter = |r: f64| c(rng.random_range(-r..r), rng.random_range(-r..r));
        // a third near blobs, a third near interference centers, a third anywhere
        let (z1, z2) = match i % 3 {
            0 => (omega(b) * alpha + jitter(0.5), omega(-b) * alpha + jitter(0.5)),
            1 => (-omega(b) * alpha * 0.5 + jitter(0.5), -omega(-b) * alpha * 0.5 + jitter(0.5)),
            _ => (jitter(4.0), jitter(4.0)),
        };
        let table = ev.qutrit_table(z1, z2).unwrap();
        for a in 0..3 {
            for bb in 0..3 {
                let point = PhasePoint::QutritTwoBoson { z1, z2, a, b: bb };
                let closed = analytic_cat_wigner(AnalyticCat::Z3Joint { k }, alpha, &point).unwrap();
                pairs.push((table[a as usize][bb as usize], closed));
            }
        }
        let sum: f64 = table.iter().flatten().sum();
        let w2 = ev2.value(&PhasePoint::TwoBoson { z1, z2 }).unwrap();
        reduction = reduction.max((sum - w2).abs());
    }
    let fit = pairs.iter().map(|(x, y)| x * y).sum::<f64>() / pairs.iter().map(|(_, y)| y * y).sum::<f64>();
    let resid = pairs.iter().map(|(x, y)| (x - fit * y).abs()).fold(0.0, f64::max);

    let red_q = rho.reduced_qudit(0).unwrap();
    let q = DensityMatrix::from_dense(HilbertSpace::qudit(3).unwrap(), &red_q).unwrap();
    let evq = WignerEvaluator::new(&q).unwrap();
    let wq = |a: i64, b: i64| evq.value(&PhasePoint::Qutrit { q: a, p: b }).unwrap();
    let mut marg: f64 = 0.0;
    for a in 0..3 {
        let row: f64 = (0..3).map(|b| wq(a, b)).sum();
        marg = marg.max((row - red_q[(a as usize, a as usize)].re).abs());
    }
    for b in 0..3 {
        let col: f64 = (0..3).map(|a| wq(a, b)).sum();
        let f = qrabi_core::operators::fourier_state(3, b as usize).unwrap();
        let v = expect3(&red_q, f.amplitudes());
        marg = marg.max((col - v).abs());
    }
    let ok = resid <= 1e-5 && marg <= 1e-12 && reduction <= 1e-10;
    (
        ok,
        format!(
            "100 points x 9 panels: fitted constant {fit:.8}, residual {resid:.1e} (tol 1e-5); \
             qutrit marginals {marg:.1e} (tol 1e-12); sum over (a,b) vs two-mode Wigner {reduction:.1e} (tol 1e-10)"
        ),
    )
}

/// `<v| m |v>` for a 3x3 reduced state.
fn expect3(m: &impl std::ops::Index<(usize, usize), Output = Complex64>, v: &[Complex64]) -> f64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += v[i].conj() * m[(i, j)] * v[j];
        }
    }
    acc.re
}

fn discrimination() -> Verdict {
    let alpha = c(3.0, 0.0);
    let n = 50;
    let k = sector(0);
    let centers: Vec<(i64, Complex64, Complex64)> = (0..3)
        .map(|b| (b, -omega(b) * alpha * 0.5, -omega(-b) * alpha * 0.5))
        .collect();
    let at_centers = |kind: RefKind| -> Vec<f64> {
        let rho = reference_density(kind, k, alpha, n).unwrap();
        let ev = WignerEvaluator::new(&rho).unwrap();
        centers
            .iter()
            .map(|&(b, z1, z2)| ev.value(&PhasePoint::QutritTwoBoson { z1, z2, a: 0, b }).unwrap().abs())
            .collect()
    };
    let cat = at_centers(RefKind::Q2bCat);
    let mix = at_centers(RefKind::Mix);
    let cat_min = cat.iter().copied().fold(f64::INFINITY, f64::min);
    let mix_max = mix.iter().copied().fold(0.0, f64::max);

    let product = reference_density(RefKind::Product2b, k, alpha, n).unwrap();
    let coords: Vec<(i64, i64)> = (0..3).flat_map(|a| [(a, 1), (a, 2)]).collect();
    let grids = wigner_panels(&product, PlaneSection::Diagonal { scale: 1.0 }, 4.0, 33, &coords).unwrap();
    let mut prod_max = grids.iter().map(|g| g.max_abs()).fold(0.0, f64::max);
    let ev = WignerEvaluator::new(&product).unwrap();
    for &(bb, z1, z2) in &centers {
        let blob = (omega(bb) * alpha, omega(-bb) * alpha);
        for (y1, y2) in [(z1, z2), blob] {
            for &(a, b) in &coords {
                let v = ev.value(&PhasePoint::QutritTwoBoson { z1: y1, z2: y2, a, b }).unwrap();
                prod_max = prod_max.max(v.abs());
            }
        }
    }
    let ok = cat_min > 1e-3 && mix_max < 1e-8 && prod_max < 1e-6;
    (
        ok,
        format!(
            "a=0 at interference centers: cat min {cat_min:.3e} (> 1e-3), mixture max {mix_max:.1e} (< 1e-8); \
             product b=1,2 panels max {prod_max:.1e} (< 1e-6)"
        ),
    )
}

fn read_grid(path: &Path) -> Vec<(f64, f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect()
}

fn ground_state_grids() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let spacing = 0.1;
    let mut seps = Vec::new();
    let mut details = Vec::new();
    for lambda in [0.1, 0.5, 1.0] {
        let out = dir.path().join(format!("lambda{lambda}"));
        let lam = lambda.to_string();
        let out_s = out.to_str().unwrap().to_string();
        let cfg = RunConfig::from_settings([
            ("model", "r2"),
            ("b-field", "0.1"),
            ("lambda", lam.as_str()),
            ("truncation", "50"),
            ("kind", "ground"),
            ("section", "diag"),
            ("diag-scale", "1"),
            ("extent", "3"),
            ("resolution", "61"),
            ("out", out_s.as_str()),
        ])
        .unwrap();
        cmd_wigner(&cfg).unwrap();
        let peaks: Vec<(f64, f64)> = (0..3)
            .map(|b| {
                let g = read_grid(&out.join(format!("wigner_a0_b{b}.csv")));
                assert_eq!(g.len(), 61 * 61);
                let m = g.iter().fold(g[0], |acc, &p| if p.2 > acc.2 { p } else { acc });
                (m.0, m.1)
            })
            .collect();
        let mut d = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                d.push(((peaks[i].0 - peaks[j].0).powi(2) + (peaks[i].1 - peaks[j].1).powi(2)).sqrt());
            }
        }
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let max = d.iter().copied().fold(0.0, f64::max);
        details.push(format!(
            "lambda={lambda}: pairwise {:.2}..{:.2} w ({:.1}..{:.1} cells)",
            min,
            max,
            min / spacing,
            max / spacing
        ));
        seps.push((min / spacing, max / spacing));
    }
    let ok = seps[2].0 >= 2.0 && seps[0].1 <= 0.5;
    (ok, details.join("; ") + "; need >= 2 cells at lambda=1, <= 0.5 at lambda=0.1")
}

fn property_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut notes = Vec::new();
    let mut ok = true;

    let mut comm: f64 = 0.0;
    for _ in 0..10 {
        let params = ModelParams::new(
            rng.random_range(0.5..2.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..2.0),
        )
        .unwrap();
        for model in ModelId::ALL {
            let s = model.space(8).unwrap();
            let h = build_hamiltonian(model, &params, &s).unwrap();
            let p = build_parity(model, &s).unwrap();
            let d = max_on(&h.commutator(&p).unwrap(), |col| shell(&s, col) < 8) / h.norm_inf();
            comm = comm.max(d);
        }
    }
    ok &= comm <= 1e-10;
    notes.push(format!("[H,P] {comm:.1e}"));

    let mut proj: f64 = 0.0;
    for model in [ModelId::R1, ModelId::R2, ModelId::Alt] {
        let s = model.space(6).unwrap();
        let p = build_parity(model, &s).unwrap();
        let ps: Vec<_> = SectorIndex::ALL.iter().map(|&k| sector_projector(&p, k).unwrap()).collect();
        let total = ps.iter().fold(Operator::zero(&s), |acc, q| &acc + q);
        proj = proj.max(total.distance(&Operator::identity(&s)).unwrap());
    }
    ok &= proj <= 1e-12;
    notes.push(format!("sum P_k - 1 {proj:.1e}"));

    let mut par: f64 = 0.0;
    for alpha in [0.5, 1.0, 3.0] {
        let n = required_truncation(alpha);
        for (model, kind) in [(ModelId::R1, CatKind::Qb1), (ModelId::R2, CatKind::Q2b)] {
            let p = build_parity(model, &model.space(n).unwrap()).unwrap();
            for k in SectorIndex::ALL {
                let psi = cat_state(kind, k, c(alpha, 0.0), n).unwrap();
                let d = p.apply(&psi).unwrap().distance(&psi.scaled(omega(k.value() as i64)));
                par = par.max(d);
            }
        }
    }
    ok &= par <= 1e-8;
    notes.push(format!("cat parity {par:.1e}"));

    let mut mom: f64 = 0.0;
    for _ in 0..10 {
        let alpha = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let n = required_truncation(alpha.norm());
        let psi = coherent_state(alpha, n).unwrap();
        let rho = DensityMatrix::from_pure(psi);
        let s = HilbertSpace::fock(n).unwrap();
        let a = rho.expectation(&fock_annihilation(&s, 0).unwrap()).unwrap();
        let num = rho.expectation(&number_operator(&s, 0).unwrap()).unwrap();
        mom = mom.max((a - alpha).norm()).max((num.re - alpha.norm_sqr()).abs());
    }
    ok &= mom <= 1e-10;
    notes.push(format!("coherent moments {mom:.1e}"));

    let mut eig: f64 = 0.0;
    for _ in 0..6 {
        let dim = rng.random_range(50..=200usize);
        let mut trip = Vec::new();
        for i in 0..dim {
            trip.push((i, i, c(rng.random_range(-5.0..5.0), 0.0)));
            for _ in 0..3 {
                let j = rng.random_range(0..dim);
                if j != i {
                    let v = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    trip.push((i, j, v));
                    trip.push((j, i, v.conj()));
                }
            }
        }
        let m = CsrMatrix::from_triplets(dim, trip);
        let (dense, _) = dense_hermitian_eigen(&m.to_dense());
        for method in [EigenMethod::Chebyshev, EigenMethod::Lanczos] {
            let opts = EigenOptions {
                method,
                dense_threshold: 0,
                ..EigenOptions::with_tol(1e-12)
            };
            let (vals, _) = lowest_eigen_csr(&m, 6, &opts).unwrap();
            for (x, y) in vals.iter().zip(&dense) {
                eig = eig.max((x - y).abs());
            }
        }
    }
    ok &= eig <= 1e-8;
    notes.push(format!("eigensolver vs dense {eig:.1e}"));

    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    notes.push(format!("suite {secs:.1} s"));
    (ok, notes.join(", "))
}

fn main() {
    let results = [
        run(1, "one-mode model: exact vs first-order triplet, N=50", || {
            perturbative_agreement(ModelId::R1, 50)
        }),
        run(2, "two-mode model: exact vs first-order triplet, N=40", || {
            perturbative_agreement(ModelId::R2, 40)
        }),
        run(3, "sector spectra equal the transformed-frame spectra", sector_equivalence),
        run(4, "rotated two-mode model is isospectral", rotated_equivalence),
        run(5, "alternative two-mode model vs one-mode model", alt_equivalence),
        run(6, "2D oscillator SU(2) degeneracies and algebra", su2_structure),
        run(7, "joint cat Wigner: closed form, marginals, reduction", joint_wigner_checks),
        run(8, "cat vs mixture vs product discrimination", discrimination),
        run(9, "ground-state Wigner panels separate with coupling", ground_state_grids),
        run(10, "property suite", property_suite),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
