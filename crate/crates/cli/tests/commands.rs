use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qrabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrabi"))
        .args(args)
        .env("QRABI_THREADS", "1")
        .output()
        .unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["spectrum", "--model", "r1", "--lambda-range", "0:1:5", "--truncation", "30", "--out", &out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let t = rows(&dir.path().join("spectrum.csv"));
    assert_eq!(
        t[0],
        ["lambda", "exact_e0", "exact_e1", "exact_e2", "pert_k0", "pert_k1", "pert_k2"]
    );
    assert_eq!(t.len(), 6);
    // at zero coupling both columns are the bare qutrit levels
    let first: Vec<f64> = t[1][1..].iter().map(|s| num(s)).collect();
    let mut exact = first[..3].to_vec();
    let mut pert = first[3..].to_vec();
    exact.sort_by(f64::total_cmp);
    pert.sort_by(f64::total_cmp);
    for (a, b) in exact.iter().zip(&pert) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn two_mode_splitting_decays_like_exp_minus_three_s_squared() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["spectrum", "--model", "r2", "--lambda-range", "0.5:1:2", "--truncation", "20", "--out", &out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let t = rows(&dir.path().join("spectrum.csv"));
    let spread = |row: &[String]| {
        let v: Vec<f64> = row[4..7].iter().map(|s| num(s)).collect();
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let ratio = spread(&t[2]) / spread(&t[1]);
    let want = (-3.0 * (1.0f64 - 0.25)).exp();
    assert!((ratio - want).abs() < 1e-9, "{ratio} vs {want}");
}

#[test]
fn models_without_closed_form_leave_first_order_cells_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["spectrum", "--model", "alt", "--lambda-range", "0:0.5:2", "--truncation", "12", "--out", &out]);
    assert!(r.status.success());
    for row in &rows(&dir.path().join("spectrum.csv"))[1..] {
        assert_eq!(row.len(), 7);
        assert!(row[4..].iter().all(|s| s.is_empty()));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = out_arg(d.path());
        let r = qrabi(&[
            "wigner", "--kind", "q2b", "--alpha", "1", "--truncation", "20", "--resolution", "9", "--extent", "2",
            "--out", &out,
        ]);
        assert!(r.status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn wigner_panels_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&[
        "wigner", "--kind", "q2b", "--alpha", "1", "--truncation", "20", "--resolution", "11", "--extent", "2",
        "--out", &out,
    ]);
    assert!(r.status.success());
    let meta = fs::read_to_string(dir.path().join("meta.txt")).unwrap();
    for key in ["state = q2b", "resolution = 11", "spacing = 0.4", "section = diag", "max[wigner_a0_b0.csv]"] {
        assert!(meta.contains(key), "{key} missing from\n{meta}");
    }
    let mut total = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let t = rows(&dir.path().join(format!("wigner_a{a}_b{b}.csv")));
            assert_eq!(t[0], ["re_w", "im_w", "value"]);
            assert_eq!(t.len(), 1 + 11 * 11);
            // rows along im_w, columns along re_w
            assert_eq!((num(&t[1][0]), num(&t[1][1])), (-2.0, -2.0));
            assert_eq!((num(&t[2][0]), num(&t[2][1])), (-1.6, -2.0));
            total += t[1..].iter().map(|r| num(&r[2])).sum::<f64>();
        }
    }
    assert!(total.is_finite());
}

#[test]
fn one_mode_states_write_a_single_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["wigner", "--kind", "z2-even", "--alpha", "1", "--truncation", "20", "--resolution", "5", "--out", &out]);
    assert!(r.status.success());
    assert!(dir.path().join("wigner.csv").exists());
    assert!(fs::read_to_string(dir.path().join("meta.txt")).unwrap().contains("single: z = w"));
}

#[test]
fn bad_configuration_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "model = r1\nbogus = 3\n").unwrap();
    let r = qrabi(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains(":2:") && err.contains("bogus"), "{err}");
    assert!(!target.exists());

    let r = qrabi(&["wigner", "--resolution", "1", "--out", target.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("resolution"));
    assert!(!target.exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep\nmodel = r2\nlambda-range = 0:1:3\ntruncation = 12\n").unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["spectrum", "--config", cfg.to_str().unwrap(), "--lambda-range", "0:1:4", "--out", &out]);
    assert!(r.status.success());
    assert_eq!(rows(&dir.path().join("spectrum.csv")).len(), 5);
}

#[test]
fn verify_exit_status_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["verify", "--truncation", "20", "--alpha", "1", "--out", &out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stdout));
    let kv = fs::read_to_string(dir.path().join("verify.kv")).unwrap();
    assert!(kv.lines().last().unwrap() == "overall=pass", "{kv}");
    assert!(kv.lines().filter(|l| l.starts_with("check.name=")).all(|l| l.contains("status=pass")));
    assert!(fs::read_to_string(dir.path().join("verify.txt")).unwrap().contains("PASS"));

    // alpha = 3 needs a larger cutoff than 20
    let guarded = dir.path().join("guarded");
    let r = qrabi(&["verify", "--truncation", "20", "--alpha", "3", "--out", guarded.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(!guarded.exists());

    let r = qrabi(&["verify", "--truncation", "10", "--out", guarded.to_str().unwrap()]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains(">= 20"), "{err}");
}

#[test]
fn state_csv_lists_every_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let r = qrabi(&["state", "--kind", "mix", "--alpha", "0.5", "--truncation", "15", "--out", &out]);
    assert!(r.status.success());
    let t = rows(&dir.path().join("state.csv"));
    assert_eq!(t[0], ["component", "weight", "index", "q", "n1", "n2", "re", "im"]);
    let dim = 3 * 16 * 16;
    assert_eq!(t.len(), 1 + 3 * dim);
    for c in 0..3 {
        let norm: f64 = t[1..]
            .iter()
            .filter(|r| r[0] == c.to_string())
            .map(|r| num(&r[6]).powi(2) + num(&r[7]).powi(2))
            .sum();
        assert!((norm - 1.0).abs() < 1e-9);
    }
}
