use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scaled_bregman::grid::read_csv;
use tempfile::TempDir;

fn sbreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbreg")).args(args).output().expect("run sbreg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn measure(dir: &Path, name: &str, mass: &[f64]) -> PathBuf {
    let support: Vec<String> = (0..mass.len()).map(|i| format!("\"x{i}\"")).collect();
    let mass: Vec<String> = mass.iter().map(|m| m.to_string()).collect();
    let path = dir.join(name);
    fs::write(&path, format!("{{\"support\": [{}], \"mass\": [{}]}}", support.join(","), mass.join(","))).unwrap();
    path
}

fn value(o: &Output) -> f64 {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    stdout(o).trim().parse().unwrap()
}

struct Fixture {
    _dir: TempDir,
    p: String,
    q: String,
    m: String,
    bad: String,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let p = measure(dir.path(), "p.json", &[0.5, 0.5]);
    let q = measure(dir.path(), "q.json", &[0.25, 0.75]);
    let m = measure(dir.path(), "m.json", &[1.0, 3.0]);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"support\": [\"a\"], \"mass\": [0.5, 0.5]}").unwrap();
    let s = |p: PathBuf| p.to_str().unwrap().to_owned();
    Fixture {
        p: s(p),
        q: s(q),
        m: s(m),
        bad: s(bad),
        _dir: dir,
    }
}

#[test]
fn kl_divergence_value() {
    let f = fixture();
    let v = value(&sbreg(&["divergence", "--phi", "kl", "--p", &f.p, "--q", &f.q, "--kind", "dphi"]));
    let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
    assert!((v - expected).abs() < 1e-15, "{v}");
}

#[test]
fn kl_bregman_equals_divergence_for_any_scale() {
    let f = fixture();
    let d = value(&sbreg(&["divergence", "--phi", "kl", "--p", &f.p, "--q", &f.q, "--kind", "dphi"]));
    let b = value(&sbreg(&["divergence", "--phi", "kl", "--p", &f.p, "--q", &f.q]));
    assert!((b - d).abs() < 1e-15);
    let b = value(&sbreg(&["divergence", "--phi", "kl", "--p", &f.p, "--q", &f.q, "--m", &f.m]));
    assert!((b - d).abs() < 1e-14);
}

#[test]
fn total_variation_with_default_scale_is_l1() {
    let f = fixture();
    let v = value(&sbreg(&["divergence", "--phi", "tv", "--p", &f.p, "--q", &f.q]));
    assert!((v - 0.5).abs() < 1e-15, "{v}");
}

#[test]
fn identical_measures_print_zero() {
    let f = fixture();
    for phi in ["kl", "rkl", "tv", "pearson", "lecam", "power:0.5", "power:-1"] {
        let o = sbreg(&["divergence", "--phi", phi, "--p", &f.p, "--q", &f.p]);
        assert_eq!(o.status.code(), Some(0), "{phi}: {}", stderr(&o));
        assert_eq!(stdout(&o).trim(), "0", "{phi}");
    }
}

#[test]
fn malformed_input_exits_2() {
    let f = fixture();
    let o = sbreg(&["divergence", "--phi", "kl", "--p", &f.bad, "--q", &f.q]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("input-error:"), "{}", stderr(&o));
    let o = sbreg(&["divergence", "--phi", "kl", "--p", "/nonexistent/p.json", "--q", &f.q]);
    assert_eq!(o.status.code(), Some(2));
    let o = sbreg(&["divergence", "--phi", "kl", "--p", &f.p, "--q", &f.q, "--m", &f.m, "--kind", "dphi"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sbreg(&["divergence", "--phi", "power:1", "--p", &f.p, "--q", &f.q]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn support_mismatch_is_an_input_error() {
    let f = fixture();
    let dir = TempDir::new().unwrap();
    let three = measure(dir.path(), "r.json", &[0.2, 0.3, 0.5]);
    let o = sbreg(&["divergence", "--phi", "kl", "--p", &f.p, "--q", three.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn grid3d_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = sbreg(&[
            "grid3d", "--family", "binomial:10", "--ptilde", "0.25", "--qtilde", "0.2", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("alpha,beta,value\n"));
    let points = read_csv(&text).unwrap();
    assert_eq!(points.len(), 2500);
    for g in &points {
        let v = g.value.to_f64();
        assert!(v > 0.06 && v < 0.09, "{v}");
    }
}

#[test]
fn grid3d_equal_laws_is_all_zero() {
    let o = sbreg(&[
        "grid3d", "--family", "binomial:10", "--ptilde", "0.3", "--qtilde", "0.3", "--alpha", "0:2:5", "--beta",
        "0:1:3", "--out", "-",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let points = read_csv(&stdout(&o)).unwrap();
    assert_eq!(points.len(), 15);
    assert!(points.iter().all(|g| g.value.to_f64() == 0.0));
}

#[test]
fn grid3d_rejects_bad_arguments() {
    let base = ["grid3d", "--family", "binomial:10", "--ptilde", "0.25", "--out", "-"];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        sbreg(&args).status.code()
    };
    assert_eq!(with(&["--qtilde", "1.5"]), Some(3));
    assert_eq!(with(&["--qtilde", "0.2", "--beta", "0:2:5"]), Some(2));
    assert_eq!(with(&["--qtilde", "0.2", "--alpha", "nonsense"]), Some(2));
    let o = sbreg(&["grid3d", "--family", "rayleigh", "--ptilde", "0.2", "--qtilde", "0.3", "--out", "-"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn expfam_equal_parameters_give_zero() {
    let o = sbreg(&["expfam", "--family", "rayleigh", "--alpha", "0.5", "--theta1", "2", "--theta2", "2", "--quantity", "dalpha"]);
    assert_eq!(value(&o), 0.0);
}

#[test]
fn expfam_scale_at_second_argument_matches_divergence() {
    let common = ["expfam", "--family", "binomial:10", "--alpha", "0.7", "--theta1", "-1.1", "--theta2", "-1.4"];
    let mut b = common.to_vec();
    b.extend_from_slice(&["--theta0", "-1.4"]);
    let mut d = common.to_vec();
    d.extend_from_slice(&["--quantity", "dalpha"]);
    let (b, d) = (value(&sbreg(&b)), value(&sbreg(&d)));
    assert!((b - d).abs() <= 1e-12 * (1.0 + d.abs()), "{b} vs {d}");
}

#[test]
fn expfam_model_parameters() {
    let o = sbreg(&[
        "expfam", "--family", "gbm:1.5,0.8", "--alpha", "1", "--theta1", "0.4", "--theta2", "-0.3", "--quantity",
        "dalpha", "--model",
    ]);
    let expected = 0.49f64 * 1.5 / (2.0 * 0.64);
    assert!((value(&o) - expected).abs() < 1e-12);
}

#[test]
fn expfam_domain_and_input_errors() {
    let o = sbreg(&["expfam", "--family", "rayleigh", "--alpha", "0.5", "--theta1", "-1", "--theta2", "2", "--quantity", "dalpha"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("domain-error:"), "{}", stderr(&o));
    let o = sbreg(&["expfam", "--family", "rayleigh", "--alpha", "0.5", "--theta1", "1", "--theta2", "2"]);
    assert_eq!(o.status.code(), Some(2), "missing theta0");
    let o = sbreg(&["expfam", "--family", "rayleigh", "--alpha", "0.5", "--theta1", "1,2", "--theta2", "2", "--quantity", "dalpha"]);
    assert_eq!(o.status.code(), Some(2), "dimension mismatch");
    let o = sbreg(&["expfam", "--family", "cauchy", "--alpha", "0.5", "--theta1", "1", "--theta2", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_counterexample_and_all() {
    let o = sbreg(&["check", "--suite", "counterexample"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("[counterexample] PASS"), "{out}");
    assert!(out.contains("unmerged 0.375 merged 0.5"), "{out}");

    let o = sbreg(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for s in ["identities", "oracle", "sufficiency", "counterexample", "limits", "shift"] {
        assert!(out.contains(&format!("[{s}] PASS")), "{s}: {out}");
    }
    assert!(!out.contains("FAIL"));

    assert_eq!(sbreg(&["check", "--suite", "bogus"]).status.code(), Some(2));
}
