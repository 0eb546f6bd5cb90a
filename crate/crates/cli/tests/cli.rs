use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mls"))
        .args(args)
        .env_remove("MLS_PRECISION")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn orbit_prints_full_precision_perimeter() {
    let o = mls(&["--domain", "circle", "orbit", "-p", "1", "-q", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("perimeter ")).unwrap();
    let v: f64 = line["perimeter ".len()..].parse().unwrap();
    assert!((v - 3.0 * 3f64.sqrt()).abs() < 1e-14);
}

#[test]
fn orbit_writes_json_from_domain_file() {
    let dir = tempfile::tempdir().unwrap();
    let domain = dir.path().join("domain.json");
    fs::write(&domain, r#"{"kind": "ellipse", "a": 1.0, "b": 0.6}"#).unwrap();
    let out = dir.path().join("orbit.json");
    let o = mls(&[
        "--domain",
        domain.to_str().unwrap(),
        "orbit",
        "-p",
        "1",
        "-q",
        "2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["q"], 2);
}

#[test]
fn invalid_input_exits_with_one() {
    assert_eq!(code(&mls(&["orbit", "-p", "2", "-q", "4"])), 1);
    assert_eq!(code(&mls(&["orbit", "-p", "1"])), 1);
    assert_eq!(code(&mls(&["--domain", "nowhere", "orbit", "-p", "1", "-q", "2"])), 1);
    assert_eq!(code(&mls(&["orbit", "--bogus"])), 1);
    assert_eq!(code(&mls(&["--help"])), 0);
    let env = Command::new(env!("CARGO_BIN_EXE_mls"))
        .args(["domain-check"])
        .env("MLS_PRECISION", "quad")
        .output()
        .unwrap();
    assert_eq!(code(&env), 1);
}

#[test]
fn config_file_supplies_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"domain": "circle", "p": 1, "q": 4, "precision": "extended"}"#).unwrap();
    let o = mls(&["--config", cfg.to_str().unwrap(), "orbit"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("perimeter 5.65685424949238019520675489683"));

    fs::write(&cfg, r#"{"domain": "circle", "typo": 1}"#).unwrap();
    assert_eq!(code(&mls(&["--config", cfg.to_str().unwrap(), "domain-check"])), 1);
}

#[test]
fn spectrum_table_has_one_row_per_fraction() {
    let o = mls(&["--domain", "circle", "spectrum", "--q-max", "5"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,q,ml_max,beta,trace,residue,hyperbolic");
    assert_eq!(lines.len(), 10);
}

fn verify_in(dir: &Path, name: &str) -> Output {
    mls(&[
        "--domain",
        "generic",
        "--precision",
        "extended",
        "--seed",
        "3",
        "verify",
        "-p",
        "1",
        "-q",
        "2",
        "--n-max",
        "14",
        "--out-dir",
        dir.to_str().unwrap(),
        "--name",
        name,
    ])
}

#[test]
fn verify_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = verify_in(dir.path(), "a");
    let b = verify_in(dir.path(), "b");
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(code(&b), 0);
    for ext in ["json", "csv"] {
        let x = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let y = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(x, y, "{ext} differs");
    }
    let gp = fs::read_to_string(dir.path().join("a.gp")).unwrap();
    assert!(gp.contains("a.csv"));
}

#[test]
fn verify_fails_on_the_circle() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&[
        "--domain",
        "circle",
        "verify",
        "-p",
        "1",
        "-q",
        "2",
        "--n-max",
        "12",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("NotHyperbolic"));
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn double_precision_refuses_deep_generic_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&[
        "--precision",
        "double",
        "verify",
        "-p",
        "1",
        "-q",
        "2",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn barrier_and_lazutkin_checks() {
    let o = mls(&["--precision", "extended", "barrier", "-p", "1", "-q", "2", "--k", "5", "--m", "5"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b: f64 = v["heteroclinic"]["barrier"].as_str().unwrap().parse().unwrap();
    assert!((b - 3.587405503458375).abs() < 1e-12);
    assert_eq!(code(&mls(&["barrier", "-p", "1", "-q", "2", "--k", "5"])), 1);
    assert_eq!(code(&mls(&["--domain", "circle", "barrier", "-p", "1", "-q", "2"])), 2);

    let o = mls(&["--domain", "ellipse", "--precision", "extended", "lazutkin-check"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
