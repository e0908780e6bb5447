use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_padic-sde");

fn config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(sub: &str, cfg: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    Command::new(BIN)
        .arg(sub)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("PADIC_SDE_SEED")
        .output()
        .unwrap()
}

#[test]
fn default_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "v.toml", "p = 3\nprecision = 6\n[verify]\ntrials = 200\n");
    let out = run("verify", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("o/by_parts.json")).unwrap()).unwrap();
    for r in report.as_array().unwrap() {
        assert_eq!(r["max_residual"], 0.0);
    }
}

#[test]
fn unknown_key_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "bad.toml", "p = 3\nprecision = 6\n\n[charfun]\nbeta = 1.0\nm_lo = 0\nm_hi = 2\ncolour = 1\n");
    let out = run("charfun", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml:8:"), "{err}");
}

#[test]
fn missing_section_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", "p = 3\nprecision = 6\n");
    assert_eq!(run("solve", &cfg, &dir.path().join("o"), &[]).status.code(), Some(2));
}

#[test]
fn failed_assertion_exits_one_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let body = "p = 5\nprecision = 6\n[verify]\ntrials = 10\nchar_points = [7]\ngamma = \"1/5\"\nchar_samples = 50\n[tolerances]\nmc = 0.0001\n";
    let cfg = config(dir.path(), "f.toml", body);
    let out = run("verify", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("char_expectation.json"));
    assert!(dir.path().join("o/manifest.json").exists());
}

#[test]
fn drift_only_solution_is_shifted_time() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"p = 3
precision = 6
depth = 2
[solve]
xi0 = "2"
drift = { kind = "constant", value = "1" }
diffusion = { kind = "constant", value = "0" }
"#;
    let cfg = config(dir.path(), "s.toml", body);
    let out = run("solve", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("o/solution.csv")).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let t: padic_sde::padic::PAdic = rec[1].parse().unwrap();
        let xi: padic_sde::padic::PAdic = rec[2].parse().unwrap();
        assert!(xi.agrees_with(&(&t + &padic_sde::padic::PAdic::from_int(3, 6, 2))), "{xi} at {t}");
    }
}

#[test]
fn seed_flag_and_env_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/solve.toml");
    let a = run("solve", &cfg, &dir.path().join("a"), &["--seed", "5"]);
    assert!(a.status.success());
    let b = Command::new(BIN)
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("b"))
        .env("PADIC_SDE_SEED", "5")
        .output()
        .unwrap();
    assert!(b.status.success());
    assert_eq!(fs::read(dir.path().join("a/solution.csv")).unwrap(), fs::read(dir.path().join("b/solution.csv")).unwrap());
    let m: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 5);
}
