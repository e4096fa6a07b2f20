use std::path::Path;
use std::process::{Command, Output};

use bloch_wco::Verdict;
use bloch_wco_cli::{Report, SEED_ENV};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bloch-wco"));
    c.env_remove(SEED_ENV);
    c
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#""sup": {"n_uniform": 3000, "n_boundary": 3000}"#;

fn identity_config() -> String {
    format!(
        r#"{{"domain": {{"kind": "ball", "dim": 2}}, "psi": "1", "phi": ["z1", "z2"],
            "checks": ["bounded", "compact", "norm_bounds"], {SMALL}}}"#
    )
}

#[test]
fn analyze_identity_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "id.json", &identity_config());
    let out = dir.path().join("report.json");
    let o = bin().args(["analyze", "--config", &cfg, "--out", out.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let r = Report::from_json(&text).unwrap();
    assert_eq!(r.seed, 42);
    assert_eq!(r.results.bounded.as_ref().unwrap().verdict, Verdict::Yes);
    assert_eq!(r.results.compact.as_ref().unwrap().verdict, Verdict::No);
    let nb = r.results.norm_bounds.as_ref().unwrap();
    assert!((nb.lower - 1.0).abs() < 1e-6 && (nb.upper - 1.0).abs() < 1e-6);
    // emitted numbers are already rounded, so a parse/emit cycle is exact
    assert_eq!(r.to_json(), text);
}

#[test]
fn analyze_log_symbol_on_ball() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        &format!(
            r#"{{"domain": {{"kind": "ball", "dim": 2}}, "psi": "0.5*plog(1 - hdot((1, 0)))",
                "phi": ["(1 - z1)/2", "(0 - z2)/2"], "checks": ["bounded"], {SMALL}}}"#
        ),
    );
    let o = bin().args(["analyze", "--config", &cfg]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.results.bounded.unwrap().verdict, Verdict::Yes);
    assert!(r.results.psi_hinf.unwrap().divergent);
}

#[test]
fn analyze_hinf_target_and_fields_check() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "h.json",
        &format!(
            r#"{{"domain": {{"kind": "ball", "dim": 2}}, "psi": "1", "phi": ["0.9*z1", "0.9*z2"],
                "target": "hinf", "checks": ["bounded", "norm_bounds", "fields"], {SMALL}}}"#
        ),
    );
    let o = bin().args(["analyze", "--config", &cfg]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = Report::from_json(&stdout(&o)).unwrap();
    let h = r.results.hinf.unwrap();
    assert_eq!(h.bounded, Verdict::Yes);
    assert!((h.norm.unwrap() - 0.5 * 19f64.ln()).abs() < 1e-3);
    assert_eq!(r.results.fields.unwrap().len(), 9);
}

#[test]
fn map_leaving_the_domain_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"domain": {"kind": "disk"}, "psi": "1", "phi": ["1.5*z1"], "checks": ["bounded"]}"#);
    let o = bin().args(["analyze", "--config", &cfg]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not a self-map"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let syntax = write(dir.path(), "s.json", r#"{"domain": {"kind": "disk"}, "psi": "z1 +", "phi": ["z1"], "checks": ["bounded"]}"#);
    let o = bin().args(["analyze", "--config", &syntax]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"), "{}", stderr(&o));

    let o = bin().args(["analyze", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let broken = write(dir.path(), "b.json", "{not json");
    let o = bin().args(["analyze", "--config", &broken]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_sources() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"domain": {"kind": "disk"}, "psi": "1", "phi": ["z1"], "checks": ["fields"]}"#,
    );
    let seed_of = |o: Output| Report::from_json(&stdout(&o)).unwrap().seed;
    let o = bin().args(["analyze", "--config", &cfg]).env(SEED_ENV, "7").output().unwrap();
    assert_eq!(seed_of(o), 7);
    let o = bin().args(["analyze", "--config", &cfg, "--seed", "9"]).env(SEED_ENV, "7").output().unwrap();
    assert_eq!(seed_of(o), 9);
    let o = bin().args(["analyze", "--config", &cfg]).env(SEED_ENV, "seven").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fields_grid_export() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "d.json", r#"{"domain": {"kind": "disk"}, "psi": "1", "phi": ["z1"], "checks": ["fields"]}"#);
    let out = dir.path().join("grid.csv");
    let o = bin()
        .args(["fields", "--config", &cfg, "--grid", "101", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let head = rdr.headers().unwrap().clone();
    let tau = head.iter().position(|h| h == "tau_upper").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    let inside = (0..101)
        .flat_map(|i| (0..101).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let (x, y) = (-1.0 + 0.02 * i as f64, -1.0 + 0.02 * j as f64);
            x * x + y * y < 1.0 - 1e-9
        })
        .count();
    assert_eq!(rows.len(), inside);
    assert!(rows.iter().all(|r| &r[tau] == "1"));

    let o = bin().args(["fields", "--config", &cfg, "--grid", "1", "--out", out.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_check() {
    let o = bin().args(["parse-check", "--expr", "-z1^2 + 2*z2", "--dim", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-z1^2 + 2*z2");
    let o = bin().args(["parse-check", "--expr", "conj(z1)", "--dim", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"));
}

#[test]
fn suite_filter_and_negative_control() {
    let o = bin().args(["paper-suite", "--filter", "little-bloch"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("2 of 2 fixtures passed"));

    let o = bin().args(["paper-suite", "--filter", "little-bloch", "--tol-decay", "1e-6"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    let o = bin().args(["paper-suite", "--filter", "no-such-fixture"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
