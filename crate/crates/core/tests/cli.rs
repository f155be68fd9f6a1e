use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use itokit::cli::{catalog_document, parse_algebra, AlgebraDocument};
use serde_json::Value;
use tempfile::TempDir;

fn itokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itokit"))
        .args(args)
        .env_remove("ITOKIT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_catalog(dir: &TempDir, name: &str, params: &[&str]) -> PathBuf {
    let mut args = vec!["catalog", name];
    args.extend_from_slice(params);
    let out = itokit(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_wiener_passes() {
    let dir = TempDir::new().unwrap();
    let wiener = write_catalog(&dir, "wiener", &[]);
    let out = itokit(&["check", "--input", p(&wiener)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("axioms: pass"));
}

#[test]
fn broken_involution_parses_then_fails_check() {
    let dir = TempDir::new().unwrap();
    let mut doc = catalog_document("wiener", &[], 1e-9).unwrap();
    doc.star[1][1][0] += 1e-3;
    let path = dir.path().join("bent.json");
    std::fs::write(&path, doc.emit()).unwrap();
    let out = itokit(&["check", "--json", "--input", p(&path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("involution"));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], Value::Bool(false));
    assert_eq!(report["violations"][0]["axiom"], "involution");
}

#[test]
fn represent_poisson_gives_triangular_number_matrix() {
    let dir = TempDir::new().unwrap();
    let poisson = write_catalog(&dir, "poisson", &[]);
    let out = itokit(&["represent", "--input", p(&poisson), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let want = [[0.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]];
    let m = &report["matrices"]["d_m"];
    for i in 0..3 {
        for j in 0..3 {
            let re = m[i][j][0].as_f64().unwrap();
            let im = m[i][j][1].as_f64().unwrap();
            assert!((re - want[i][j]).abs() <= 1e-12 && im.abs() <= 1e-12, "({i}, {j})");
        }
    }
}

#[test]
fn decompose_mixed() {
    let dir = TempDir::new().unwrap();
    let mixed = write_catalog(&dir, "mixed_wiener_poisson", &[]);
    let out = itokit(&["decompose", "--input", p(&mixed)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("brownian=[d_w]"), "{text}");
    assert!(text.contains("levy=[d_m]"), "{text}");
    for via in ["vacuum", "thermal"] {
        let out = itokit(&["decompose", "--via", via, "--input", p(&mixed)]);
        assert_eq!(out.status.code(), Some(0), "{via}: {}", stderr(&out));
        assert!(stdout(&out).contains("levy=[d_m]"), "{via}");
    }
}

#[test]
fn thermal_split_needs_a_tag() {
    let dir = TempDir::new().unwrap();
    let wiener = write_catalog(&dir, "wiener", &[]);
    let out = itokit(&["decompose", "--via", "thermal", "--input", p(&wiener)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_reports_kind() {
    let dir = TempDir::new().unwrap();
    let hp = write_catalog(&dir, "hp", &[]);
    let out = itokit(&["classify", "--json", "--input", p(&hp)]);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["kind"], "Levy");
    assert_eq!(report["vacuum_flag"], true);
    let pw = write_catalog(&dir, "periodic_wiener", &["1", "2"]);
    let report: Value = serde_json::from_str(&stdout(&itokit(&["classify", "--json", "--input", p(&pw)]))).unwrap();
    assert_eq!(report["kind"], "Brownian");
}

#[test]
fn gns_quotients_unfaithful_input() {
    let dir = TempDir::new().unwrap();
    let zip = write_catalog(&dir, "zero_intensity_poisson", &[]);
    let out = itokit(&["gns", "--json", "--input", p(&zip)]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["null_ideal_dim"], 1);
    assert_eq!(report["gns_dim"], 0);
    assert_eq!(report["quotient_basis"], serde_json::json!(["d_t"]));
}

#[test]
fn catalog_round_trip_is_bit_exact() {
    for (name, params) in [
        ("hp", vec![]),
        ("thermal_brownian", vec!["2", "1"]),
        ("periodic_wiener", vec!["2", "3", "0.7"]),
        ("group_poisson", vec!["s3"]),
    ] {
        let mut args = vec!["catalog", name];
        args.extend(params.iter().copied());
        let text = stdout(&itokit(&args));
        let doc: AlgebraDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.emit(), text, "{name}");
        assert!(parse_algebra(&text, 1e-9).unwrap().warnings.is_empty(), "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let s3 = write_catalog(&dir, "group_poisson", &["s3"]);
    let a = itokit(&["decompose", "--json", "--input", p(&s3)]);
    let b = itokit(&["decompose", "--json", "--input", p(&s3)]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.ends_with("}\n"));
    // sorted keys: "basis" precedes "brownian" precedes "command"
    let (i, j, k) = (
        text.find("\"basis\"").unwrap(),
        text.find("\"brownian\"").unwrap(),
        text.find("\"command\"").unwrap(),
    );
    assert!(i < j && j < k);
}

#[test]
fn malformed_json_reports_position() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"dim\": 2,\n  oops\n}").unwrap();
    let out = itokit(&["check", "--input", p(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3, column 3"), "{}", stderr(&out));
}

#[test]
fn wrong_mul_shape_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let mut doc = catalog_document("poisson", &[], 1e-9).unwrap();
    doc.mul.pop();
    let path = dir.path().join("short.json");
    std::fs::write(&path, doc.emit()).unwrap();
    let out = itokit(&["check", "--input", p(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mul: expected n×n×n"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(itokit(&["bogus"]).status.code(), Some(2));
    assert_eq!(itokit(&["check"]).status.code(), Some(2));
    assert_eq!(
        itokit(&["check", "--input", "/no/such/file.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        itokit(&["catalog", "thermal_brownian", "1", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(itokit(&["catalog", "gauss"]).status.code(), Some(2));
    assert_eq!(itokit(&["--tol", "-1", "catalog", "wiener"]).status.code(), Some(2));
    assert_eq!(itokit(&["--help"]).status.code(), Some(0));
}

#[test]
fn tolerance_flag_beats_environment() {
    let dir = TempDir::new().unwrap();
    let wiener = write_catalog(&dir, "wiener", &[]);
    let run = |args: &[&str], env: Option<&str>| -> Value {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_itokit"));
        cmd.args(args).env_remove("ITOKIT_TOL");
        if let Some(v) = env {
            cmd.env("ITOKIT_TOL", v);
        }
        serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap()
    };
    let base = ["check", "--json", "--input", p(&wiener)];
    assert_eq!(run(&base, None)["tol"].as_f64(), Some(1e-9));
    assert_eq!(run(&base, Some("1e-6"))["tol"].as_f64(), Some(1e-6));
    let mut flagged = base.to_vec();
    flagged.extend(["--tol", "1e-3"]);
    assert_eq!(run(&flagged, Some("1e-6"))["tol"].as_f64(), Some(1e-3));
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("hp.json");
    let out = itokit(&["catalog", "hp", "--out", p(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc = parse_algebra(&std::fs::read_to_string(&target).unwrap(), 1e-9).unwrap();
    assert_eq!(doc.algebra, itokit::catalog::hp());
    assert!(doc.vacuum.is_some());
}

#[test]
fn group_checks() {
    let out = itokit(&["group", "convolution", "--group", "z2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = itokit(&[
        "group",
        "convolution",
        "--group",
        "z2",
        "--lambda",
        "0.5",
        "0.5",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["self_inverse"], false);
    assert!(report["self_inverse_residual"].as_f64().unwrap() > 0.1);
    let out = itokit(&["group", "spectral", "--group", "s3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(itokit(&["group", "spectral", "--group", "a5"]).status.code(), Some(2));
}

#[test]
fn fock_subcommands() {
    let dir = TempDir::new().unwrap();
    let wiener = write_catalog(&dir, "wiener", &[]);
    let out = itokit(&["fock", "simulate", "--input", p(&wiener), "--element", "d_w", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let second = report["elements"]["d_w"]["moments"][1][0].as_f64().unwrap();
    assert!((second - 1.0).abs() < 1e-10);

    let hp = write_catalog(&dir, "hp", &[]);
    let out = itokit(&["fock", "verify", "--input", p(&hp)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    assert_eq!(
        itokit(&["fock", "modes", "--k", "1", "--rho", "2", "--cells", "3"])
            .status
            .code(),
        Some(0)
    );
    let out = itokit(&["fock", "modes", "--k", "1", "--rho", "2", "--cells", "2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["aliased"], serde_json::json!([[-1, 1], [1, -1]]));

    let big = write_catalog(&dir, "group_poisson", &["s3"]);
    let out = itokit(&["fock", "simulate", "--input", p(&big), "--cells", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds the cap"));
}
