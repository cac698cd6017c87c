use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pie-solve"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn job(dir: &Path, body: &str) -> String {
    write_config(dir, "job.json", body)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn profile_example1() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0.5,"discretization":{"ny":65,"y_depth":0}}"#,
    );
    let out = run(&["profile", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("y,re_D1,im_D1,abs_D1\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 65);
    let min = rows.iter().min_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((min[0] - 2f64.ln()).abs() < 1.0 / 64.0);
    for r in &rows {
        assert!((r[1] - (1.0 - 0.5 * r[0].exp())).abs() < 1e-9);
    }
}

#[test]
fn profile_at_zero_kappa_is_one() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0}"#,
    );
    let out = run(&["profile", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    for r in csv_rows(&String::from_utf8(out.stdout).unwrap()) {
        assert_eq!((r[1], r[2]), (1.0, 0.0));
    }
}

#[test]
fn malformed_expression_reports_offset() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"expr","k":"exp(x - * s)"},"kappa":1}"#,
    );
    let out = run(&["profile", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte 8"), "{err}");
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.json");
    assert_eq!(
        run(&["classify", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":1,"discretization":{"nx":2}}"#,
    );
    assert_eq!(run(&["classify", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"}}"#,
    );
    // kappa missing
    assert_eq!(run(&["classify", "--config", &cfg]).status.code(), Some(2));
    // solve without rhs
    assert_eq!(
        run(&["solve", "--config", &cfg, "--kappa", "0.2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn classify_verdicts() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0.2}"#,
    );
    let out = run(&["classify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "regular");

    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example2"},"kappa":2}"#,
    );
    let v = stdout_json(&run(&["classify", "--config", &cfg]));
    assert_eq!(v["verdict"], "essential");
    assert!((v["zeros"][0]["y0"].as_f64().unwrap() - 0.5).abs() < 1e-6);

    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"expr","k":"1"},"kappa":1}"#,
    );
    let v = stdout_json(&run(&["classify", "--config", &cfg]));
    assert_eq!(v["verdict"], "characteristic");
    assert_eq!(v["intervals"], serde_json::json!([[0.0, 1.0]]));
}

#[test]
fn kappa_override() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0.2}"#,
    );
    let v = stdout_json(&run(&["classify", "--config", &cfg, "--kappa", "0.5"]));
    assert_eq!(v["verdict"], "essential");
    let v = stdout_json(&run(&[
        "classify", "--config", &cfg, "--kappa", "0.3+0.4i", "--nx", "8",
    ]));
    assert_eq!(v["verdict"], "regular");
}

#[test]
fn indeterminate_exit_4() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0.5,"discretization":{"y_depth":0}}"#,
    );
    let out = run(&["classify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout_json(&out)["error"], "indeterminate");
}

#[test]
fn solve_example2_closed_form() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("f.csv");
    let cfg = job(
        dir.path(),
        &format!(
            r#"{{"kernel":{{"type":"builtin","name":"example2"}},"rhs":"exp(x)*sqrt(y)","kappa":0.5,"output":{{"path":{:?}}}}}"#,
            csv.to_str().unwrap()
        ),
    );
    let out = run(&["solve", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = stdout_json(&out);
    assert!(summary["residual_max"].as_f64().unwrap() <= 1e-9);
    assert_eq!(summary["verdict"], "regular");
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("f.sidecar.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar, summary);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,re_f,im_f\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 24 * 24);
    for r in rows {
        let want = r[0].exp() * r[1].sqrt() / (1.0 - 0.5 * r[1]);
        assert!((r[2] - want).abs() <= 1e-8);
        assert_eq!(r[3], 0.0);
    }
}

#[test]
fn solve_divergent_condition_ii_exit_6() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("f.csv");
    let cfg = job(
        dir.path(),
        &format!(
            r#"{{"kernel":{{"type":"expr","k":"exp(x−s)*y"}},"rhs":"exp(x)*sqrt(y)","kappa":2,"output":{{"path":{:?}}}}}"#,
            csv.to_str().unwrap()
        ),
    );
    let out = run(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(6));
    let v = stdout_json(&out);
    assert_eq!(v["condition_II"]["verdict"], "divergent");
    assert!(!csv.exists());
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("f.sidecar.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["error"], "condition_II_divergent");
}

#[test]
fn solve_characteristic_exit_5() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"expr","k":"1"},"rhs":"x","kappa":1}"#,
    );
    let out = run(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(stdout_json(&out)["error"], "characteristic");
}

#[test]
fn solve_homogeneous_is_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"rhs":"0","kappa":0.2,"discretization":{"nx":8,"ny":8}}"#,
    );
    let out = run(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    for r in csv_rows(&String::from_utf8(out.stdout).unwrap()) {
        assert_eq!((r[2], r[3]), (0.0, 0.0));
    }
}

#[test]
fn eigen_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example2"},"discretization":{"nx":12,"y_depth":0}}"#,
    );
    let out = run(&["eigen", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["detected"], serde_json::json!([]));

    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"expr","k":"1"},"discretization":{"nx":12,"y_depth":0}}"#,
    );
    let v = stdout_json(&run(&["eigen", "--config", &cfg]));
    let d = &v["detected"][0];
    assert!((d["lambda"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(d["support"], serde_json::json!([0.0, 1.0]));

    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"expr","k":"0"},"discretization":{"nx":6,"y_depth":0}}"#,
    );
    let v = stdout_json(&run(&["eigen", "--config", &cfg]));
    assert_eq!(v["detected"], serde_json::json!([]));
    for node in v["curves"].as_array().unwrap() {
        for e in node["eigenvalues"].as_array().unwrap() {
            assert_eq!(e["re"].as_f64(), Some(0.0));
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example2"},"rhs":"exp(x)*sqrt(y)","kappa":0.5,"discretization":{"nx":12,"ny":12}}"#,
    );
    for cmd in ["profile", "solve", "classify"] {
        let a = run(&[cmd, "--config", &cfg]);
        let b = run(&[cmd, "--config", &cfg]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn json_formats() {
    let dir = TempDir::new().unwrap();
    let cfg = job(
        dir.path(),
        r#"{"kernel":{"type":"builtin","name":"example1"},"kappa":0.2,"rhs":"x+y","discretization":{"nx":4,"ny":4},"output":{"format":"json"}}"#,
    );
    let v = stdout_json(&run(&["profile", "--config", &cfg]));
    assert_eq!(v["y"].as_array().unwrap().len(), 65);
    let v = stdout_json(&run(&["solve", "--config", &cfg]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn verify_passes_and_detects_misconfiguration() {
    let out = run(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("[PASS]")).count() >= 10);

    let out = run(&["verify", "--zero-tol", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("[FAIL]") && l.contains("singular set")));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        pie_cli::config::JobConfig::from_json(&text)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
