use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distrode"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

/// The fields of a report that goldens pin down.
fn summary(r: &Value) -> Value {
    let interfaces = r["validation"]["interfaces"]
        .as_array()
        .map(|v| v.iter().map(|s| json!({"x": s["x"], "classification": s["classification"]})).collect::<Vec<_>>())
        .unwrap_or_default();
    json!({
        "exit_code": r["exit_code"],
        "existence": r["existence"],
        "interfaces": interfaces,
        "residuals": r["residuals"],
    })
}

fn close(got: &Value, want: &Value) -> bool {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            (a - b).abs() <= 1e-12 + 1e-9 * b.abs()
        }
        (Value::Object(a), Value::Object(b)) => {
            a.len() == b.len() && a.iter().all(|(k, v)| b.get(k).is_some_and(|w| close(v, w)))
        }
        (Value::Array(a), Value::Array(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(x, y)),
        _ => got == want,
    }
}

const GOLDEN_CASES: [(&str, &str); 7] = [
    ("solve", "interacting.json"),
    ("solve", "partial_from_left.json"),
    ("solve", "partial_affine.json"),
    ("solve", "smooth_bvp.json"),
    ("beam", "beam_stepped.json"),
    ("beam", "beam_cracked.json"),
    ("check-reg", "pairs.json"),
];

/// Set `DISTRODE_BLESS=1` to rewrite the goldens from the current output.
#[test]
fn fixtures_match_goldens() {
    let bless = std::env::var("DISTRODE_BLESS").is_ok_and(|v| v == "1");
    for (cmd, name) in GOLDEN_CASES {
        let dir = tempfile::tempdir().unwrap();
        run(&[cmd, fixture(name).to_str().unwrap()], dir.path());
        let got = summary(&report(dir.path()));
        let golden = fixture("goldens").join(name);
        if bless {
            fs::create_dir_all(golden.parent().unwrap()).unwrap();
            fs::write(&golden, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
            continue;
        }
        let want: Value = serde_json::from_str(&fs::read_to_string(&golden).unwrap()).unwrap();
        assert!(close(&got, &want), "{name}:\n{got:#}\nvs golden\n{want:#}");
    }
}

#[test]
fn interacting_fixture_solves() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", fixture("interacting.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["validation"]["interfaces"][0]["classification"], "interacting");
    assert_eq!(r["existence"]["kind"], "unique");
    let delta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("delta.json")).unwrap()).unwrap();
    let terms = delta["terms"].as_array().unwrap();
    let coef = |k: u64| terms.iter().find(|t| t["order"] == k).unwrap()["re"].as_f64().unwrap();
    assert!((coef(0) - 0.375).abs() < 1e-9 && (coef(1) + 0.125).abs() < 1e-9);
    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,side,d0_re,d0_im,d1_re,d1_im\n"));
    // both lateral rows at the singular point
    assert!(csv.contains(",left,") && csv.contains(",right,"));
}

#[test]
fn inconsistent_left_data_has_no_solution() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", fixture("partial_from_left.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 3);
    let r = report(dir.path());
    assert_eq!(r["existence"]["kind"], "none");
    assert_eq!(r["validation"]["interfaces"][0]["classification"], "partially_interacting");
    assert!(!dir.path().join("solution.csv").exists());
}

#[test]
fn affine_family_emits_representative() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", fixture("partial_affine.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 4);
    let r = report(dir.path());
    assert_eq!(r["existence"], json!({"kind": "affine_family", "dimension": 1}));
    assert!(dir.path().join("solution.csv").exists());
}

#[test]
fn malformed_json_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", fixture("malformed.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4 column 1"), "{err}");
    assert_eq!(report(dir.path())["exit_code"], 2);
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "/nonexistent/problem.json"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn tight_residual_tolerance_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("interacting.json");
    let o = run(&["solve", f.to_str().unwrap(), "--residual-tol", "1e-300"], dir.path());
    assert_eq!(code(&o), 1);
    assert_eq!(report(dir.path())["message"], "residual above tolerance");
}

#[test]
fn beam_fixture_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["beam", fixture("beam_stepped.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1002);
    assert_eq!(csv.lines().next(), Some("x,w,w1"));
    let k: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("constants.json")).unwrap()).unwrap();
    assert!(k["comparison"]["max_rel_diff"].as_f64().unwrap() <= 1e-8);
    assert_eq!(k["comparison"]["agrees"], true);

    let o = run(&["beam", fixture("beam_stepped.json").to_str().unwrap(), "--mesh", "11"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(dir.path().join("curves.csv")).unwrap().lines().count(), 12);
}

#[test]
fn negative_crack_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["beam", fixture("beam_negative_crack.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("K0"));
}

#[test]
fn check_reg_pairs_converge() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check-reg", fixture("pairs.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("pair,test,side,eps,residual,slope\n"));
    // delta * H against x t(x) from the plus side decays like eps
    let col: Vec<f64> = csv
        .lines()
        .filter(|l| l.starts_with("delta-H,x*exp(-1*x^2/4),plus,"))
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(col.len(), 8);
    assert!(col.windows(2).all(|w| w[1] < w[0]), "{col:?}");
    // constant coefficients are reproduced exactly
    assert!(csv
        .lines()
        .filter(|l| l.starts_with("constant,"))
        .all(|l| l.split(',').nth(4).unwrap().parse::<f64>().unwrap() <= 1e-8));
}

#[test]
fn check_reg_accepts_problem_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check-reg", fixture("interacting.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let pairs: Vec<&str> = r["sequences"].as_array().unwrap().iter().map(|s| s["pair"].as_str().unwrap()).collect();
    assert_eq!(pairs, ["a0", "b2"]);
}

#[test]
fn empty_schedule_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for s in ["", "7..3"] {
        let o = run(&["check-reg", fixture("pairs.json").to_str().unwrap(), "--schedule", s], dir.path());
        assert_eq!(code(&o), 2, "{s:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let f = fixture("interacting.json");
    run(&["solve", f.to_str().unwrap()], a.path());
    let o = Command::new(env!("CARGO_BIN_EXE_distrode"))
        .args(["solve", f.to_str().unwrap(), "--out"])
        .arg(b.path())
        .env("DISTRODE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    for name in ["solution.csv", "delta.json", "report.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let g = fixture("beam_cracked.json");
    run(&["beam", g.to_str().unwrap()], a.path());
    run(&["beam", g.to_str().unwrap()], b.path());
    for name in ["curves.csv", "constants.json", "report.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}
