use std::io::Write;
use std::process::{Command, Output};

fn conformal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conformal")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BERGER_FRAME: &str = r#"{
  "model": "product",
  "factors": [
    {
      "model": "frame",
      "label": "Berger sphere",
      "metric": [["4", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
      "brackets": [
        {"a": 0, "b": 1, "k": 2, "value": "2"},
        {"a": 1, "b": 2, "k": 0, "value": "2"},
        {"a": 2, "b": 0, "k": 1, "value": "2"}
      ]
    },
    {"model": "circle"}
  ]
}"#;

const CONFORMALLY_FLAT_CHART: &str = r#"{
  "model": "chart",
  "point": ["0", "0", "0", "0"],
  "metric": [
    [{"num": [{"coefficient": "1", "exponents": [0, 0, 0, 0]}, {"coefficient": "1/4", "exponents": [2, 0, 0, 0]}]}, {"num": []}, {"num": []}, {"num": []}],
    [{"num": []}, {"num": [{"coefficient": "1", "exponents": [0, 0, 0, 0]}, {"coefficient": "1/4", "exponents": [2, 0, 0, 0]}]}, {"num": []}, {"num": []}],
    [{"num": []}, {"num": []}, {"num": [{"coefficient": "1", "exponents": [0, 0, 0, 0]}, {"coefficient": "1/4", "exponents": [2, 0, 0, 0]}]}, {"num": []}],
    [{"num": []}, {"num": []}, {"num": []}, {"num": [{"coefficient": "1", "exponents": [0, 0, 0, 0]}, {"coefficient": "1/4", "exponents": [2, 0, 0, 0]}]}]
  ]
}"#;

fn model_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn berger_suite_passes() {
    let o = conformal(&["verify", "--suite", "berger", "--model", "berger-s1", "--t", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("berger.star_rho"), "{out}");
    assert!(out.contains("-96"), "{out}");
}

#[test]
fn failing_checks_exit_with_one_and_print_the_table() {
    // an Einstein metric makes the four linearizations linearly dependent
    let o = conformal(&["verify", "--suite", "naturality", "--model", "fs-cp2", "--jet-order", "5", "--trials", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("naturality.rank") && stdout(&o).contains("FAIL"));
    assert!(stderr(&o).contains("checks failed"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["verify", "--suite", "nonsense"][..],
        &["verify", "--suite", "berger", "--model", "nowhere"],
        &["verify", "--suite", "berger", "--tol", "-1"],
        &["verify", "--suite", "product_factorization", "--model", "berger-cp2", "--exact"],
    ] {
        let o = conformal(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn exact_mode_names_the_irrational_quantity() {
    let o = conformal(&["verify", "--suite", "berger", "--model", "berger-s1", "--t", "2", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("not representable") && err.contains('√'), "{err}");
}

#[test]
fn json_reports_are_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let o = conformal(&[
            "verify", "--suite", "thm_pfaffian", "--trials", "3", "--seed", seed, "--json", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(path).unwrap()
    };
    let (a, b, c) = (run("a.json", "5"), run("b.json", "5"), run("c.json", "6"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn frame_models_load_from_files() {
    let f = model_file(BERGER_FRAME);
    let o = conformal(&["verify", "--suite", "thm_pfaffian", "--model", f.path().to_str().unwrap(), "--exact"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn chart_models_load_from_files() {
    let f = model_file(CONFORMALLY_FLAT_CHART);
    let o = conformal(&["verify", "--suite", "thm_invariance", "--model", f.path().to_str().unwrap(), "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn malformed_model_files_are_configuration_errors() {
    let f = model_file(r#"{"model": "frame", "metric": []}"#);
    let o = conformal(&["verify", "--suite", "berger", "--model", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
