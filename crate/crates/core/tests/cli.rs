//! End-to-end tests of the `hcsuper` binary: exit codes, JSON shape and
//! golden reports.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hcsuper"))
        .args(args)
        .output()
        .expect("failed to run hcsuper");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, stdout, stderr) = run(args);
    let v = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {stdout}\n{stderr}"));
    (code, v)
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn temp_file(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("hcsuper-{}-{name}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

const SL2: &str = r#"{
  "basis": [{"name": "e", "parity": 0}, {"name": "f", "parity": 0}, {"name": "h", "parity": 0}],
  "brackets": [
    {"i": 0, "j": 1, "out": [{"k": 2, "coeff": "1"}]},
    {"i": 0, "j": 2, "out": [{"k": 0, "coeff": "-2"}]},
    {"i": 1, "j": 2, "out": [{"k": 1, "coeff": "2"}]}
  ],
  "form": [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "2"]],
  "cartan": [[{"k": 2, "coeff": "1"}]]
}"#;

#[test]
fn catalog_list_golden() {
    let (code, stdout, _) = run(&["catalog", "list"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, golden("catalog_list.json"));
    let v: Value = serde_json::from_str(&stdout).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "rank1-aniso-q1",
            "rank1-aniso-q2",
            "rank1-iso-q1",
            "group-sl2",
            "group-osp12",
            "group-gl12"
        ]
    );
}

#[test]
fn verify_rank_one_golden() {
    let (code, stdout, _) = run(&["verify", "rank1-aniso-q1", "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, golden("verify_rank1_aniso_q1.json"));
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["flags"]["dims_match"], true);
    assert!(v.get("elapsed").is_none());
}

#[test]
fn roots_golden() {
    let (code, stdout, _) = run(&["roots", "group-osp12"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, golden("roots_group_osp12.json"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["--seed", "7", "verify", "group-osp12", "--degree", "3"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let (_, c, _) = run(&[
        "--seed",
        "7",
        "--threads",
        "3",
        "verify",
        "group-osp12",
        "--degree",
        "3",
    ]);
    assert_eq!(a, c);
}

#[test]
fn membership_verdicts() {
    let (code, v) = run_json(&["membership", "rank1-aniso-q1", "--poly", "a", "--ring", "J"]);
    assert_eq!(code, 0);
    assert_eq!(v["member"], false);

    let poly = r#"[{"exp": {"a": 2}, "coeff": "1"}, {"exp": {}, "coeff": "-1"}]"#;
    let (_, v) = run_json(&[
        "membership",
        "rank1-aniso-q1",
        "--poly",
        poly,
        "--ring",
        "J",
    ]);
    assert_eq!(v["member"], true);

    let (_, v) = run_json(&[
        "membership",
        "rank1-aniso-q1",
        "--poly",
        r#"{"a": 2}"#,
        "--ring",
        "I",
    ]);
    assert_eq!(v["member"], true);
}

#[test]
fn gamma_of_a_square() {
    let (code, v) = run_json(&[
        "gamma",
        "rank1-aniso-q1",
        "--element",
        r#"[{"monomial": [0, 0], "coeff": "1"}]"#,
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["projection_display"], "a^2");
    assert_eq!(v["gamma_display"], "a^2 - 2*a + 1");
}

#[test]
fn invariants_report() {
    let (code, v) = run_json(&["invariants", "group-sl2", "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["dim_invariants"], 4);
    assert_eq!(v["dim_kernel"], 2);
    assert_eq!(v["dim_image"], 2);
    assert_eq!(v["in_J"], true);
    assert_eq!(v["weyl_invariant"], true);
}

#[test]
fn explicit_file_entry() {
    let path = temp_file("sl2.json", SL2);
    let p = path.to_str().unwrap();
    let (code, v) = run_json(&["validate", p]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["pair"], true);
    let (code, v) = run_json(&["verify", p, "--degree", "2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["rows"][2]["dim_image"], 2);
}

#[test]
fn invalid_file_fails_validation() {
    let broken = SL2.replace(r#"{"k": 1, "coeff": "2"}"#, r#"{"k": 1, "coeff": "3"}"#);
    let path = temp_file("broken.json", &broken);
    let (code, v) = run_json(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["verify", "no-such-entry"]).0, 2);
    assert_eq!(
        run(&["membership", "rank1-aniso-q1", "--poly", "b", "--ring", "J"]).0,
        2
    );
    assert_eq!(run(&["roots", "group-osp12", "--direction", "1,2"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let extra = SL2.replacen('{', r#"{"colour": 1,"#, 1);
    let path = temp_file("extra.json", &extra);
    let (code, _, stderr) = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("colour"));
}

#[test]
fn planted_defects_exit_1() {
    for plant in ["jacobi", "truncated-n", "multiplicity"] {
        let (code, v) = run_json(&[
            "verify",
            "rank1-aniso-q1",
            "--degree",
            "3",
            "--plant",
            plant,
        ]);
        assert_eq!(code, 1, "{plant}");
        assert_eq!(v["flags"]["dims_match"], false, "{plant}");
    }
}

#[test]
fn opposite_direction() {
    let (code, v) = run_json(&["roots", "group-osp12", "--direction=-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["rho"], serde_json::json!(["-1"]));
    let (code, v) = run_json(&["verify", "group-osp12", "--degree", "2", "--direction=-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["flags"]["dims_match"], true);
}
