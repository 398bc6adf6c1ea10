use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const HEXAGON: &str = r#"{"type":"polygon2","vertices":[[1,0],[0.5,0.8660254037844386],[-0.5,0.8660254037844386],[-1,0],[-0.5,-0.8660254037844386],[0.5,-0.8660254037844386]]}"#;
const HEX_T: &str = "[[0.75,-0.4330127018922193],[0.4330127018922193,0.75]]";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bjorth")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().unwrap(), v)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("bjorth-cli-{}-{name}", std::process::id()))
}

#[test]
fn euclidean_axes_are_orthogonal() {
    let (code, v) = run_json(&["check-orth", "--operands", r#"{"x":[1,0],"y":[0,1]}"#]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["result"]["reverse"]["verdict"], "holds");
}

#[test]
fn zero_vector_holds_with_a_note() {
    let (code, v) = run_json(&["check-orth", "--operands", r#"{"x":[0,0],"y":[0,1]}"#]);
    assert_eq!(code, 0);
    assert!(v["notes"][0].as_str().unwrap().contains("convention"));
}

#[test]
fn failing_pair_exits_one() {
    // In l_4 the norming functional of (1,1) is proportional to (1,1), which
    // does not vanish on (1,0).
    let (code, v) = run_json(&["check-orth", "--p", "4", "--operands", r#"{"x":[1,1],"y":[1,0]}"#]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["line_search"]["verdict"], "fails");
}

#[test]
fn operator_check_reports_both_routes() {
    let (code, v) =
        run_json(&["check-orth", "--space", HEXAGON, "--mode", "operators", "--matrix", HEX_T, "--matrix2", "[[1,0],[0,1]]"]);
    let route = v["result"]["witness_route"]["verdict"]["verdict"].as_str().unwrap();
    let oracle = v["result"]["line_search"]["verdict"].as_str().unwrap();
    assert_eq!(route, oracle);
    assert_eq!(code, match route { "holds" => 0, "fails" => 1, _ => 2 });
    // The same input through --operands.
    let ops = format!(r#"{{"t":{{"matrix":{HEX_T}}},"a":{{"matrix":[[1,0],[0,1]]}}}}"#);
    let (code2, v2) = run_json(&["check-orth", "--space", HEXAGON, "--mode", "operators", "--operands", &ops]);
    assert_eq!((code, &v["result"]), (code2, &v2["result"]));
}

#[test]
fn hexagon_operator_norm() {
    let (code, v) = run_json(&["operator-norm", "--space", "hexagon", "--matrix", HEX_T]);
    assert_eq!(code, 0);
    let a = &v["result"]["attainment"];
    assert!((a["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    // Six vertices, listed once per antipodal pair.
    assert_eq!(a["witnesses"].as_array().unwrap().len(), 3);
}

#[test]
fn l1_operator_norm_is_exact() {
    let (code, v) =
        run_json(&["operator-norm", "--space", r#"{"type":"lp","dim":2,"p":1}"#, "--matrix", r#"{"matrix":[[0.5,0],[0.5,0]]}"#]);
    assert_eq!(code, 0);
    let a = &v["result"]["attainment"];
    assert_eq!(a["value"].as_f64().unwrap(), 1.0);
    assert_eq!(a["exact"], true);
    assert_eq!(a["witnesses"], serde_json::json!([[1.0, 0.0]]));
}

#[test]
fn identity_norm_in_three_dimensions() {
    let (code, v) = run_json(&["operator-norm", "--dim", "3", "--p", "3", "--matrix", "[[1,0,0],[0,1,0],[0,0,1]]"]);
    assert_eq!(code, 0);
    assert!((v["result"]["attainment"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn verify_suites() {
    let (code, v) = run_json(&["verify", "thm-2-10", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["counts"]["fail"], 0);
    let cases = v["checks"].as_array().unwrap().iter().filter(|c| c["description"].as_str().unwrap().starts_with("case ")).count();
    assert_eq!(cases, 32);
    assert_eq!(run(&["verify", "example-1-1"]).status.code(), Some(0));
    let (code, v) = run_json(&["verify", "prop-2-8", "--p", "3", "--resolution", "4096"]);
    assert_eq!(code, 0);
    assert_eq!(v["artifacts"]["located"].as_array().unwrap().len(), 8);
}

#[test]
fn usage_errors_exit_64() {
    let cases: &[(&[&str], &str)] = &[
        (&["verify", "nope"], "nope"),
        (&["check-orth", "--operands", r#"{"x":[1,0]}"#], "`y`"),
        (&["check-orth", "--operands", r#"{"x":[1,0,0],"y":[0,1]}"#], "`x`"),
        (&["check-orth", "--operands", "{not json"], "--operands"),
        (&["operator-norm", "--matrix", "[[1,2],[3]]"], "--matrix"),
        (&["operator-norm", "--dim", "3", "--matrix", "[[1,0],[0,1]]"], "dimension"),
        (&["check-orth", "--space", r#"{"type":"lp","dim":2}"#, "--operands", r#"{"x":[1,0],"y":[0,1]}"#], "--space"),
        (&["conjecture-search", "--p", "1"], "p"),
        (&["check-orth", "--tol", "1e-3", "--operands", r#"{"x":[1,0],"y":[0,1]}"#], "tol"),
        (&["check-orth", "--mode", "operators", "--matrix", "[[1]]"], "--matrix2"),
    ];
    for (args, needle) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(64), "{args:?}");
        let err = stderr(&o);
        assert!(err.contains(needle), "{args:?}: {err}");
        assert!(!err.contains("panicked"), "{args:?}: {err}");
    }
}

#[test]
fn scan_symmetric_points() {
    let (code, v) = run_json(&["scan-symmetric", "--space", r#"{"type":"lp","dim":2,"p":3}"#, "--kind", "left"]);
    assert_eq!(code, 0);
    let clusters = v["result"]["scan"]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 8);
    let c = 2f64.powf(-1.0 / 3.0);
    assert!(clusters.iter().any(|k| {
        let p = &k["point"];
        (p[0].as_f64().unwrap() - c).abs() < 1e-3 && (p[1].as_f64().unwrap() - c).abs() < 1e-3
    }));
    let (_, v) = run_json(&["scan-symmetric", "--p", "2"]);
    assert_eq!(v["result"]["scan"]["all_symmetric"], true);
    let (_, v) = run_json(&["scan-symmetric", "--space", "hexagon", "--resolution", "512"]);
    assert_eq!(v["result"]["scan"]["all_symmetric"], true);
}

#[test]
fn scan_in_three_dimensions_warns() {
    let o = run(&["scan-symmetric", "--dim", "3", "--p", "3", "--resolution", "32"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn conjecture_search_is_exploratory() {
    let (code, v) = run_json(&["conjecture-search", "--n", "2", "--p", "3", "--trials", "100"]);
    assert_eq!(code, 0);
    assert_eq!(v["artifacts"]["survivors"], serde_json::json!([]));
    let (code, v) = run_json(&["conjecture-search", "--n", "3", "--p", "2", "--trials", "100"]);
    assert_eq!(code, 0);
    assert_eq!(v["artifacts"]["survivors"], serde_json::json!([]));
    let (code, v) = run_json(&["conjecture-search", "--n", "3", "--p", "3", "--trials", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["suite"], "conjecture-search");
}

#[test]
fn reports_are_reproducible_and_match_stdout() {
    let (a, b) = (temp("a.json"), temp("b.json"));
    let args = |p: &PathBuf| {
        vec!["verify".to_string(), "example-2-2".into(), "--trials".into(), "50".into(), "--seed".into(), "11".into(), "--out".into(), p.display().to_string()]
    };
    let o1 = Command::new(env!("CARGO_BIN_EXE_bjorth")).args(args(&a)).output().unwrap();
    let o2 = Command::new(env!("CARGO_BIN_EXE_bjorth")).args(args(&b)).env("BJORTH_THREADS", "1").output().unwrap();
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o1.stdout, o2.stdout);
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    // The file and the human rendering come from the same report.
    let v: Value = serde_json::from_slice(&ja).unwrap();
    let human = String::from_utf8(o1.stdout).unwrap();
    for c in v["checks"].as_array().unwrap() {
        assert!(human.contains(c["description"].as_str().unwrap()));
    }
    let _ = (std::fs::remove_file(a), std::fs::remove_file(b));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_bjorth"))
        .args(["verify", "example-1-1"])
        .env("BJORTH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("BJORTH_THREADS"));
}
