use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nnil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CHAIN: &str = r#"{"vars": ["p", "q"], "worlds": ["a", "b"], "order": [["a", "b"]],
    "val": {"p": ["b"], "q": ["b"]}}"#;

const TOP_ONLY: &str = r#"{"vars": ["p", "q"], "worlds": ["x"], "val": {"p": ["x"], "q": ["x"]}}"#;

const BLANK: &str = r#"{"vars": ["p", "q"], "worlds": ["u", "v"], "order": [["u", "v"]]}"#;

#[test]
fn check_reports_normal_form() {
    let o = nnil(&["check", "p -> (q -> r)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "NNIL: yes; normal form: p -> q -> r");

    let o = nnil(&["check", "(p -> q) -> r"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "NNIL: no");

    let o = nnil(&["check", "p -> "]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
}

#[test]
fn universal_and_classes() {
    let o = nnil(&["universal", "--n", "2", "--stats"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "layers: 4 9 5, total 18");

    let o = nnil(&["classes", "--n", "1"]);
    assert_eq!(stdout(&o).trim(), "5");

    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("t1.dot");
    let o = nnil(&["universal", "--n", "1", "--dot", dot.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));

    let o = nnil(&["classes", "--n", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn outputs_are_deterministic() {
    let a = nnil(&["universal", "--n", "2"]);
    let b = nnil(&["universal", "--n", "2"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 18);
    let a = nnil(&["fnf", "(p -> q) | r"]);
    let b = nnil(&["fnf", "(p -> q) | r"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn beta_of_models() {
    let dir = tempfile::tempdir().unwrap();
    let top = write(dir.path(), "top.json", TOP_ONLY);
    let o = nnil(&["beta", &top]);
    assert_eq!(stdout(&o).trim(), "~(p & q)");

    let chain = write(dir.path(), "chain.json", CHAIN);
    let o = nnil(&["beta", &chain, "--world", "b"]);
    assert_eq!(stdout(&o).trim(), "~(p & q)");
    let literal = stdout(&nnil(&["beta", &chain]));
    let simple = stdout(&nnil(&["beta", &chain, "--simplify"]));
    assert!(literal.starts_with("true -> "));
    assert!(!simple.starts_with("true -> "));

    let o = nnil(&["beta", &chain, "--world", "zz"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn refute_against_models_and_frames() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "chain.json", CHAIN);
    let top = write(dir.path(), "top.json", TOP_ONLY);
    let blank = write(dir.path(), "blank.json", BLANK);

    let o = nnil(&["refute", "--n", &top, "--m", &chain]);
    assert_eq!(code(&o), 0);
    let map: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(map["x"], "b");

    let o = nnil(&["refute", "--n", &top, "--m", &blank]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "no witness");

    let o = nnil(&["refute", "--n", &chain, "--frame", &blank]);
    assert_eq!(code(&o), 0);
    let both: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(both["map"]["a"], "u");
    assert_eq!(both["model"]["val"]["p"], serde_json::json!(["v"]));

    let o = nnil(&["refute", "--n", &chain]);
    assert_eq!(code(&o), 2);
}

#[test]
fn canonical_and_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let wide = write(
        dir.path(),
        "wide.json",
        r#"{"vars": ["p"], "worlds": ["r", "a", "b", "c"],
            "order": [["r", "a"], ["r", "b"], ["a", "c"]],
            "val": {"p": ["b", "c"]}}"#,
    );
    let out = dir.path().join("canon.json");
    let o = nnil(&["canonical", &wide, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "0[1]");
    assert!(fs::read_to_string(&out).unwrap().contains("\"vars\""));

    let reduced = dir.path().join("reduced.json");
    let map = dir.path().join("map.json");
    let o = nnil(&[
        "reduce",
        "--in",
        &wide,
        "--out",
        reduced.to_str().unwrap(),
        "--map",
        map.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "4 worlds reduced to 2");
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&reduced).unwrap()).unwrap();
    assert_eq!(m["worlds"].as_array().unwrap().len(), 2);
    let f: serde_json::Value = serde_json::from_str(&fs::read_to_string(&map).unwrap()).unwrap();
    assert_eq!(f.as_object().unwrap().len(), 4);
    assert_eq!(f["r"], "r");
    assert_eq!(f["a"], "r");
}

#[test]
fn prove_and_countermodel() {
    let o = nnil(&["prove", "p -> p"]);
    assert_eq!(
        (code(&o), stdout(&o).trim().to_string()),
        (0, "provable".to_string())
    );

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cm.json");
    let o = nnil(&["prove", "p | ~p", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(
        stdout(&o).trim(),
        format!("unprovable (countermodel: {})", out.display())
    );
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m["worlds"].as_array().unwrap().len(), 2);

    let axioms = write(dir.path(), "axioms.txt", "# excluded middle\np | ~p\n\n");
    let o = nnil(&["countermodel", "--axioms", &axioms, "--goal", "q | ~q"]);
    assert_eq!(code(&o), 1);
    let o = nnil(&["countermodel", "--goal", "~p | ~~p", "--max-worlds", "3"]);
    assert_eq!(code(&o), 0);
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["worlds"].as_array().unwrap().len(), 3);
    let o = nnil(&["countermodel", "--goal", "p", "--max-worlds", "9"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fnf_and_classify() {
    let o = nnil(&["fnf", "p & q"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("plus: (p & q -> s_"));
    assert!(lines[2].starts_with("context: p, q, s_"));

    let o = nnil(&["classify", "~~p -> p"]);
    assert_eq!(code(&o), 1);
    let o = nnil(&["classify", "p & (q -> p)"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&nnil(&["check", "p", "--bogus"])), 2);
    assert_eq!(code(&nnil(&["frobnicate"])), 2);
    assert_eq!(code(&nnil(&["beta", "/nonexistent/model.json"])), 2);
}

#[test]
fn selftest_passes() {
    let o = nnil(&["selftest"]);
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("[PASS]")).count(),
        12,
        "{text}"
    );
    assert_eq!(code(&o), 0);
}
