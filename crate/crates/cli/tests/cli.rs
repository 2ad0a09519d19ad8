use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cubasquare::rulefile::RuleFile;
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubasquare"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

/// Counts node markers and curve overlays in a well-formed SVG document.
fn svg_counts(path: &Path) -> (usize, usize) {
    let text = fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("valid XML");
    let class = |c: &str| {
        doc.descendants()
            .filter(|n| n.attribute("class") == Some(c))
            .count()
    };
    (class("node"), class("curve"))
}

#[test]
fn padua_nodes_with_curve() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["nodes", "padua", "11", "--svg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["points"].as_array().unwrap().len(), 78);
    assert_eq!(svg_counts(&dir.path().join("padua_11.svg")), (78, 1));
}

#[test]
fn figure_cardinalities() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["nodes", "mint", "18"]);
    assert_eq!(stdout_json(&o)["points"].as_array().unwrap().len(), 180);
    let o = run(dir.path(), &["nodes", "nearmint", "17", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,y"));
    assert_eq!(text.lines().count(), 1 + 162);

    let o = run(
        dir.path(),
        &["nodes", "gencheb", "16", "--alpha", "0.5", "--beta", "0.5", "--svg", "g.svg"],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["points"].as_array().unwrap().len(), 144);
    assert_eq!(svg_counts(&dir.path().join("g.svg")), (144, 0));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["nodes", "mint", "17"])), 2);
    assert_eq!(code(&run(dir.path(), &["nodes", "nearmint", "6"])), 2);
    assert_eq!(code(&run(dir.path(), &["nodes", "hexagon", "6"])), 2);
    assert_eq!(code(&run(dir.path(), &["rule", "padua", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["rule", "cheb1", "4", "--weight", "cheb7"])), 2);
    assert_eq!(code(&run(dir.path(), &["lebesgue", "cheb1", "--n", "4", "--resolution", "16"])), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["rule", "cheb1", "8", "--out", "r.json"]);
    assert_eq!(code(&o), 0);
    let o = run(dir.path(), &["verify", "r.json"]);
    assert_eq!(code(&o), 0);
    let rep = stdout_json(&o);
    assert_eq!(rep["pass"], Value::Bool(true));
    assert_eq!(rep["nodes"], 40);

    let text = fs::read_to_string(dir.path().join("r.json")).unwrap();
    let mut f = RuleFile::from_json(&text).unwrap();
    f.lambdas[3] += 1e-3;
    fs::write(dir.path().join("bad.json"), f.to_json().unwrap()).unwrap();
    let o = run(dir.path(), &["verify", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["first_failing_degree"], 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree 0"));

    fs::write(dir.path().join("empty.json"), "").unwrap();
    assert_eq!(code(&run(dir.path(), &["verify", "empty.json"])), 2);
    fs::write(dir.path().join("junk.json"), "{\"schema_version\": 1").unwrap();
    assert_eq!(code(&run(dir.path(), &["verify", "junk.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["verify", "missing.json"])), 2);
}

#[test]
fn rule_files_round_trip() {
    let dir = TempDir::new().unwrap();
    for args in [
        ["rule", "gauss-u", "6"],
        ["rule", "padua", "5"],
        ["rule", "gencheb", "7"],
    ] {
        let o = run(dir.path(), &args);
        assert_eq!(code(&o), 0, "{args:?}");
        let text = String::from_utf8(o.stdout).unwrap();
        let f = RuleFile::from_json(&text).unwrap();
        assert!(f.oracle_report.pass);
        assert_eq!(f.to_json().unwrap().trim_end(), text.trim_end());
        let back = RuleFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }
    let o = run(dir.path(), &["rule", "cheb1", "5", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,lambda"));
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - std::f64::consts::PI.powi(2)).abs() < 1e-12);
}

#[test]
fn moment_weights_for_another_weight() {
    let dir = TempDir::new().unwrap();
    // Padua points carry a degree-9 rule for the first-kind weight only
    let o = run(dir.path(), &["rule", "padua", "5", "--weight", "cheb1"]);
    assert_eq!(code(&o), 0);
    let o = run(dir.path(), &["rule", "padua", "5", "--weight", "const"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn lebesgue_and_interp_tables() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["lebesgue", "cheb1", "--n", "4,8", "--resolution", "65"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,lebesgue,lebesgue_over_log2");
    assert_eq!(lines.len(), 3);
    let l4: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((l4 - (2.0 + 2f64.sqrt())).abs() < 1e-5, "{l4}");

    let o = run(dir.path(), &["lebesgue", "gencheb", "--n", "4", "--resolution", "65", "--format", "json"]);
    let rows = stdout_json(&o);
    assert!(rows[0]["over_power"].as_f64().unwrap() > 0.3);

    let o = run(dir.path(), &["interp", "cheb1", "--n", "8,16", "--function", "exp", "--format", "json"]);
    let rows = stdout_json(&o);
    let e8 = rows[0]["error"].as_f64().unwrap();
    let e16 = rows[1]["error"].as_f64().unwrap();
    assert_eq!(rows[1]["nodes"], 144);
    assert!(e16 < 1e-8 && e16 < 0.5 * e8);
}

#[test]
fn discover_odd_five_matches_fixture() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["discover", "odd", "5", "--seeds", "100", "--rng", "42", "--out", "d5"]);
    assert_eq!(code(&o), 0);
    let rep = stdout_json(&o);
    let fixtures = rep["fixtures"].as_array().unwrap();
    let get = |name: &str| fixtures.iter().find(|f| f["fixture"] == name).unwrap();
    assert_eq!(get("odd H5 corrected")["matches"], Value::Bool(true));
    assert_eq!(get("odd H5 as typeset")["matches"], Value::Bool(false));
    let sol = &rep["solutions"][0];
    assert_eq!(sol["nodes"], 17);
    assert_eq!(sol["verified"], Value::Bool(true));
    let rule = sol["rule_file"].as_str().unwrap();
    assert_eq!(code(&run(dir.path(), &["verify", rule])), 0);
    assert!(dir.path().join("d5/report.json").exists());
    assert!(dir.path().join("d5/solutions.json").exists());

    let o = run(dir.path(), &["plot", rule, "--svg", "d5.svg"]);
    assert_eq!(code(&o), 0);
    assert_eq!(svg_counts(&dir.path().join("d5.svg")), (17, 0));
}

#[test]
fn discover_even_six_reports_not_found() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["discover", "even", "6", "--seeds", "200", "--out", "d6"]);
    assert_eq!(code(&o), 0);
    let rep = stdout_json(&o);
    let status = rep["status"].as_str().unwrap();
    assert!(status.contains("not found") && status.contains("not a proof"), "{status}");
    assert!(rep["solutions"].as_array().unwrap().is_empty());
    let files: Vec<_> = fs::read_dir(dir.path().join("d6")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.len(), 2, "{files:?}");
}

#[test]
fn discover_odd_three_gives_verified_rules() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["discover", "odd", "3", "--out", "d3"]);
    let rep = stdout_json(&o);
    assert_eq!(rep["rule_degree"], 5);
    let sols = rep["solutions"].as_array().unwrap();
    assert!(!sols.is_empty());
    for s in sols {
        assert_eq!(s["nodes"], 7);
        let rule = s["rule_file"].as_str().unwrap();
        assert_eq!(code(&run(dir.path(), &["verify", rule])), 0);
    }
}

#[test]
fn discovery_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = run(dir.path(), &["discover", "odd", "4", "--seeds", "30", "--rng", "9", "--out", "a"]);
    let b = run(dir.path(), &["discover", "odd", "4", "--seeds", "30", "--rng", "9", "--out", "b"]);
    assert_eq!((code(&a), code(&b)), (0, 0));
    let read = |d: &str| fs::read_to_string(dir.path().join(d).join("solutions.json")).unwrap();
    assert_eq!(read("a"), read("b"));
}

#[test]
fn plot_a_node_file() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["nodes", "gauss-u", "7", "--out", "u7.json"]);
    let o = run(dir.path(), &["plot", "u7.json", "--curve", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(svg_counts(&dir.path().join("u7.svg")), (28, 1));
    fs::write(dir.path().join("x.json"), "[1, 2]").unwrap();
    assert_eq!(code(&run(dir.path(), &["plot", "x.json"])), 2);
}
