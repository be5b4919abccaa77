use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tseg")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tseg-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_y3_plain_has_seven_classes() {
    let tree = scratch("y3.tree", "# the tree Y3\nr(a(b,c))\n");
    let out = scratch("y3.json", "");
    let o = tseg(&["segal", "build", "--input", s(&tree), "--flavour", "plain", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["level_sizes"][1], 7);
    let x: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(x["levels"][1].as_array().unwrap().len(), 7);
}

#[test]
fn hall_table_of_a_path_is_symmetric() {
    let tree = scratch("p4.tree", "a(b(c(d)))");
    let out = scratch("p4.json", "");
    assert!(tseg(&["segal", "build", "--input", s(&tree), "--flavour", "plain", "--trunc", "3", "--out", s(&out)])
        .status
        .success());
    let o = tseg(&["hall", "table", "--input", s(&out)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(rows.iter().any(|q| q[0] == r[1] && q[1] == r[0] && q[2] == r[2] && q[3] == r[3]), "{r:?}");
    }
    let o = tseg(&["hall", "check", "--input", s(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["commutative"], true);
}

#[test]
fn verify_reports_exit_codes() {
    let rigid = scratch("rigid.tree", "a(b(c),d(e))");
    assert_eq!(
        tseg(&["segal", "verify", "--input", s(&rigid), "--flavour", "labelled", "--trunc", "4"]).status.code(),
        Some(0)
    );
    let o = tseg(&["segal", "verify", "--input", s(&rigid), "--flavour", "plain", "--trunc", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["two_segal"], false);
    let graph = scratch("path.graph", "a-b\nb-c\n");
    assert_eq!(tseg(&["graph", "verify", "--input", s(&graph), "--trunc", "4"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(tseg(&["segal", "build"]).status.code(), Some(2));
    assert_eq!(tseg(&["nonsense"]).status.code(), Some(2));
    let bad = scratch("bad.tree", "a(b");
    let o = tseg(&["segal", "build", "--input", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
}

#[test]
fn double_export_writes_dot_and_squares() {
    let tree = scratch("cherry.tree", "a(b,c)");
    let x = scratch("cherry.json", "");
    assert!(tseg(&["segal", "build", "--input", s(&tree), "--trunc", "4", "--out", s(&x)]).status.success());
    let dot = scratch("cherry.dot", "");
    let squares = scratch("cherry.squares.json", "");
    let o = tseg(&["double", "export", "--input", s(&x), "--dot", s(&dot), "--squares", s(&squares), "--strict"]);
    assert!(o.status.success());
    let dot = fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("kind=hor, arrowhead=vee") && dot.contains("kind=ver"));
    let sq: serde_json::Value = serde_json::from_str(&fs::read_to_string(squares).unwrap()).unwrap();
    for square in sq.as_array().unwrap() {
        let edges = square["edges"].as_array().unwrap();
        assert_eq!(edges.len(), 4);
        assert!(dot.contains(&format!("id=\"{}\"", edges[1].as_str().unwrap())));
    }
    let o = tseg(&["double", "census", "--input", s(&x)]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["stable"]["holds"], true);
}

#[test]
fn operad_listing_and_verification() {
    let tree = scratch("two.tree", "r(a(g),b)");
    let x = scratch("two.json", "");
    assert!(tseg(&["segal", "build", "--input", s(&tree), "--flavour", "planar", "--trunc", "3", "--out", s(&x)])
        .status
        .success());
    let o = tseg(&["operad", "ops", "--input", s(&x), "--max-arity", "2"]);
    let rows = stdout_json(&o);
    let pair =
        rows.as_array().unwrap().iter().find(|r| r["operations"].as_array().unwrap().len() == 2).expect("a double set");
    let inputs: Vec<String> = pair["inputs"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
    let profile = format!("{}|{}", inputs.join(","), pair["output"]);
    let o = tseg(&["operad", "ops", "--input", s(&x), "--profile", &profile]);
    assert_eq!(stdout_json(&o)[0]["operations"].as_array().unwrap().len(), 2);
    assert_eq!(tseg(&["operad", "verify", "--input", s(&x)]).status.code(), Some(0));
    assert_eq!(tseg(&["operad", "ops", "--input", s(&x), "--profile", "1,2"]).status.code(), Some(2));
}

#[test]
fn umap_check_prints_verdicts() {
    let tree = scratch("edge.tree", "a(b)");
    let o = tseg(&["umap", "check", "--tree", s(&tree), "--flavour", "plain"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["culf"]["holds"], true);
    assert_eq!(v["relatively_segal"]["holds"], false);
    assert!(v["relatively_segal"]["witness"].is_string());
}

#[test]
fn reproduce_is_deterministic() {
    let a = tseg(&["reproduce", "--seed", "7"]);
    let b = tseg(&["reproduce", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("lower subtrees") && l.ends_with(" ok")));
    let differ = text.lines().filter(|l| l.ends_with(" differs")).count();
    assert_eq!(a.status.code(), Some(if differ == 0 { 0 } else { 1 }));
}
