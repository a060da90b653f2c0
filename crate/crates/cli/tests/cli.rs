use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chiro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiro")).args(args).output().expect("run chiro")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Triangle `a, b, c` around `m`, given as signs.
const TRIANGLE_WITH_CENTER: &str = r#"{"labels":["a","b","c","m"],
  "signs":{"a,b,c":1,"a,b,m":1,"a,c,m":-1,"b,c,m":1}}"#;

/// Two triangles with centers, glued as a two-node tree.
const TWO_NODE_TREE: &str = r#"{
  "nodes": [
    {"id": 0, "labels": ["a","b","c","m"], "points": [[0,0],[8,0],[0,8],[2,2]]},
    {"id": 1, "labels": ["d","e","f","n"], "points": [[0,0],[8,1],[3,9],[4,3]]}
  ],
  "edges": [{"u": 0, "u_proxy": "b", "v": 1, "v_proxy": "d"}]
}"#;

#[test]
fn chain_prints_the_closed_form() {
    let o = chiro(&["chain", "--sigma", "01"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "6");
    let o = chiro(&["chain", "--sigma", "110", "--formula-only"]);
    assert_eq!(stdout(&o).trim(), "53");
    let o = chiro(&["--json", "chain", "--sigma", "0110"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "554");
}

#[test]
fn exit_codes() {
    assert_eq!(chiro(&["chain", "--sigma", "2"]).status.code(), Some(1));
    assert_eq!(chiro(&["chain"]).status.code(), Some(2));
    assert_eq!(chiro(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn validate_reports_the_violating_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, TRIANGLE_WITH_CENTER).unwrap();
    let o = chiro(&["validate", path(&good)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("valid chirotope on 4 elements"));

    // The center stays inside, but the triangle is turned clockwise.
    let bad = dir.path().join("bad.json");
    fs::write(&bad, TRIANGLE_WITH_CENTER.replace("\"a,b,c\":1", "\"a,b,c\":-1")).unwrap();
    let o = chiro(&["validate", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("interiority axiom fails on"), "{err}");

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\n\"labels\": [\"a\",\n").unwrap();
    let o = chiro(&["--json", "validate", path(&broken)]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("line 3"));
}

#[test]
fn extremes_and_hull() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.json");
    fs::write(&f, TRIANGLE_WITH_CENTER).unwrap();
    let o = chiro(&["--json", "extremes", path(&f)]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["extremes"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(v["hull"], serde_json::json!(["a", "b", "c"]));
}

#[test]
fn tree_count_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.json");
    fs::write(&f, TWO_NODE_TREE).unwrap();
    let fast = chiro(&["count", path(&f)]);
    let slow = chiro(&["count", "--brute", path(&f)]);
    assert!(fast.status.success() && slow.status.success());
    assert_eq!(stdout(&fast), stdout(&slow));

    // Decomposing the expansion recovers a tree with the same count.
    let expanded = dir.path().join("points.json");
    let o = chiro(&["realize", path(&f), "-o", path(&expanded)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d = chiro(&["decompose", path(&expanded)]);
    let canon = dir.path().join("canon.json");
    fs::write(&canon, d.stdout).unwrap();
    assert_eq!(stdout(&chiro(&["count", path(&canon)])), stdout(&fast));
    assert_eq!(stdout(&chiro(&["count", path(&expanded)])), stdout(&fast));
}

#[test]
fn random_trees_are_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = chiro(&["random-tree", "--nodes", "5", "--node-size", "5", "--max-degree", "3", "--seed", "11", "-o", path(p)]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(chiro(&["validate", path(&a)]).status.success());

    let one = chiro(&["--json", "--threads", "1", "count", path(&a)]);
    let many = chiro(&["--json", "--threads", "4", "count", path(&a)]);
    assert_eq!(stdout(&one), stdout(&many));

    let c1 = chiro(&["--json", "canonicalize", "--check-confluence", "4", path(&a)]);
    let c2 = chiro(&["--json", "canonicalize", "--seed", "9", path(&a)]);
    assert!(c1.status.success());
    assert_eq!(stdout(&c1), stdout(&c2));
}

#[test]
fn database_nodes_are_resolved() {
    let dir = tempfile::tempdir().unwrap();
    let recs = vec![vec![(0, 0), (20, 0), (0, 20), (5, 6)]];
    fs::write(dir.path().join("otypes04.b08"), chirotope::io::encode_db(&recs, 4, false).unwrap()).unwrap();
    let tree = dir.path().join("t.json");
    fs::write(
        &tree,
        r#"{"nodes":[{"id":0,"db":{"n":4,"index":0}},{"id":1,"db":{"n":4,"index":0}}],
            "edges":[{"u":0,"u_proxy":"0.1","v":1,"v_proxy":"1.0"}]}"#,
    )
    .unwrap();
    let o = chiro(&["--db-dir", path(dir.path()), "count", path(&tree)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "6");
    assert_eq!(chiro(&["count", path(&tree)]).status.code(), Some(1));
}
