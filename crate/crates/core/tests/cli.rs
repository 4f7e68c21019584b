use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galois-lines")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = bin(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn analyze_lemniscatic_curve() {
    let v = json(&["analyze", "--roots", "1/2,-1/2,0", "--json"]);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["report"]["counts"]["total"], 14);
    assert_eq!(v["passed"], true);
    let claims = v["report"]["claims"].as_array().unwrap();
    assert!(claims.iter().all(|c| c["status"] == "pass" || c["status"] == "fail"));
    let lines = v["report"]["lines"].as_array().unwrap();
    assert!(lines.iter().all(|l| l["certificate"]["checks"].as_array().unwrap().len() == 6));
}

#[test]
fn roots_one_minus_one_zero_are_also_harmonic() {
    // x^3 - x has j = 1728, so the cyclic lines are present
    let v = json(&["analyze", "--roots", "1,-1,0", "--json"]);
    assert_eq!(v["report"]["counts"]["total"], 14);
    let v = json(&["analyze", "--roots", "1/3,1/2,-5/6", "--json"]);
    assert_eq!(v["report"]["counts"]["total"], 6);
    assert_eq!(v["report"]["counts"]["z4"], 0);
}

#[test]
fn pq_input_matches_roots() {
    let a = json(&["analyze", "--pq", "-1,0", "--json"]);
    assert_eq!(a["report"]["curve"]["p"], "-1");
    assert_eq!(a["report"]["counts"]["total"], 14);
    let out = bin(&["analyze", "--pq", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not split"));
}

#[test]
fn usage_errors() {
    let out = bin(&["analyze", "--roots", "1,1,-2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("repeated root"));
    assert_eq!(bin(&["analyze", "--roots", "1,-1,0", "--pq", "-4,0"]).status.code(), Some(2));
    assert_eq!(bin(&["analyze", "--roots", "a,b,c"]).status.code(), Some(2));
    assert_eq!(bin(&["analyze", "--roots", "1,-1,0", "--tol", "1e-3"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-line", "--roots", "1,-1,0", "--edge", "1,1"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["project", "--roots", "1/2,-1/2,0", "--center", "4:1:0:1", "--verify-galois-point", "--json", "--seed", "11"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.stdout, b.stdout);
    let a = bin(&["analyze", "--roots", "1/2,-1/2,0", "--json"]);
    let b = bin(&["analyze", "--roots", "1/2,-1/2,0", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_single_lines() {
    let v = json(&["verify-line", "--roots", "1/2,-1/2,0", "--edge", "3,0", "--json"]);
    assert_eq!(v["line"]["label"], "Q0Q3");
    assert_eq!(v["line"]["certificate"]["mode"], "exact");
    assert_eq!(v["line"]["certificate"]["fixesLinePointwise"], false);
    let v = json(&["verify-line", "--roots", "1/2,-1/2,0", "--z4", "2,2", "--json"]);
    assert_eq!(v["line"]["certificate"]["mode"], "exact-gaussian");
    let v = json(&["verify-line", "--roots", "1/2,-1/2,0", "--z4", "1,3", "--json"]);
    assert_eq!(v["line"]["certificate"]["mode"], "numeric");
    assert!(v["line"]["certificate"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    assert_eq!(bin(&["verify-line", "--roots", "1/2,-1/2,0", "--z4", "1,2"]).status.code(), Some(2));
}

#[test]
fn projections() {
    let v = json(&["project", "--roots", "1/2,-1/2,0", "--center", "4:1:0:0", "--json"]);
    assert_eq!(v["classification"]["kind"], "vertex");
    assert_eq!(v["doubleCover"], true);
    assert_eq!(v["curve"]["conic"]["X*Z"], "1");

    let v = json(&["project", "--roots", "1/2,-1/2,0", "--center", "0:0:1:0", "--verify-galois-point", "--json"]);
    assert_eq!(v["classification"]["kind"], "on-galois-line");
    let form = v["curve"]["form"].as_object().unwrap();
    assert_eq!(form.len(), 4);
    assert_eq!(form["X^3*Y"], "1");
    assert_eq!(form["W^4"], "-1");
    let tests = v["galoisPointTests"].as_array().unwrap();
    let kinds: Vec<&str> = tests.iter().map(|t| t["result"]["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["V4", "Z4"]);

    let out = bin(&["project", "--roots", "1/2,-1/2,0", "--center", "1:0:0:0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lies on the curve"));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("galois-lines-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("groups.json");
    let out = bin(&["enumerate-groups", "--square-lattice", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["counts"]["galois"], 14);
    assert_eq!(v["counts"]["z4"], 8);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_output() {
    let out = bin(&["analyze", "--roots", "1/2,-1/2,0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lines (14: 6 V4, 8 Z4)"));
    assert!(text.contains("l(2,2)"));
    let out = bin(&["enumerate-groups", "--omega", "0.5,0.866025"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hexagonal"), "{text}");
}
