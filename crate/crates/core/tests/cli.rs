use std::process::{Command, Output};

use serde_json::Value;

fn theta_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-lab"))
        .args(args)
        .env_remove("THETA_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn rseq_listed_values() {
    let o = theta_lab(&["rseq", "--k", "6", "--format", "plain"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1 3 9 22 51 108 221\n");
    assert_eq!(stdout(&theta_lab(&["rseq", "--k", "0"])), "1\n");
    let csv = stdout(&theta_lab(&["rseq", "--k", "38", "--format", "csv"]));
    assert_eq!(csv.lines().last(), Some("38,254170332"));
}

#[test]
fn exit_codes() {
    assert_eq!(theta_lab(&["gcoeffs", "--j", "1", "--n", "3"]).status.code(), Some(2));
    assert_eq!(theta_lab(&["verify", "--m-max", "0", "--j-max", "4"]).status.code(), Some(2));
    assert_eq!(theta_lab(&["numcheck", "--q", "0.2", "--j-max", "2", "--n", "4"]).status.code(), Some(2));
    assert_eq!(theta_lab(&["rseq"]).status.code(), Some(2));
    assert_eq!(theta_lab(&["--version"]).status.code(), Some(0));
}

#[test]
fn gcoeffs_matches_hseries_in_certified_range() {
    let g = stdout(&theta_lab(&["gcoeffs", "--j", "5", "--n", "12"]));
    assert_eq!(g.split_whitespace().count(), 13);
    let h = stdout(&theta_lab(&["hseries", "--m", "2", "--j", "5", "--k", "12"]));
    assert_eq!(g, h);

    for (m, j) in [(1u64, 2u64), (1, 6), (2, 7), (3, 7), (3, 8)] {
        let range = theta_lab::stabilization::theorem_range(m, j);
        assert!(range.j_admissible);
        let k = range.k_max.to_string();
        let g = stdout(&theta_lab(&["gcoeffs", "--j", &j.to_string(), "--n", &k]));
        let h = stdout(&theta_lab(&["hseries", "--m", &m.to_string(), "--j", &j.to_string(), "--k", &k]));
        assert_eq!(g, h, "m={m} j={j}");
    }
}

#[test]
fn hseries_third_block() {
    let h = stdout(&theta_lab(&["hseries", "--m", "3", "--j", "5", "--k", "13"]));
    let two = stdout(&theta_lab(&["hseries", "--m", "2", "--j", "5", "--k", "13"]));
    let last = |s: &str| s.split_whitespace().last().unwrap().parse::<i64>().unwrap();
    // the +q^13 block adds r_0 = 1 at k = 13
    assert_eq!(last(&h), last(&two) + 1);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["gcoeffs", "--j", "6", "--n", "15", "--format", "json"];
    let a = theta_lab(&args);
    let b = theta_lab(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["summary"]["residual_vanishes"], true);
    assert!(v["entries"].as_array().unwrap().iter().all(|e| e["g"].is_string()));
    assert_eq!(v["manifest"]["output_digest"].as_str().unwrap().len(), 64);

    let threaded = Command::new(env!("CARGO_BIN_EXE_theta-lab"))
        .args(["verify", "--m-max", "2", "--j-max", "7", "--format", "json"])
        .env("THETA_LAB_THREADS", "3")
        .output()
        .unwrap();
    let single = theta_lab(&["verify", "--m-max", "2", "--j-max", "7", "--format", "json", "--threads", "1"]);
    assert_eq!(threaded.stdout, single.stdout);
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = theta_lab(&["verify", "--m-max", "3", "--j-max", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out.join("stabilization.json")).unwrap()).unwrap();
    for key in ["manifest", "entries", "summary"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["summary"]["verified"], true);
    assert_eq!(doc["summary"]["in_range_mismatches"], 0);
    let entry = doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["m"] == 2 && e["j"] == 5 && e["k"] == 6)
        .unwrap();
    assert_eq!(entry["g_value"], "220");
    assert_eq!(entry["r_tilde_value"], "220");

    let csv = std::fs::read_to_string(out.join("stabilization.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("m,j,k,in_range,g,r_tilde,equal"));
    assert_eq!(csv.lines().count(), 1 + doc["entries"].as_array().unwrap().len());
    assert!(csv.lines().skip(1).all(|l| !l.contains(",true,") || l.ends_with(",true")));
}

#[test]
fn numcheck_rows() {
    let o = theta_lab(&["numcheck", "--q", "0.1", "--j-max", "3", "--n", "20", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["entries"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["ok"] == true));

    let err_at = |q: &str| -> Vec<f64> {
        let o = theta_lab(&["numcheck", "--q", q, "--j-max", "2", "--n", "10", "--format", "csv"]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
            .lines()
            .skip(1)
            .filter_map(|l| l.split(',').nth(5).filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()))
            .collect()
    };
    let (fine, coarse) = (err_at("0.05"), err_at("0.1"));
    assert_eq!(fine.len(), 1);
    assert!(fine[0] < coarse[0]);
}
