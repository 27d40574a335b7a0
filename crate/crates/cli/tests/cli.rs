use std::collections::BTreeMap;
use std::process::Command;

use linkoid_cli::{run, VERBS};
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(std::iter::once("linkoid").chain(args.iter().copied()));
    assert_eq!(code, 0, "{args:?}: {out}{err}");
    out
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn invariants_of_fix2() {
    let v = json(&["invariants", &fixture("fix2.json"), "--sigma", "(1 4)(2 3)"]);
    assert_eq!(v["writhe"], 2);
    assert_eq!(v["jones"], "A^-4 + A^-6 - A^-10");
    assert_eq!(v["height_bound"], 1);
    assert_eq!(v["component_count"], 1);
    let w = json(&["invariants", &fixture("fix2.json"), "--sigma", "(1 4)(2 3)", "--invariant", "writhe"]);
    assert_eq!(w["value"], 2);
}

#[test]
fn enumerates_three_involutions_for_two_strands() {
    let out = ok(&["enum-involutions", "2"]);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["(1 2)(3 4)", "(1 3)(2 4)", "(1 4)(2 3)"]);
}

#[test]
fn validate_reports_code_and_permutation() {
    let v = json(&["validate", &fixture("fix3.json")]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["strand_permutation"], "(1 4)(2 3)");
    assert!(v["gauss"].as_str().unwrap().contains("O1+"));
}

#[test]
fn closure_verbs() {
    let v = json(&["closure", &fixture("fix1.json"), "--sigma", "(1 3)(2 4)", "--gauss"]);
    assert_eq!(v["link_type"], true);
    assert_eq!(v["components"], 1);
    let own = json(&["closure", &fixture("fix1.json")]);
    let tau = json(&["closure", &fixture("fix1.json"), "--sigma", "(1 2)(3 4)"]);
    assert_eq!(own["diagram"], tau["diagram"]);
}

#[test]
fn height_spectrum_of_fix1() {
    let v = json(&["spectrum", &fixture("fix1.json"), "--invariant", "height"]);
    let mut hs: Vec<i64> = v["values"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    hs.sort_unstable();
    assert_eq!(hs, [0, 0, 1]);
    assert_eq!(v["average"], "1/3");
    assert_eq!(v["minimum"], 0);
    let csv = ok(&["spectrum", &fixture("fix3.json"), "--csv"]);
    assert!(csv.starts_with("sigma,class,components"));
}

#[test]
fn excise_then_close_round_trip() {
    let v = json(&["excise", &fixture("kishino.json")]);
    assert_eq!(v["sigma"], "(1 2)(3 4)");
}

#[test]
fn measure_is_byte_identical_across_runs_and_threads() {
    let args = ["measure", &fixture("open_trefoil.json"), "--sigma", "(1 2)", "--invariant", "jones", "--samples", "300", "--seed", "7"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let mut threaded = vec!["--threads", "1"];
    threaded.extend(args);
    assert_eq!(a, ok(&threaded));
    threaded[1] = "3";
    assert_eq!(a, ok(&threaded));
    let csv = ok(&["measure", &fixture("open_trefoil.csv"), "--samples", "300", "--seed", "7"]);
    let (x, y): (Value, Value) = (serde_json::from_str(&a).unwrap(), serde_json::from_str(&csv).unwrap());
    assert_eq!(x["samples"], y["samples"]);
}

#[test]
fn weighted_spectrum_and_spectral_measure() {
    let file = fixture("two_curves.json");
    let ws = json(&["weighted-spectrum", &file, "--samples", "50", "--seed", "1"]);
    assert_eq!(ws["entries"].as_array().unwrap().len(), 3);
    let sm = json(&["spectral-measure", &file, "--samples", "50", "--seed", "1"]);
    assert!(sm.get("value").is_some() || sm.get("mean").is_some(), "{sm}");
    let csv = ok(&["weighted-spectrum", &file, "--samples", "50", "--seed", "1", "--csv"]);
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(["linkoid", "invariants"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _, _) = run(["linkoid", "frobnicate"]);
    assert_eq!(code, 2);
    let (code, out, _) = run(["linkoid", "validate", "/nonexistent.json"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["error"].is_string());
    let (code, out, _) = run(["linkoid", "invariants", &fixture("fix2.json"), "--sigma", "(1 2)"]);
    assert_eq!(code, 1, "{out}");
    let (code, _, _) = run(["linkoid", "--help"]);
    assert_eq!(code, 0);
}

#[test]
fn every_operation_has_exactly_one_verb() {
    // Polynomial ring arithmetic (add, mean) is used by many verbs and is not a verb of its own.
    let ops = [
        "validate", "to_gauss", "parse", "strand_permutation", "enumerate_hn", "segment_cycles", "burnside_count",
        "virtual_closure", "strand_closure", "gauss_closure", "reduce_virtual", "is_link_type", "excise_virtual",
        "writhe", "bracket", "jones", "arrow", "affine_index", "odd_writhe", "height_bound", "genus_bound", "report",
        "virtual_spectrum", "spectral_values", "avg_spectral", "min_spectral", "project", "sample_directions",
        "measure", "weighted_spectrum", "spectral_measure",
    ];
    let mut seen: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (verb, list) in VERBS {
        for op in *list {
            seen.entry(op).or_default().push(verb);
        }
    }
    for op in ops {
        assert_eq!(seen.get(op).map(Vec::len), Some(1), "{op}: {:?}", seen.get(op));
    }
    assert_eq!(seen.len(), ops.len());
}

#[test]
fn binary_writes_to_stdout() {
    let out = Command::new(env!("CARGO_BIN_EXE_linkoid")).args(["enum-involutions", "1"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "(1 2)\n");
    let bad = Command::new(env!("CARGO_BIN_EXE_linkoid")).arg("--nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let limited = Command::new(env!("CARGO_BIN_EXE_linkoid"))
        .args(["--max-crossings", "1", "invariants", &fixture("fix2.json")])
        .output()
        .unwrap();
    assert_eq!(limited.status.code(), Some(1));
    assert!(String::from_utf8(limited.stdout).unwrap().contains("exceed the limit of 1"));
}
