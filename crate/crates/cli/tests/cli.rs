use std::process::{Command, Output};

use serde_json::Value;

fn minent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minent")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = minent(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_timestamp(bytes: &[u8]) -> Value {
    let mut v: Value = serde_json::from_slice(bytes).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn classify5_wu_manifold() {
    let v = json(&["classify5", "--h2", "Z2", "--i", "1"]);
    assert_eq!(v["solvable"], true);
    assert_eq!(v["witness"], "SU(3)/SO(3)");
    assert_eq!(v["barden_word"], "X_-1");
    assert_eq!(v["polarized"], true);
    for key in ["input", "elliptic", "minimal_entropy", "t_structure", "timestamp"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn classify5_rejects_double_torsion() {
    let v = json(&["classify5", "--h2", "Z2+Z2", "--i", "0"]);
    assert_eq!((v["elliptic"].as_bool(), v["solvable"].as_bool()), (Some(false), Some(false)));
    assert_eq!(v["minimal_entropy"], 0.0);
}

#[test]
fn classify5_open_polarized_flag() {
    let v = json(&["classify5", "--h2", "Z4+Z4", "--i", "2"]);
    assert_eq!(v["barden_word"], "X_2");
    assert_eq!(v["polarized"], "unknown");
}

#[test]
fn classify4_words_and_forms() {
    let v = json(&["classify4", "--word", "CP2bar#CP2"]);
    assert_eq!(v["homeotype"], "CP2#CP2bar");
    assert_eq!(v["solvable"], true);
    let v = json(&["classify4", "--word", "K3#S2xS2"]);
    assert_eq!((v["solvable"].as_bool(), v["elliptic"].as_bool()), (Some(false), Some(false)));
    assert_eq!(v["form"]["rank"], 24);
    assert_eq!(v["minimal_entropy"], 0.0);
    assert_eq!(json(&["classify4", "--even-form", "-4,5"])["verdict"], "open_under_11_8");
    assert_eq!(json(&["classify4", "--even-form", "1,7"])["verdict"], "rokhlin_violation");
    let v = json(&["classify4", "--even-form", "-2,3"]);
    assert_eq!((v["verdict"].as_str(), &v["witness"]), (Some("realizable"), &serde_json::json!(["K3"])));
}

#[test]
fn tor_growth_prefix() {
    let v = json(&["tor-growth", "--a", "2", "--n", "10"]);
    let prefix: Vec<&str> = v["b_prefix"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert_eq!(&prefix[..5], ["1", "4", "15", "56", "209"]);
    assert_eq!(prefix.len(), 11);
    assert_eq!(v["growth"], "exponential");
    let v = json(&["tor-growth", "--h2", "Z", "--n", "4"]);
    assert_eq!(v["growth"], "polynomial");
    assert_eq!(v["a_per_field"]["Q"], 1);
}

#[test]
fn mane_flat_torus_is_small() {
    let v = json(&["entropy", "mane", "--metric", "torus:1,1", "--Tmax", "20", "--seed", "7"]);
    assert_eq!(v["method"], "mane");
    assert!(v["h"].as_f64().unwrap() <= 0.02, "{}", v["h"]);
    assert_eq!(v["seed"], 7);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.json"));
        let path = path.to_str().unwrap();
        let out = minent(&["entropy", "mane", "--metric", "torus:1,1", "--Tmax", "10", "--seed", "3", "--output", path]);
        assert!(out.status.success());
        reports.push(without_timestamp(&std::fs::read(path).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    let a = minent(&["lemma61-check", "--samples", "200", "--seed", "5"]);
    let b = minent(&["lemma61-check", "--samples", "200", "--seed", "5"]);
    assert_eq!(without_timestamp(&a.stdout), without_timestamp(&b.stdout));
}

#[test]
fn collapse_sweep_csv_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = minent(&["collapse-sweep", "--deltas", "1e-2,1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,volume,k_min,k_max,ricci_min");
    assert_eq!(lines.len(), 3);
    let v = json(&["collapse-sweep", "--deltas", "1e-2,1", "--format", "json"]);
    assert_eq!((v["volume_monotone"].as_bool(), v["volume_bounded"].as_bool()), (Some(true), Some(true)));
}

#[test]
fn arcs_on_torus() {
    let v = json(&["arcs", "--metric", "torus:1,1", "--p", "0.1,0.1", "--q", "0.6,0.6", "--Tmax", "1"]);
    assert_eq!(v["n_T"], 4);
    let out = minent(&["arcs", "--metric", "torus:1,1", "--p", "0.1,0.1", "--q", "0.6,0.6", "--Tmax", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("p,q,length,angle"));
}

#[test]
fn brieskorn_weights() {
    let v = json(&["brieskorn", "--exponents", "2,3,5,5"]);
    assert_eq!(v["weights"], serde_json::json!([15, 10, 6, 6]));
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["entropy", "mane", "--metric", "klein:1"][..],
        &["classify5", "--h2", "Q", "--i", "0"],
        &["classify5", "--h2", "Z2+Z2", "--i", "inf"],
        &["classify4", "--word", "RP4"],
        &["brieskorn", "--exponents", "1,3,5,5"],
        &["entropy", "mane", "--metric", "torus:1,1", "--Tmax", "2"],
        &["lemma61-check", "--bogus"],
        &["tor-growth", "--fields", "R=2"],
        &["brieskorn", "--exponents", "2,3,5,5", "--format", "csv"],
    ] {
        assert_eq!(minent(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn strict_escalates_warnings() {
    let args = ["chain-check", "--n", "2", "--lambda", "2", "--h", "1"];
    let lax = minent(&args);
    assert_eq!(lax.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&lax.stdout).unwrap();
    assert_eq!(v["consistent"], false);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(minent(&strict).status.code(), Some(3));
    let ok = minent(&["chain-check", "--n", "2", "--lambda", "1", "--h", "1", "--strict"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn help_names_each_concept() {
    for (sub, concept) in [
        (&["entropy", "mane"][..], "arc count"),
        (&["entropy", "separated"], "separated"),
        (&["entropy", "volume"], "Volume entropy"),
        (&["collapse-sweep"], "circle action"),
        (&["lemma61-check"], "collapse"),
        (&["tor-growth"], "Tor"),
        (&["classify4"], "connected sum"),
        (&["classify5"], "Barden"),
        (&["brieskorn"], "Brieskorn"),
        (&["chain-check"], "simplicial volume"),
        (&["arcs"], "Geodesic arcs"),
    ] {
        let mut args = sub.to_vec();
        args.push("--help");
        let out = minent(&args);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(concept), "{sub:?} help lacks {concept:?}");
    }
}
