use std::process::{Command, Output};

use fatpoints::jet::OracleResult;
use fatpoints::partition::{strict_partition, GeneralizedPlan, PartitionPlan, PlanReport, StrictPartitionParams};
use fatpoints::reductions::{CertificationResult, Status};
use fatpoints::seshadri::{Fraction, SeshadriCandidate, SeshadriReport};
use fatpoints::ordering::parse_ordering_list;
use serde::de::DeserializeOwned;

const SEPTIC_TUPLE: &str = "lex(1,2,0),lex(1,2,0),lex(1,2,0),lex(0,1,2),rlex(1,2,0),rlex(1,2,0)";
const TWELVE_POINT_TUPLE: &str = "lex(0,1,2),lex(1,2,0),lex(2,0,1),lex(0,1,2),lex(1,2,0),lex(2,0,1),\
                      lex(0,1,2),lex(1,2,0),lex(2,0,1),lex(0,2,1),lex(1,0,2),lex(1,0,2)";

fn fatpoints(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatpoints"))
        .args(args)
        .env_remove("FATPOINTS_CACHE")
        .output()
        .expect("binary runs")
}

fn json<T: DeserializeOwned>(args: &[&str]) -> (T, String) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = fatpoints(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn alg1_clears_septic_through_six_triple_points() {
    let (res, text): (CertificationResult, _) =
        json(&["alg1", "--n", "2", "--d", "7", "--m", "3,3,3,3,3,3", "--ords", SEPTIC_TUPLE]);
    assert_eq!(res.status, Status::Nonspecial);
    assert_eq!(res.bound, 0);
    assert_eq!(res.trace.removed_sizes(), vec![6; 6]);
    assert_eq!(serde_json::to_string_pretty(&res).unwrap() + "\n", text);
}

#[test]
fn dim_single_triple_point_conic() {
    let (res, _): (OracleResult, _) = json(&["dim", "--n", "2", "--d", "2", "--m", "3"]);
    assert_eq!(res.dimension, 0);
    let out = fatpoints(&["dim", "--d", "2", "--m", "3"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("dimension: 0"));
}

#[test]
fn seshadri_certifies_twelve_point_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cands.json");
    let cand = SeshadriCandidate { d: 83, m: vec![24; 12], orderings: vec![parse_ordering_list(TWELVE_POINT_TUPLE).unwrap()] };
    std::fs::write(&path, serde_json::to_string(&vec![cand]).unwrap()).unwrap();
    let (rep, text): (SeshadriReport, _) =
        json(&["seshadri", "--r", "12", "--candidates", path.to_str().unwrap(), "--budget", "0"]);
    assert_eq!(rep.certified.len(), 1);
    assert_eq!(rep.certified[0].status, Status::Nonspecial);
    assert_eq!(rep.claimed_bound, Some(Fraction(83, 288)));
    assert_eq!(rep.f_value, Some(Fraction(6912, 23)));
    assert_eq!(serde_json::to_string_pretty(&rep).unwrap() + "\n", text);

    let (homog, _): (SeshadriReport, _) =
        json(&["seshadri", "--r", "12", "--homogeneous", "83", "24", "12", "--pinned", TWELVE_POINT_TUPLE, "--budget", "0"]);
    assert_eq!(homog, rep);
}

#[test]
fn plan_accepts_both_file_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let plan = strict_partition(&StrictPartitionParams::new(2, 5, 2, 3).unwrap()).unwrap();
    let partition = dir.path().join("partition.json");
    let general = dir.path().join("general.json");
    std::fs::write(&partition, serde_json::to_string(&plan).unwrap()).unwrap();
    std::fs::write(&general, serde_json::to_string(&GeneralizedPlan::from(plan.clone())).unwrap()).unwrap();
    let (a, ta): (PlanReport, _) = json(&["plan", "--plan", partition.to_str().unwrap()]);
    let (b, tb): (PlanReport, _) = json(&["plan", "--plan", general.to_str().unwrap()]);
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    assert_eq!(a.status, Status::Nonspecial);

    #[derive(serde::Deserialize)]
    struct Strict {
        plan: PartitionPlan,
    }
    let (s, _): (Strict, _) = json(&["strict-partition", "--d", "5", "--m", "2", "--s", "3"]);
    assert_eq!(s.plan, plan);
}

#[test]
fn cache_replays_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let args = ["--json", "--cache", cache.to_str().unwrap(), "dim", "--homogeneous", "7", "3", "6", "--seed", "4"];
    let first = fatpoints(&args);
    let lines = std::fs::read_to_string(&cache).unwrap().lines().count();
    let second = fatpoints(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(lines, 1);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 1);
}

#[test]
fn input_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"triple\": ").unwrap();
    for args in [
        vec!["dim", "--d", "x", "--m", "3"],
        vec!["frobnicate"],
        vec!["alg1", "--d", "7", "--m", "3,3", "--ords", "lex(0,1)"],
        vec!["plan", "--plan", bad.to_str().unwrap()],
        vec!["wdim", "--m", "2", "--points", "[[1,0"],
        vec!["seshadri", "--r", "12", "--homogeneous", "5", "1", "12"],
    ] {
        let out = fatpoints(&args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn undecided_verdicts_still_exit_zero() {
    let out = fatpoints(&["alg1", "--d", "3", "--m", "2,2", "--ords", "lex(0,1,2),lex(0,1,2)"]);
    assert!(out.status.success());
    let out = fatpoints(&["check-single", "--m", "2", "--points", "[[2,0,0],[1,1,0],[0,2,0]]"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "special");
}
