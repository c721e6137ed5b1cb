//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p fatpoints --test acceptance`.
//!
//! A criterion listed in `KNOWN_UNATTAINABLE` still runs at its stated
//! target and still prints FAIL; it only stops the process from exiting
//! nonzero. If such a criterion ever passes, that is reported as an error.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fatpoints::certificates::{af_classify, AfVerdict};
use fatpoints::jet::{build_evaluated_matrix, dim_linear_system, is_special_single, w_dimension, Speciality};
use fatpoints::linalg::exact_rank;
use fatpoints::ordering::{all_orderings, compare_subsets, parse_ordering_list, MonomialOrdering};
use fatpoints::partition::{
    run_generalized_plan, strict_partition, verify_exceptional, ExceptionalVerdict, GeneralizedPlan,
    StrictPartitionParams, DEFAULT_BUDGET,
};
use fatpoints::reductions::{algorithm0, algorithm1, minimal_nonspecial, Status};
use fatpoints::seshadri::{seshadri_verify, SeshadriCandidate};
use fatpoints::simplex::{enumerate_simplex, jet_conditions, part_sum};
use fatpoints::{ExponentVector, Triple};

/// (criterion, reason) pairs whose stated target contradicts the mathematics.
const KNOWN_UNATTAINABLE: &[(&str, &str)] = &[(
    "5b",
    "(2, D(9), 3^9) has expected dimension 55 - 54 = 1; the cube of the cubic through the 9 points spans it",
)];

const SEPTIC_TUPLE: &str = "lex(1,2,0),lex(1,2,0),lex(1,2,0),lex(0,1,2),rlex(1,2,0),rlex(1,2,0)";
const TWELVE_POINT_TUPLE: &str = "lex(0,1,2),lex(1,2,0),lex(2,0,1),lex(0,1,2),lex(1,2,0),lex(2,0,1),\
                      lex(0,1,2),lex(1,2,0),lex(2,0,1),lex(0,2,1),lex(1,0,2),lex(1,0,2)";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let t = f();
    (t, start.elapsed())
}

fn random_subset(rng: &mut ChaCha8Rng, points: &[ExponentVector], size: usize) -> Vec<ExponentVector> {
    points.choose_multiple(rng, size).cloned().collect()
}

fn random_tuple(rng: &mut ChaCha8Rng, ords: &[MonomialOrdering], r: usize) -> Vec<MonomialOrdering> {
    (0..r).map(|_| ords.choose(rng).unwrap().clone()).collect()
}

fn c1_oracle_example() -> Outcome {
    let t = Triple::full(2, 7, vec![3; 6]).unwrap();
    let (res, dt) = timed(|| dim_linear_system(&t, 3, 0));
    outcome(
        res.dimension == 0 && res.certified_nonspecial && dt < Duration::from_secs(1),
        format!("dim V(7, 3^6) = {}, certified = {}, {dt:.2?}", res.dimension, res.certified_nonspecial),
    )
}

fn c2_septic_reductions() -> Outcome {
    let res = algorithm1(7, &[3; 6], &parse_ordering_list(SEPTIC_TUPLE).unwrap()).unwrap();
    let sizes = res.trace.removed_sizes();
    outcome(
        res.status == Status::Nonspecial && res.bound == 0 && sizes == vec![6; 6],
        format!("status {:?}, #D0 = {}, blocks {sizes:?}", res.status, res.bound),
    )
}

fn c3_twelve_point_reductions() -> Outcome {
    let ords = parse_ordering_list(TWELVE_POINT_TUPLE).unwrap();
    let (res, dt) = timed(|| algorithm1(83, &[24; 12], &ords).unwrap());
    let sizes = res.trace.removed_sizes();
    let mut want = vec![300; 11];
    want.push(270);
    outcome(
        res.status == Status::Nonspecial && res.bound == 0 && sizes == want && dt < Duration::from_secs(60),
        format!("status {:?}, #D0 = {}, sizes {sizes:?}, {dt:.2?}", res.status, res.bound),
    )
}

fn c4_strict_partition() -> Outcome {
    let (res, dt) = timed(|| {
        let plan = strict_partition(&StrictPartitionParams::new(2, 11, 3, 4).unwrap()).unwrap();
        let check = verify_exceptional(&plan, DEFAULT_BUDGET);
        let general = GeneralizedPlan::from(plan);
        let report = run_generalized_plan(&general.triple, &general.steps, DEFAULT_BUDGET).unwrap();
        let oracle = dim_linear_system(&general.triple, 3, 0);
        (check, report, oracle)
    });
    let (check, report, oracle) = res;
    outcome(
        check.verdict == ExceptionalVerdict::Exceptional
            && report.status == Status::Nonspecial
            && oracle.dimension == 0
            && dt < Duration::from_secs(300),
        format!(
            "partition {:?} in {} nodes, plan {:?}, oracle dimension {}, {dt:.2?}",
            check.verdict, check.nodes, report.status, oracle.dimension
        ),
    )
}

fn c5_perfect_square(d: u32, m: u32, r: usize) -> Outcome {
    let t = Triple::full(2, d, vec![m; r]).unwrap();
    let (res, dt) = timed(|| dim_linear_system(&t, 3, 0));
    outcome(
        res.dimension == 0 && dt < Duration::from_secs(30),
        format!("dim V({d}, {m}^{r}) = {} (edim {}), target 0, {dt:.2?}", res.dimension, res.edim),
    )
}

fn c6_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ords = all_orderings(2);
    let (mut claims, mut violations) = (0, 0);
    for case in 0..200 {
        let d = rng.gen_range(1..=9);
        let r = rng.gen_range(1..=4);
        let m: Vec<u32> = (0..r).map(|_| rng.gen_range(1..=3)).collect();
        let tuple = random_tuple(&mut rng, &ords, r);
        let full = Triple::full(2, d, m.clone()).unwrap();
        let all = full.points().to_vec();
        let size = rng.gen_range(1..=all.len());
        let sub = Triple::new(2, d, random_subset(&mut rng, &all, size), m.clone()).unwrap();
        for (t, res) in [(&full, algorithm1(d, &m, &tuple).unwrap()), (&sub, algorithm0(&sub, &tuple).unwrap())] {
            if res.status == Status::Nonspecial {
                claims += 1;
                if dim_linear_system(t, 3, case).dimension != t.edim() {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{claims} nonspecial verdicts, {violations} violations"))
}

fn c7_single_point_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut special, mut violations) = (0, 0);
    for case in 0..200 {
        let d = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=4);
        let mut all = enumerate_simplex(2, d);
        if case % 2 == 0 {
            // two rows, to reach special configurations often
            all.retain(|a| a.get(0) <= 1);
        }
        let cap = jet_conditions(2, m).min(all.len());
        let size = rng.gen_range(1..=cap);
        let e = random_subset(&mut rng, &all, size);
        let verdict = is_special_single(2, &e, m).unwrap();
        let t = Triple::new(2, d, e, vec![m]).unwrap();
        let rank = (0..3)
            .map(|_| {
                let s: Vec<i64> = (0..3).map(|_| rng.gen_range(-1000..=1000)).collect();
                exact_rank(&build_evaluated_matrix(&t, &[s]).unwrap())
            })
            .max()
            .unwrap();
        let full_rank = rank == t.points().len();
        let oracle = dim_linear_system(&t, 3, case).dimension == t.edim();
        if verdict == Speciality::Special {
            special += 1;
        }
        if (verdict == Speciality::Nonspecial) != full_rank || full_rank != oracle {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("200 instances, {special} special, {violations} violations"))
}

/// Every `D ⊆ D(4)` with `#D ≤ 8`, every `c ≤ 3` the capacity allows, `m ≤ 2`
/// and every ordering. Speciality of the candidate subsets is tabulated once
/// as bitmasks over `D(4)`.
#[allow(clippy::needless_range_loop)]
fn c8_minimal_sum() -> Outcome {
    let base = enumerate_simplex(2, 4);
    let nb = base.len();
    let mut subsets_by_size: Vec<Vec<u32>> = vec![Vec::new(); 4];
    for mask in 1u32..(1 << nb) {
        let c = mask.count_ones() as usize;
        if c <= 3 {
            subsets_by_size[c].push(mask);
        }
    }
    let points_of = |mask: u32| -> Vec<ExponentVector> {
        (0..nb).filter(|i| mask >> i & 1 == 1).map(|i| base[i].clone()).collect()
    };
    let mut nonspecial: HashMap<(u32, u32), bool> = HashMap::new();
    for m in 1..=2u32 {
        for c in 1..=jet_conditions(2, m).min(3) {
            for &mask in &subsets_by_size[c] {
                let ns = is_special_single(2, &points_of(mask), m).unwrap() == Speciality::Nonspecial;
                nonspecial.insert((mask, m), ns);
            }
        }
    }
    let domains: Vec<u32> = (1u32..(1 << nb)).filter(|d| d.count_ones() <= 8).collect();
    let (mut checked, mut violations) = (0u64, 0u64);
    for ord in all_orderings(2) {
        for m in 1..=2u32 {
            for c in 1..=jet_conditions(2, m).min(3) {
                // non-special c-subsets sorted by ⪯, each with its part sum
                let mut ranked: Vec<(u32, Vec<ExponentVector>, ExponentVector)> = subsets_by_size[c]
                    .iter()
                    .filter(|&&mask| nonspecial[&(mask, m)])
                    .map(|&mask| {
                        let pts = points_of(mask);
                        let sum = part_sum(3, &pts);
                        (mask, pts, sum)
                    })
                    .collect();
                ranked.sort_by(|a, b| compare_subsets(&ord, &a.1, &b.1).unwrap());
                for &dom in &domains {
                    let mut inside = ranked.iter().filter(|(mask, _, _)| mask & !dom == 0);
                    let Some((_, least, sum)) = inside.next() else {
                        if minimal_nonspecial(2, &points_of(dom), c, m, &ord).unwrap().is_some() {
                            violations += 1;
                        }
                        continue;
                    };
                    checked += 1;
                    let strictly_least =
                        inside.all(|(_, _, other)| ord.cmp_points(sum, other) == Ordering::Less);
                    let found = minimal_nonspecial(2, &points_of(dom), c, m, &ord).unwrap();
                    if !strictly_least || found.as_deref().map(|f| ord.sorted(f)) != Some(ord.sorted(least)) {
                        violations += 1;
                    }
                }
            }
        }
    }
    outcome(violations == 0, format!("{checked} (D, c, m, ordering) cases with a non-special subset, {violations} violations"))
}

fn c9_monotonicity_and_af() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mono = 0;
    for _ in 0..500 {
        let d = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=4);
        let all = enumerate_simplex(2, d);
        let size = rng.gen_range(0..all.len());
        let e = random_subset(&mut rng, &all, size);
        let a = all.choose(&mut rng).unwrap().clone();
        let mut f = e.clone();
        if !f.contains(&a) {
            f.push(a);
        }
        let drop = w_dimension(2, m, &e).unwrap() as i64 - w_dimension(2, m, &f).unwrap() as i64;
        if !(0..=1).contains(&drop) {
            mono += 1;
        }
    }
    let (mut af_bad, mut decided) = (0, 0);
    for _ in 0..500 {
        let d = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=4);
        let all = enumerate_simplex(2, d);
        let size = rng.gen_range(1..=jet_conditions(2, m).min(all.len()));
        let e = random_subset(&mut rng, &all, size);
        let truth = is_special_single(2, &e, m).unwrap();
        match af_classify(&e, m).unwrap() {
            AfVerdict::Special => {
                decided += 1;
                af_bad += (truth != Speciality::Special) as usize;
            }
            AfVerdict::Nonspecial => {
                decided += 1;
                af_bad += (truth != Speciality::Nonspecial) as usize;
            }
            AfVerdict::Inconclusive => {}
        }
    }
    outcome(
        mono == 0 && af_bad == 0,
        format!("monotonicity violations {mono}/500, af violations {af_bad} over {decided} decided of 500"),
    )
}

fn c10_determinism() -> Outcome {
    let run = || {
        let mut out = Vec::new();
        let t = Triple::full(2, 8, vec![3, 3, 2, 2, 2, 1]).unwrap();
        out.push(serde_json::to_string(&dim_linear_system(&t, 3, 42)).unwrap());
        let ords = parse_ordering_list(SEPTIC_TUPLE).unwrap();
        out.push(serde_json::to_string(&algorithm1(7, &[3; 6], &ords).unwrap()).unwrap());
        out.push(serde_json::to_string(&algorithm0(&t, &all_orderings(2)[..6]).unwrap()).unwrap());
        let cands = [SeshadriCandidate::homogeneous(7, 3, 6), SeshadriCandidate::homogeneous(6, 3, 6)];
        out.push(serde_json::to_string(&seshadri_verify(6, &cands, 30, 42).unwrap()).unwrap());
        let plan = strict_partition(&StrictPartitionParams::new(2, 5, 2, 3).unwrap()).unwrap();
        out.push(serde_json::to_string(&verify_exceptional(&plan, DEFAULT_BUDGET)).unwrap());
        let g = GeneralizedPlan::from(plan);
        out.push(serde_json::to_string(&run_generalized_plan(&g.triple, &g.steps, DEFAULT_BUDGET).unwrap()).unwrap());
        out
    };
    let (a, b) = (run(), run());
    let same = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    outcome(a == b, format!("{same}/{} reports byte-identical", a.len()))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("1", "oracle on (2, 7, 3^6)", c1_oracle_example),
        ("2", "reductions on (2, 7, 3^6)", c2_septic_reductions),
        ("3", "reductions on (2, 83, 24^12)", c3_twelve_point_reductions),
        ("4", "strict partition of (2, D(11), 3^16)", c4_strict_partition),
        ("5a", "oracle on (2, D(8), 2^16)", || c5_perfect_square(8, 2, 16)),
        ("5b", "oracle on (2, D(9), 3^9)", || c5_perfect_square(9, 3, 9)),
        ("6", "certificate soundness", c6_soundness),
        ("7", "single-point speciality vs jet rank", c7_single_point_equivalence),
        ("8", "minimal non-special subset has least part sum", c8_minimal_sum),
        ("9", "W monotonicity and row criteria", c9_monotonicity_and_af),
        ("10", "deterministic reports", c10_determinism),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let (o, dt) = timed(run);
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:<3} {name}: {} [{dt:.2?}]", o.detail);
        match (o.pass, known) {
            (false, Some((_, why))) => println!("     expected failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("     listed as unattainable but passed");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
