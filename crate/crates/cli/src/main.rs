use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fatpoints::cache::{CacheKey, ResultCache, CACHE_ENV};
use fatpoints::certificates::{af_classify, scrambled_simplex_nonspecial_with, AfVerdict, ScrambledVerdict};
use fatpoints::jet::{dim_linear_system, is_special_single, w_dimension, OracleResult, Speciality, DEFAULT_TRIALS};
use fatpoints::ordering::{parse_ordering_list, MonomialOrdering};
use fatpoints::partition::{
    run_generalized_plan, strict_partition, verify_exceptional, ExceptionalityReport, GeneralizedPlan, PartitionPlan,
    StrictPartitionParams, DEFAULT_BUDGET,
};
use fatpoints::reductions::{algorithm0, algorithm1, mp_reduction, CertificationResult};
use fatpoints::seshadri::{seshadri_verify, SeshadriCandidate};
use fatpoints::simplex::enumerate_simplex;
use fatpoints::{ExponentVector, Triple};

/// Dimension computations and non-speciality certificates for linear systems
/// of curves and hypersurfaces through fat points.
#[derive(Parser, Debug)]
#[command(name = "fatpoints", version)]
struct Cli {
    /// Print machine-readable JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,

    /// JSON-lines result cache used by dim, alg1 and alg0.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,

    /// Worker threads for parallel stages (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of the linear system by randomized evaluation.
    Dim {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dimension of the degree-(m-1) forms vanishing on a point set.
    Wdim(SingleArgs),
    /// Whether a point set is special for one point of multiplicity m.
    CheckSingle(SingleArgs),
    /// Row criteria for a single point in the plane, plus the scrambled-simplex test.
    Af {
        #[command(flatten)]
        single: SingleArgs,
        /// Extra slicing normal for the scrambled-simplex test, e.g. "3,0,1".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        normal: Option<Vec<i64>>,
    },
    /// One (m, ordering)-reduction of a plane point set.
    Reduce {
        #[command(flatten)]
        single: SingleArgs,
        #[arg(long)]
        ordering: MonomialOrdering,
    },
    /// Iterated (m, ordering)-reductions on (2, D(d), m).
    Alg1 {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long)]
        ords: String,
    },
    /// Iterated minimal non-special subset removal.
    Alg0 {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long)]
        ords: String,
    },
    /// Check that a partition plan is exceptional.
    VerifyPartition {
        /// Partition plan JSON file.
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Build the strict partition of D(d) for multiplicity m and parameter s.
    StrictPartition {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        s: u32,
        /// Also run the exceptionality check.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run a generalized plan of partition and reduction steps.
    Plan {
        /// Generalized plan or partition plan JSON file.
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Certify candidate triples for a Seshadri constant lower bound.
    Seshadri {
        #[arg(long)]
        r: usize,
        /// Candidate list JSON file: [{"d": .., "m": [..], "orderings": [[..]]}].
        #[arg(long, conflicts_with = "homogeneous")]
        candidates: Option<PathBuf>,
        /// The single candidate (d, m^r), given as "d m r".
        #[arg(long, num_args = 3, value_names = ["D", "M", "R"])]
        homogeneous: Option<Vec<u32>>,
        /// Ordering tuple tried first for a --homogeneous candidate.
        #[arg(long, requires = "homogeneous")]
        pinned: Option<String>,
        /// Random ordering tuples per candidate.
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct TripleArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, required_unless_present = "homogeneous")]
    d: Option<u32>,
    /// Multiplicities, e.g. "3,3,3".
    #[arg(long, value_delimiter = ',', required_unless_present = "homogeneous")]
    m: Option<Vec<u32>>,
    /// The triple (n, D(d), m^r), given as "d m r".
    #[arg(long, num_args = 3, value_names = ["D", "M", "R"], conflicts_with_all = ["d", "m"])]
    homogeneous: Option<Vec<u32>>,
    /// Subset of D(d) as JSON, or @FILE.
    #[arg(long)]
    points: Option<String>,
}

impl TripleArgs {
    fn triple(&self) -> Result<Triple> {
        let (d, m) = match &self.homogeneous {
            Some(h) => (h[0], vec![h[1]; h[2] as usize]),
            None => (self.d.expect("required by clap"), self.m.clone().expect("required by clap")),
        };
        Ok(match &self.points {
            Some(p) => Triple::new(self.n, d, read_json(p)?, m)?,
            None => Triple::full(self.n, d, m)?,
        })
    }
}

#[derive(Args, Debug)]
struct SingleArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    m: u32,
    /// Point set as JSON, or @FILE.
    #[arg(long, required_unless_present = "d")]
    points: Option<String>,
    /// Use all of D(d).
    #[arg(long, conflicts_with = "points")]
    d: Option<u32>,
}

impl SingleArgs {
    fn points(&self) -> Result<Vec<ExponentVector>> {
        match (&self.points, self.d) {
            (Some(p), _) => read_json(p),
            (None, Some(d)) => Ok(enumerate_simplex(self.n, d)),
            (None, None) => unreachable!("required by clap"),
        }
    }
}

fn read_json<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {arg}"))
}

fn read_file<T: DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlanFile {
    Generalized(GeneralizedPlan),
    Partition(PartitionPlan),
}

#[derive(Serialize)]
struct Value<T> {
    value: T,
}

#[derive(Serialize)]
struct AfReport {
    af: AfVerdict,
    scrambled: ScrambledVerdict,
}

#[derive(Serialize)]
struct StrictReport {
    plan: PartitionPlan,
    #[serde(skip_serializing_if = "Option::is_none")]
    exceptionality: Option<ExceptionalityReport>,
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        println!("{}", text(value));
    }
    Ok(())
}

fn cached<T, F>(cache: &mut Option<ResultCache>, key: impl FnOnce() -> CacheKey, compute: F) -> Result<T>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce() -> fatpoints::Result<T>,
{
    Ok(match cache {
        Some(c) => c.get_or_compute(key(), compute)?,
        None => compute()?,
    })
}

fn certification_text(r: &CertificationResult) -> String {
    format!(
        "status: {:?}\nbound: {}\nedim: {}\nremoved: {:?}",
        r.status,
        r.bound,
        r.edim,
        r.trace.removed_sizes()
    )
}

fn ords_label(ords: &[MonomialOrdering]) -> String {
    ords.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<()> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    let mut cache = cli.cache.as_ref().map(ResultCache::open).transpose()?;
    let json = cli.json;
    match cli.command {
        Command::Dim { triple, trials, seed } => {
            let t = triple.triple()?;
            let res: OracleResult = cached(
                &mut cache,
                || CacheKey::new(&t, format!("dim:trials={trials}"), Some(seed)),
                || Ok(dim_linear_system(&t, trials, seed)),
            )?;
            emit(json, &res, |r| {
                format!("dimension: {}\nedim: {}\ncertified_nonspecial: {}", r.dimension, r.edim, r.certified_nonspecial)
            })
        }
        Command::Wdim(a) => {
            let value = w_dimension(a.n, a.m, &a.points()?)?;
            emit(json, &Value { value }, |v| format!("w_dimension: {}", v.value))
        }
        Command::CheckSingle(a) => {
            let value = is_special_single(a.n, &a.points()?, a.m)?;
            emit(json, &Value { value }, |v| match v.value {
                Speciality::Special => "special".into(),
                Speciality::Nonspecial => "nonspecial".into(),
            })
        }
        Command::Af { single, normal } => {
            let e = single.points()?;
            let report = AfReport {
                af: af_classify(&e, single.m)?,
                scrambled: scrambled_simplex_nonspecial_with(single.n, &e, single.m, normal.as_deref())?,
            };
            emit(json, &report, |r| format!("af: {:?}\nscrambled: {:?}", r.af, r.scrambled))
        }
        Command::Reduce { single, ordering } => {
            if single.n != 2 {
                bail!("reduce works on plane point sets only");
            }
            let red = mp_reduction(&single.points()?, single.m, &ordering)?;
            emit(json, &red, |r| format!("removed: {} points\naugmentation: {}", r.removed.len(), r.augmentation()))
        }
        Command::Alg1 { triple, ords } => {
            let t = triple.triple()?;
            if t.n() != 2 || !t.is_full() {
                bail!("alg1 takes the full plane triple (2, D(d), m); use alg0 for other point sets");
            }
            let ords = parse_ordering_list(&ords)?;
            let res: CertificationResult = cached(
                &mut cache,
                || CacheKey::new(&t, format!("alg1:{}", ords_label(&ords)), None),
                || algorithm1(t.d(), t.multiplicities(), &ords),
            )?;
            emit(json, &res, certification_text)
        }
        Command::Alg0 { triple, ords } => {
            let t = triple.triple()?;
            let ords = parse_ordering_list(&ords)?;
            let res: CertificationResult = cached(
                &mut cache,
                || CacheKey::new(&t, format!("alg0:{}", ords_label(&ords)), None),
                || algorithm0(&t, &ords),
            )?;
            emit(json, &res, certification_text)
        }
        Command::VerifyPartition { plan, budget } => {
            let plan: PartitionPlan = read_file(&plan)?;
            let rep = verify_exceptional(&plan, budget);
            emit(json, &rep, |r| format!("verdict: {:?}\nnodes: {}", r.verdict, r.nodes))
        }
        Command::StrictPartition { n, d, m, s, verify, budget } => {
            let plan = strict_partition(&StrictPartitionParams::new(n, d, m, s)?)?;
            let exceptionality = verify.then(|| verify_exceptional(&plan, budget));
            let rep = StrictReport { plan, exceptionality };
            emit(json, &rep, |r| {
                let sizes: Vec<usize> = r.plan.parts.iter().map(Vec::len).collect();
                let mut out = format!("parts: {}\nsizes: {sizes:?}", sizes.len());
                if let Some(e) = &r.exceptionality {
                    out.push_str(&format!("\nverdict: {:?}\nnodes: {}", e.verdict, e.nodes));
                }
                out
            })
        }
        Command::Plan { plan, budget } => {
            let plan = match read_file::<PlanFile>(&plan)? {
                PlanFile::Generalized(g) => g,
                PlanFile::Partition(p) => p.into(),
            };
            let rep = run_generalized_plan(&plan.triple, &plan.steps, budget)?;
            emit(json, &rep, |r| format!("status: {:?}\nbound: {}\nedim: {}", r.status, r.bound, r.edim))
        }
        Command::Seshadri { r, candidates, homogeneous, pinned, budget, seed } => {
            let cands: Vec<SeshadriCandidate> = match (candidates, homogeneous) {
                (Some(path), _) => read_file(&path)?,
                (None, Some(h)) => {
                    let mut c = SeshadriCandidate::homogeneous(h[0], h[1], h[2] as usize);
                    if let Some(p) = pinned {
                        c.orderings.push(parse_ordering_list(&p)?);
                    }
                    vec![c]
                }
                (None, None) => bail!("give --candidates or --homogeneous"),
            };
            let rep = seshadri_verify(r, &cands, budget, seed)?;
            emit(json, &rep, |rep| {
                let mut out = String::new();
                for c in &rep.certified {
                    out.push_str(&format!("({}, {:?}): {:?} after {} tuples\n", c.d, c.m, c.status, c.tuples_tried));
                }
                match (&rep.claimed_bound, &rep.f_value, &rep.f_approx) {
                    (Some(e), Some(f), Some(a)) => out.push_str(&format!("e >= {}/{}\nf = {}/{} ~ {a}", e.0, e.1, f.0, f.1)),
                    (Some(e), _, _) => out.push_str(&format!("e >= {}/{}", e.0, e.1)),
                    _ => out.push_str("no bound claimed"),
                }
                out
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
