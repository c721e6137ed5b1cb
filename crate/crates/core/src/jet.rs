//! The jet matrix of a triple evaluated at random integer points, and the
//! exact single-point speciality test through the space `W(m-1, E)`.
//!
//! Evaluation at a specific point can only lower the rank of the symbolic jet
//! matrix. Full rank at one sample therefore certifies non-speciality, while
//! a rank deficit observed at every sample is a probabilistic verdict: by
//! Schwartz-Zippel each trial misses the generic rank with probability at
//! most `deg / 2^32` for the relevant minor of total degree `deg`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ExactMatrix};
use crate::simplex::{enumerate_simplex, jet_conditions, ExponentVector, Triple};

pub const DEFAULT_TRIALS: usize = 3;

/// Samples are drawn uniformly from `[-SAMPLE_BOUND, SAMPLE_BOUND]`.
pub const SAMPLE_BOUND: i64 = 1 << 31;

/// A row of the jet matrix: derivative `b` (of degree `m_i - 1`) at point `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetRowIndex {
    /// 1-based point index.
    pub point: usize,
    pub b: ExponentVector,
}

/// Falling-factorial coefficient of `P^{a-b}` in `d^b X^a / dX^b`:
/// `prod_k a_k (a_k - 1) ... (a_k - b_k + 1)`.
pub fn jet_coefficient(a: &ExponentVector, b: &ExponentVector) -> BigInt {
    assert_eq!(a.len(), b.len(), "exponent vector length mismatch");
    let mut acc = BigInt::one();
    for (&ak, &bk) in a.entries().iter().zip(b.entries()) {
        if bk > ak {
            return BigInt::zero();
        }
        for j in 0..bk {
            acc *= ak - j;
        }
    }
    acc
}

fn jet_coefficient_mod(a: &ExponentVector, b: &ExponentVector, p: u64) -> u64 {
    let mut acc = 1u64;
    for (&ak, &bk) in a.entries().iter().zip(b.entries()) {
        if bk > ak {
            return 0;
        }
        for j in 0..bk {
            acc = acc * ((ak - j) as u64 % p) % p;
        }
    }
    acc
}

/// Row indices of the jet matrix: grouped by point, then `D(m_i - 1)` in
/// canonical order. Derivatives of order above `d` vanish identically, so a
/// point with `m_i > d + 1` contributes the order-`d` rows instead, which
/// already force every coefficient to vanish.
pub fn jet_rows(t: &Triple) -> Vec<JetRowIndex> {
    let mut out = Vec::with_capacity(t.u_size());
    for (i, &mi) in t.multiplicities().iter().enumerate() {
        for b in enumerate_simplex(t.n(), (mi - 1).min(t.d())) {
            out.push(JetRowIndex { point: i + 1, b });
        }
    }
    out
}

fn check_samples(t: &Triple, samples: &[Vec<i64>]) -> Result<()> {
    if samples.len() != t.r() {
        return Err(Error::InvalidTriple(format!(
            "{} samples for {} points",
            samples.len(),
            t.r()
        )));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.len() != t.n() + 1 {
            return Err(Error::DimensionMismatch(s.len(), t.n() + 1));
        }
        if s.iter().all(|&x| x == 0) {
            return Err(Error::ZeroSample(i + 1));
        }
    }
    Ok(())
}

/// The jet matrix with point `i` specialised to `samples[i - 1]`. Rows follow
/// [`jet_rows`], columns follow the canonical order of `t.points()`.
pub fn build_evaluated_matrix(t: &Triple, samples: &[Vec<i64>]) -> Result<ExactMatrix> {
    check_samples(t, samples)?;
    let rows = jet_rows(t);
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let s = &samples[row.point - 1];
            t.points()
                .iter()
                .map(|a| match a.checked_sub(&row.b) {
                    None => BigInt::zero(),
                    Some(e) => {
                        let mut v = jet_coefficient(a, &row.b);
                        for (&x, &k) in s.iter().zip(e.entries()) {
                            v *= BigInt::from(x).pow(k);
                        }
                        v
                    }
                })
                .collect()
        })
        .collect();
    if int_rows.is_empty() {
        return Ok(ExactMatrix::zeros(0, t.points().len()));
    }
    Ok(ExactMatrix::from_integer_rows(int_rows))
}

fn evaluated_matrix_mod(t: &Triple, samples: &[Vec<i64>], p: u64) -> Vec<Vec<u64>> {
    let d = t.d() as usize;
    let powers: Vec<Vec<Vec<u64>>> = samples
        .iter()
        .map(|s| {
            s.iter()
                .map(|&x| {
                    let base = x.rem_euclid(p as i64) as u64;
                    let mut tab = Vec::with_capacity(d + 1);
                    let mut acc = 1 % p;
                    for _ in 0..=d {
                        tab.push(acc);
                        acc = acc * base % p;
                    }
                    tab
                })
                .collect()
        })
        .collect();
    jet_rows(t)
        .iter()
        .map(|row| {
            let pw = &powers[row.point - 1];
            t.points()
                .iter()
                .map(|a| match a.checked_sub(&row.b) {
                    None => 0,
                    Some(e) => e
                        .entries()
                        .iter()
                        .enumerate()
                        .fold(jet_coefficient_mod(a, &row.b, p), |acc, (k, &ek)| {
                            acc * pw[k][ek as usize] % p
                        }),
                })
                .collect()
        })
        .collect()
}

/// Outcome of the randomized evaluation oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub dimension: usize,
    pub rank: usize,
    pub edim: usize,
    /// Full rank was observed at a concrete sample, which proves generic full rank.
    pub certified_nonspecial: bool,
    pub trials_used: usize,
    pub seed: u64,
}

/// Exact rank of the jet matrix of `t` at the given samples. A full rank
/// modulo a random prime settles it; otherwise the exact matrix is built.
pub fn evaluated_rank(t: &Triple, samples: &[Vec<i64>], prime: u64) -> Result<usize> {
    check_samples(t, samples)?;
    let target = jet_rows(t).len().min(t.points().len());
    if target == 0 {
        return Ok(0);
    }
    let modular = linalg::modular_rank(evaluated_matrix_mod(t, samples, prime), prime);
    if modular == target {
        return Ok(modular);
    }
    Ok(linalg::exact_rank(&build_evaluated_matrix(t, samples)?))
}

fn draw_samples<R: Rng>(rng: &mut R, r: usize, n: usize) -> Vec<Vec<i64>> {
    (0..r)
        .map(|_| loop {
            let s: Vec<i64> = (0..=n)
                .map(|_| rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND))
                .collect();
            if s.iter().any(|&x| x != 0) {
                break s;
            }
        })
        .collect()
}

/// `dim V_D(m)` for general points, as `#D` minus the largest evaluated rank
/// seen over `trials` independent random samples.
pub fn dim_linear_system(t: &Triple, trials: usize, seed: u64) -> OracleResult {
    let trials = trials.max(1);
    let cols = t.points().len();
    let target = jet_rows(t).len().min(cols);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let trial_seeds: Vec<u64> = (0..trials).map(|_| master.gen()).collect();
    let mut best = 0;
    let mut used = 0;
    for ts in trial_seeds {
        used += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let samples = draw_samples(&mut rng, t.r(), t.n());
        let prime = linalg::random_prime(&mut rng);
        let rank = evaluated_rank(t, &samples, prime).expect("samples are well formed");
        best = best.max(rank);
        if best == target {
            break;
        }
    }
    OracleResult {
        dimension: cols - best,
        rank: best,
        edim: t.edim(),
        certified_nonspecial: best == target,
        trials_used: used,
        seed,
    }
}

/// Row of the evaluation matrix of `W(m-1, .)`: every degree-`m-1` monomial
/// evaluated at `a`.
pub fn w_row(a: &ExponentVector, monomials: &[ExponentVector]) -> Vec<BigInt> {
    monomials
        .iter()
        .map(|e| {
            a.entries()
                .iter()
                .zip(e.entries())
                .fold(BigInt::one(), |acc, (&x, &k)| acc * BigInt::from(x).pow(k))
        })
        .collect()
}

/// `dim W^n(m-1, E)`: degree-`(m-1)` forms in `n+1` variables vanishing at
/// every point of `E`. Exact.
pub fn w_dimension(n: usize, m: u32, e: &[ExponentVector]) -> Result<usize> {
    if m == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let monomials = enumerate_simplex(n, m - 1);
    let full = monomials.len();
    if e.is_empty() {
        return Ok(full);
    }
    for a in e {
        if a.len() != n + 1 {
            return Err(Error::DimensionMismatch(a.len(), n + 1));
        }
    }
    let rows: Vec<Vec<BigInt>> = e.iter().map(|a| w_row(a, &monomials)).collect();
    Ok(full - linalg::integer_rank(rows))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speciality {
    Special,
    Nonspecial,
}

/// Speciality of the single-point triple `(n, E, (m))`, which must be over-
/// or well-determined.
pub fn is_special_single(n: usize, e: &[ExponentVector], m: u32) -> Result<Speciality> {
    if m == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let capacity = jet_conditions(n, m);
    if e.len() > capacity {
        return Err(Error::UnderDetermined {
            size: e.len(),
            capacity,
            m,
        });
    }
    let w = w_dimension(n, m, e)?;
    Ok(if w == capacity - e.len() {
        Speciality::Nonspecial
    } else {
        Speciality::Special
    })
}
