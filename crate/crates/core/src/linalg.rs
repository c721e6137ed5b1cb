//! Exact rank and determinant kernels over the rationals.
//!
//! `exact_rank` clears denominators row by row, probes the rank modulo a few
//! word-size primes (a modular rank never exceeds the rational rank, so a
//! full modular rank settles the question) and otherwise runs fraction-free
//! Bareiss elimination, first in checked `i128` and then in big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Dense rectangular matrix of rationals, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        ExactMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_integer_rows(rows: Vec<Vec<BigInt>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_integer_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = ExactMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn scale_row(&mut self, i: usize, factor: &BigRational) {
        for j in 0..self.cols {
            let v = &self.entries[i * self.cols + j] * factor;
            self.entries[i * self.cols + j] = v;
        }
    }

    /// Each row multiplied by the lcm of its denominators.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect()
    }
}

/// Exact rank over `Q`.
pub fn exact_rank(a: &ExactMatrix) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    integer_rank(a.integer_rows())
}

/// Exact rank of an integer matrix given as rows.
pub fn integer_rank(rows: Vec<Vec<BigInt>>) -> usize {
    let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
    if r == 0 || c == 0 {
        return 0;
    }
    let target = r.min(c);
    for p in probe_primes() {
        let reduced: Vec<Vec<u64>> = rows
            .iter()
            .map(|row| row.iter().map(|x| mod_reduce(x, p)).collect())
            .collect();
        if modular_rank(reduced, p) == target {
            return target;
        }
    }
    if let Some(small) = to_i128_rows(&rows) {
        if let Some(rank) = bareiss_rank_i128(small) {
            return rank;
        }
    }
    bareiss_rank(rows)
}

/// Determinant of a square integer matrix (`det` of the empty matrix is 1).
pub fn integer_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix is not square");
    if n == 0 {
        return BigInt::one();
    }
    if let Some(det) = to_i128_rows(rows).and_then(i128_det) {
        return BigInt::from(det);
    }
    let mut m = rows.to_vec();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            m.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Checked fraction-free determinant; `None` on overflow.
pub fn i128_det(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut prev: i128 = 1;
    let mut negate = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i][k] != 0) else {
            return Some(0);
        };
        if piv != k {
            m.swap(piv, k);
            negate = !negate;
        }
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            for j in k + 1..n {
                let v = pivot_row[k]
                    .checked_mul(row[j])?
                    .checked_sub(row[k].checked_mul(pivot_row[j])?)?;
                row[j] = v / prev;
            }
            row[k] = 0;
        }
        prev = m[k][k];
    }
    let det = m[n - 1][n - 1];
    Some(if negate { -det } else { det })
}

pub fn i64_det(rows: &[Vec<i64>]) -> BigInt {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    integer_det(&big)
}

fn to_i128_rows(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect())
        .collect()
}

/// Fraction-free elimination in checked `i128`; `None` on overflow.
fn bareiss_rank_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut prev: i128 = 1;
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(piv, r);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = row[col];
            for j in col + 1..cols {
                let v = pivot_row[col]
                    .checked_mul(row[j])?
                    .checked_sub(lead.checked_mul(pivot_row[j])?)?;
                row[j] = v / prev;
            }
            row[col] = 0;
        }
        prev = m[r][col];
        r += 1;
    }
    Some(r)
}

fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let (rows, cols) = (m.len(), m[0].len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(piv, r);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let prev_ref = &prev;
        rest.par_iter_mut().for_each(|row| {
            if row[col].is_zero() {
                // (p * x - 0) / prev
                for j in col + 1..cols {
                    if !row[j].is_zero() {
                        row[j] = &pivot_row[col] * &row[j] / prev_ref;
                    }
                }
                return;
            }
            let lead = std::mem::take(&mut row[col]);
            for j in col + 1..cols {
                row[j] = (&pivot_row[col] * &row[j] - &lead * &pivot_row[j]) / prev_ref;
            }
        });
        prev = m[r][col].clone();
        r += 1;
    }
    r
}

pub fn mod_reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A uniformly drawn prime in `[2^30, 2^31)`; products of two residues fit in
/// a `u64`.
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}

fn probe_primes() -> [u64; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_7a71);
    [random_prime(&mut rng), random_prime(&mut rng)]
}

/// Rank of a matrix over `F_p`, `p < 2^32`. Entries must already be reduced.
pub fn modular_rank(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let parallel = rows * cols > 64 * 64;
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(piv, r);
        let inv = inv_mod(m[r][col], p);
        for x in m[r][col..].iter_mut() {
            *x = *x * inv % p;
        }
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let eliminate = |row: &mut Vec<u64>| {
            let f = row[col];
            if f == 0 {
                return;
            }
            let g = p - f;
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = (*x + g * y) % p;
            }
        };
        if parallel {
            rest.par_iter_mut().for_each(eliminate);
        } else {
            rest.iter_mut().for_each(eliminate);
        }
        r += 1;
    }
    r
}

/// Incremental independence test for integer row vectors over `Q`.
///
/// Stored rows are kept reduced against every earlier pivot, so the most
/// recently accepted row can be popped without touching the others.
#[derive(Clone, Debug, Default)]
pub struct IncrementalRank {
    basis: Vec<(usize, Vec<BigInt>)>,
}

impl IncrementalRank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Reduces `v` against the stored rows; `None` when it lies in their span.
    pub fn reduce(&self, v: &[BigInt]) -> Option<(usize, Vec<BigInt>)> {
        let mut v = v.to_vec();
        for (pc, b) in &self.basis {
            if v[*pc].is_zero() {
                continue;
            }
            let (bp, vp) = (b[*pc].clone(), v[*pc].clone());
            for (x, y) in v.iter_mut().zip(b) {
                *x = &bp * &*x - &vp * y;
            }
            normalize(&mut v);
        }
        let pivot = v.iter().position(|x| !x.is_zero())?;
        Some((pivot, v))
    }

    /// Whether `v` is independent of the stored rows (nothing is stored).
    pub fn is_independent(&self, v: &[BigInt]) -> bool {
        self.reduce(v).is_some()
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn push(&mut self, v: &[BigInt]) -> bool {
        match self.reduce(v) {
            Some(entry) => {
                self.basis.push(entry);
                true
            }
            None => false,
        }
    }

    pub fn pop(&mut self) {
        self.basis.pop();
    }
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g > BigInt::one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
    }
}
