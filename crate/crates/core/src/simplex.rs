//! Exponent vectors, the lattice simplex `D(d)` and the bookkeeping attached
//! to a triple `(n, D, m)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `N^{n+1}`, i.e. the exponents of a monomial in `X_0, ..., X_n`.
///
/// The `Ord` impl is the canonical enumeration order: colex, comparing
/// `a_n` first and `a_0` last.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(len: usize) -> Self {
        ExponentVector(vec![0; len])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Number of coordinates, `n + 1`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Componentwise sum. Panics if the lengths differ.
    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        assert_eq!(self.len(), other.len(), "exponent vector length mismatch");
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` if some coordinate would go negative.
    pub fn checked_sub(&self, other: &ExponentVector) -> Option<ExponentVector> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(ExponentVector)
    }

    /// Value of the integer linear form `coeffs` at this point.
    pub fn dot(&self, coeffs: &[i64]) -> i64 {
        self.0.iter().zip(coeffs).map(|(&a, &c)| a as i64 * c).sum()
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

impl<const N: usize> From<[u32; N]> for ExponentVector {
    fn from(v: [u32; N]) -> Self {
        ExponentVector(v.to_vec())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .iter()
            .rev()
            .cmp(other.0.iter().rev())
            .then(self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `C(n, k)`, saturating at `usize::MAX`.
pub fn binomial(n: u64, k: u64) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Number of jet conditions imposed by one point of multiplicity `m` in `P^n`.
pub fn jet_conditions(n: usize, m: u32) -> usize {
    if m == 0 {
        return 0;
    }
    binomial(m as u64 - 1 + n as u64, n as u64)
}

/// All exponent vectors of length `n + 1` and degree `d`, in canonical order.
pub fn enumerate_simplex(n: usize, d: u32) -> Vec<ExponentVector> {
    let mut out = Vec::with_capacity(binomial(d as u64 + n as u64, n as u64));
    let mut cur = vec![0u32; n + 1];
    fill_colex(n, d, &mut cur, &mut out);
    out
}

fn fill_colex(pos: usize, remaining: u32, cur: &mut [u32], out: &mut Vec<ExponentVector>) {
    if pos == 0 {
        cur[0] = remaining;
        out.push(ExponentVector(cur.to_vec()));
        return;
    }
    for a in 0..=remaining {
        cur[pos] = a;
        fill_colex(pos - 1, remaining - a, cur, out);
    }
    cur[pos] = 0;
}

/// Componentwise sum of a set of exponent vectors; the empty set sums to the
/// zero vector of length `len`.
pub fn part_sum<'a, I>(len: usize, points: I) -> ExponentVector
where
    I: IntoIterator<Item = &'a ExponentVector>,
{
    let mut acc = vec![0u32; len];
    for p in points {
        assert_eq!(p.len(), len, "exponent vector length mismatch");
        for (s, a) in acc.iter_mut().zip(p.entries()) {
            *s += a;
        }
    }
    ExponentVector(acc)
}

/// The direction along which a [`RowFamily`] slices a point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowAxis {
    /// Level sets of a single coordinate.
    Coordinate(usize),
    /// Level sets of an integer linear form.
    Form(Vec<i64>),
}

impl RowAxis {
    pub fn level(&self, a: &ExponentVector) -> i64 {
        match self {
            RowAxis::Coordinate(i) => a.get(*i) as i64,
            RowAxis::Form(c) => a.dot(c),
        }
    }
}

/// A point set split into parallel rows, keyed by level value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowFamily {
    pub axis: RowAxis,
    pub levels: BTreeMap<i64, Vec<ExponentVector>>,
}

impl RowFamily {
    pub fn sizes(&self) -> Vec<usize> {
        self.levels.values().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

pub fn rows(points: &[ExponentVector], axis: usize) -> RowFamily {
    rows_along(points, RowAxis::Coordinate(axis))
}

pub fn rows_along(points: &[ExponentVector], axis: RowAxis) -> RowFamily {
    let mut levels: BTreeMap<i64, Vec<ExponentVector>> = BTreeMap::new();
    for p in points {
        levels.entry(axis.level(p)).or_default().push(p.clone());
    }
    RowFamily { axis, levels }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Determinacy {
    Over,
    Under,
    Well,
}

/// The data `(n, D, m)`: a set `D` of degree-`d` exponent vectors and the
/// multiplicities of `r` general points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    n: usize,
    d: u32,
    points: Vec<ExponentVector>,
    m: Vec<u32>,
}

impl Triple {
    /// Builds a triple; `points` is sorted into canonical order and deduplicated.
    pub fn new(n: usize, d: u32, mut points: Vec<ExponentVector>, m: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTriple("n must be at least 1".into()));
        }
        if m.contains(&0) {
            return Err(Error::ZeroMultiplicity);
        }
        for p in &points {
            if p.len() != n + 1 {
                return Err(Error::DimensionMismatch(p.len(), n + 1));
            }
            if p.degree() != d as u64 {
                return Err(Error::PointNotInSimplex {
                    point: p.clone(),
                    degree: d,
                });
            }
        }
        points.sort();
        points.dedup();
        Ok(Triple { n, d, points, m })
    }

    /// The triple `(n, D(d), m)`.
    pub fn full(n: usize, d: u32, m: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTriple("n must be at least 1".into()));
        }
        Triple::new(n, d, enumerate_simplex(n, d), m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn points(&self) -> &[ExponentVector] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.m
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }

    pub fn is_full(&self) -> bool {
        self.points.len() == binomial(self.d as u64 + self.n as u64, self.n as u64)
    }

    /// `#U`, the total number of jet conditions.
    pub fn u_size(&self) -> usize {
        self.m.iter().map(|&mi| jet_conditions(self.n, mi)).sum()
    }

    pub fn edim(&self) -> usize {
        self.points.len().saturating_sub(self.u_size())
    }

    pub fn determinacy(&self) -> Determinacy {
        match self.points.len().cmp(&self.u_size()) {
            Ordering::Less => Determinacy::Over,
            Ordering::Greater => Determinacy::Under,
            Ordering::Equal => Determinacy::Well,
        }
    }

    /// The same point set with a different multiplicity vector.
    pub fn with_multiplicities(&self, m: Vec<u32>) -> Result<Triple> {
        Triple::new(self.n, self.d, self.points.clone(), m)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointsRepr {
    Keyword(String),
    List(Vec<ExponentVector>),
}

#[derive(Serialize, Deserialize)]
struct TripleRepr {
    n: usize,
    d: u32,
    #[serde(rename = "D")]
    points: PointsRepr,
    m: Vec<u32>,
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let points = if self.is_full() {
            PointsRepr::Keyword("full".into())
        } else {
            PointsRepr::List(self.points.clone())
        };
        TripleRepr {
            n: self.n,
            d: self.d,
            points,
            m: self.m.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Triple {
    fn deserialize<De: Deserializer<'de>>(de: De) -> std::result::Result<Self, De::Error> {
        use serde::de::Error as _;
        let repr = TripleRepr::deserialize(de)?;
        let points = match repr.points {
            PointsRepr::Keyword(k) if k == "full" => enumerate_simplex(repr.n, repr.d),
            PointsRepr::Keyword(k) => {
                return Err(De::Error::custom(format!("unknown point-set keyword {k:?}")))
            }
            PointsRepr::List(v) => v,
        };
        Triple::new(repr.n, repr.d, points, repr.m).map_err(De::Error::custom)
    }
}
