//! Purely combinatorial speciality and non-speciality certificates for a
//! single fat point `(n, E, (m))`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::simplex::{jet_conditions, rows_along, ExponentVector, RowAxis};

/// A family of parallel hyperplane sections `{level(a) = h}` for `h` in `levels`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelSlices {
    pub direction: RowAxis,
    pub levels: Vec<i64>,
}

impl ParallelSlices {
    pub fn new(direction: RowAxis, levels: Vec<i64>) -> Result<Self> {
        let mut seen = levels.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != levels.len() {
            return Err(Error::InvalidCandidate("slice levels must be distinct".into()));
        }
        Ok(ParallelSlices { direction, levels })
    }

    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn contains(&self, a: &ExponentVector) -> bool {
        self.levels.contains(&self.direction.level(a))
    }
}

fn check_capacity(n: usize, e: &[ExponentVector], m: u32) -> Result<usize> {
    if m == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let capacity = jet_conditions(n, m);
    if e.len() > capacity {
        return Err(Error::UnderDetermined { size: e.len(), capacity, m });
    }
    Ok(capacity)
}

/// Largest number of points `k` parallel slices may hold before a single
/// point of multiplicity `m` is forced special.
pub fn overload_threshold(n: usize, m: u32, k: usize) -> usize {
    jet_conditions(n, m) - jet_conditions(n, m - k as u32)
}

/// True when `E` has more points on the slices than they can absorb, which
/// certifies that `(n, E, (m))` is special.
pub fn slice_overload_special(n: usize, e: &[ExponentVector], m: u32, slices: &ParallelSlices) -> Result<bool> {
    if slices.k() > m as usize {
        return Err(Error::TooManySlices { k: slices.k(), m });
    }
    check_capacity(n, e, m)?;
    let hit = e.iter().filter(|a| slices.contains(a)).count();
    Ok(hit > overload_threshold(n, m, slices.k()))
}

/// Searches the coordinate directions for `k < m` rows that overload `E`.
/// Returns the witnessing slices.
pub fn axis_overload(n: usize, e: &[ExponentVector], m: u32) -> Option<ParallelSlices> {
    for axis in 0..=n {
        let fam = rows_along(e, RowAxis::Coordinate(axis));
        let mut by_size: Vec<(usize, i64)> = fam.levels.iter().map(|(&h, pts)| (pts.len(), h)).collect();
        by_size.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        let mut hit = 0;
        for (k, &(size, _)) in by_size.iter().enumerate().take((m as usize).saturating_sub(1)) {
            hit += size;
            if hit > overload_threshold(n, m, k + 1) {
                let levels = by_size[..=k].iter().map(|&(_, h)| h).collect();
                return Some(ParallelSlices { direction: RowAxis::Coordinate(axis), levels });
            }
        }
    }
    None
}

/// Smallest `m` such that slices needing `demands` capacity fit into
/// distinct capacities `1..=m`, assigning the largest demand first.
pub fn greedy_capacity(demands: &[usize]) -> usize {
    let mut sorted: Vec<usize> = demands.iter().copied().filter(|&v| v > 0).collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().map(|(i, &v)| v + i).max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrambledVerdict {
    CertifiedNonspecial,
    NoCertificate,
}

fn span_rank(normals: &[Vec<i64>], dim: usize) -> usize {
    let mut rows = vec![vec![BigInt::from(1); dim]];
    rows.extend(normals.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()));
    linalg::integer_rank(rows)
}

/// Smallest size of a scrambled simplex containing `points`, where every
/// slicing direction must cut the current affine span down by one.
fn scrambled_need(points: &[&ExponentVector], n: usize, normals: &mut Vec<Vec<i64>>, extra: Option<&[i64]>) -> usize {
    if points.len() <= 1 {
        return points.len();
    }
    let base = span_rank(normals, n + 1);
    if base >= n {
        // the remaining span is a line (or a point): any points on it are fine
        return points.len();
    }
    let mut candidates: Vec<Vec<i64>> = (0..=n)
        .map(|i| {
            let mut v = vec![0; n + 1];
            v[i] = 1;
            v
        })
        .collect();
    if let Some(c) = extra {
        candidates.push(c.to_vec());
    }
    let mut best = usize::MAX;
    for c in candidates {
        normals.push(c.clone());
        if span_rank(normals, n + 1) > base {
            let mut groups: BTreeMap<i64, Vec<&ExponentVector>> = BTreeMap::new();
            for &p in points {
                groups.entry(p.dot(&c)).or_default().push(p);
            }
            let demands: Vec<usize> = groups.values().map(|g| scrambled_need(g, n, normals, None)).collect();
            best = best.min(greedy_capacity(&demands));
        }
        normals.pop();
    }
    best
}

/// Searches recursive coordinate slicings for a scrambled simplex of size
/// `m` containing `E`.
pub fn scrambled_simplex_nonspecial(n: usize, e: &[ExponentVector], m: u32) -> Result<ScrambledVerdict> {
    scrambled_simplex_nonspecial_with(n, e, m, None)
}

/// As [`scrambled_simplex_nonspecial`], also trying the integer normal
/// `normal` as the outermost slicing direction.
pub fn scrambled_simplex_nonspecial_with(
    n: usize,
    e: &[ExponentVector],
    m: u32,
    normal: Option<&[i64]>,
) -> Result<ScrambledVerdict> {
    check_capacity(n, e, m)?;
    if let Some(c) = normal {
        if c.len() != n + 1 {
            return Err(Error::DimensionMismatch(c.len(), n + 1));
        }
    }
    for a in e {
        if a.len() != n + 1 {
            return Err(Error::DimensionMismatch(a.len(), n + 1));
        }
    }
    let refs: Vec<&ExponentVector> = e.iter().collect();
    Ok(if scrambled_need(&refs, n, &mut Vec::new(), normal) <= m as usize {
        ScrambledVerdict::CertifiedNonspecial
    } else {
        ScrambledVerdict::NoCertificate
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AfVerdict {
    Special,
    Nonspecial,
    Inconclusive,
}

/// Row criteria for a single point in the plane: overloaded rows prove
/// speciality, rows fitting distinct capacities prove non-speciality.
pub fn af_classify(e: &[ExponentVector], m: u32) -> Result<AfVerdict> {
    check_capacity(2, e, m)?;
    if let Some(a) = e.iter().find(|a| a.len() != 3) {
        return Err(Error::RequiresPlane(a.len().saturating_sub(1)));
    }
    if axis_overload(2, e, m).is_some() {
        return Ok(AfVerdict::Special);
    }
    for axis in 0..3 {
        let sizes = rows_along(e, RowAxis::Coordinate(axis)).sizes();
        if greedy_capacity(&sizes) <= m as usize {
            return Ok(AfVerdict::Nonspecial);
        }
    }
    Ok(AfVerdict::Inconclusive)
}
