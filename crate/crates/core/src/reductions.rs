//! Chains of reductions `D = D_r ⊇ ... ⊇ D_0`, each step removing a set
//! that one fat point can absorb. The final size `#D_0` bounds the dimension
//! of the linear system from above.

use serde::{Deserialize, Serialize};

use crate::certificates::axis_overload;
use crate::error::{Error, Result};
use crate::jet::{is_special_single, w_row, Speciality};
use crate::linalg::IncrementalRank;
use crate::ordering::{enumerate_subsets_in_order, MonomialOrdering};
use crate::simplex::{enumerate_simplex, jet_conditions, ExponentVector, Triple};

/// Bookkeeping for one row consumed by an `(m, ⪯)`-reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowBookkeeping {
    /// Value of the row coordinate on this row.
    pub level: u32,
    pub size: usize,
    /// Capacities still available when the row is processed.
    pub omega: Vec<u32>,
    pub u: usize,
    pub u_prime: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpReduction {
    pub removed: Vec<ExponentVector>,
    pub rows: Vec<RowBookkeeping>,
}

impl MpReduction {
    /// Points an augmentation would add: `sum_j (u'_j - u_j)`.
    pub fn augmentation(&self) -> usize {
        self.rows.iter().map(|r| r.u_prime as usize - r.u).sum()
    }
}

/// The `(m, ⪯)`-reduction of a plane point set: walk the `⪯`-minimal rows,
/// taking from row `j` its `u_j = min(max Ω_j, #R_j)` smallest points and
/// retiring the capacity `u'_j = min{s ∈ Ω_j : s ≥ u_j}`.
pub fn mp_reduction(d: &[ExponentVector], m: u32, ord: &MonomialOrdering) -> Result<MpReduction> {
    if m == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    if ord.arity() != 3 {
        return Err(Error::RequiresPlane(ord.arity().saturating_sub(1)));
    }
    if let Some(a) = d.iter().find(|a| a.len() != 3) {
        return Err(Error::OrderingArity { ordering: 3, points: a.len() });
    }
    let sorted = ord.sorted(d);
    let axis = ord.row_axis();
    let mut rows: Vec<&[ExponentVector]> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i].get(axis) != sorted[start].get(axis) {
            rows.push(&sorted[start..i]);
            start = i;
        }
    }
    let mut omega: Vec<u32> = (1..=m).collect();
    let mut out = MpReduction { removed: Vec::new(), rows: Vec::new() };
    for row in rows.into_iter().take(m as usize) {
        let max = *omega.last().expect("omega is nonempty while rows remain");
        let u = (max as usize).min(row.len());
        let pos = omega.iter().position(|&s| s as usize >= u).expect("max Ω ≥ u");
        out.rows.push(RowBookkeeping {
            level: row[0].get(axis),
            size: row.len(),
            omega: omega.clone(),
            u,
            u_prime: omega[pos],
        });
        omega.remove(pos);
        out.removed.extend_from_slice(&row[..u]);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    /// Chain label: the step producing `D_{label-1}` from `D_label`.
    pub label: usize,
    /// 1-based index of the point whose multiplicity is consumed.
    pub point: usize,
    pub multiplicity: u32,
    pub ordering: MonomialOrdering,
    pub removed: Vec<ExponentVector>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<RowBookkeeping>,
    /// `#(G_i \ D_i)` for the implicit augmentation.
    pub augmentation: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub initial: Vec<ExponentVector>,
    pub steps: Vec<ReductionStep>,
    #[serde(rename = "final")]
    pub final_set: Vec<ExponentVector>,
}

impl ReductionTrace {
    pub fn removed_sizes(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.removed.len()).collect()
    }

    /// Checks that removed sets are disjoint subsets of the initial set and
    /// that the final set is what remains.
    pub fn is_consistent(&self) -> bool {
        let mut remaining: std::collections::BTreeSet<&ExponentVector> = self.initial.iter().collect();
        for s in &self.steps {
            for a in &s.removed {
                if !remaining.remove(a) {
                    return false;
                }
            }
        }
        remaining.into_iter().eq(self.final_set.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Nonspecial,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationResult {
    pub bound: usize,
    pub status: Status,
    pub edim: usize,
    pub trace: ReductionTrace,
}

impl CertificationResult {
    fn conclude(edim: usize, trace: ReductionTrace) -> Self {
        let bound = trace.final_set.len();
        let status = if bound == edim { Status::Nonspecial } else { Status::Undecided };
        CertificationResult { bound, status, edim, trace }
    }
}

fn check_orderings(m: &[u32], ords: &[MonomialOrdering], n: usize) -> Result<()> {
    if ords.len() != m.len() {
        return Err(Error::OrderingCount { expected: m.len(), got: ords.len() });
    }
    if let Some(o) = ords.iter().find(|o| o.arity() != n + 1) {
        return Err(Error::OrderingArity { ordering: o.arity(), points: n + 1 });
    }
    Ok(())
}

/// Successive `(m_i, ⪯_i)`-reductions of `D(d)` in the plane. The pairs are
/// consumed in the order given, so the first listed ordering acts on the
/// full simplex.
pub fn algorithm1(d: u32, m: &[u32], ords: &[MonomialOrdering]) -> Result<CertificationResult> {
    check_orderings(m, ords, 2)?;
    let t = Triple::full(2, d, m.to_vec())?;
    let mut current = t.points().to_vec();
    let mut steps = Vec::with_capacity(m.len());
    for (i, (&mi, ord)) in m.iter().zip(ords).enumerate() {
        let red = mp_reduction(&current, mi, ord)?;
        current.retain(|a| red.removed.binary_search_by(|b| ord.cmp_points(b, a)).is_err());
        steps.push(ReductionStep {
            label: m.len() - i,
            point: i + 1,
            multiplicity: mi,
            ordering: ord.clone(),
            augmentation: red.augmentation(),
            removed: red.removed,
            rows: red.rows,
        });
    }
    let trace = ReductionTrace { initial: t.points().to_vec(), steps, final_set: current };
    Ok(CertificationResult::conclude(t.edim(), trace))
}

/// Greedy scan in `⪯` order keeping every point that stays independent in
/// `W(m-1, .)`. Returns the kept points in `⪯` order, at most `limit` of them.
fn greedy_independent(n: usize, d: &[ExponentVector], m: u32, ord: &MonomialOrdering, limit: usize) -> Vec<ExponentVector> {
    let monomials = enumerate_simplex(n, m - 1);
    let mut sorted = ord.sorted(d);
    sorted.dedup();
    let mut basis = IncrementalRank::new();
    let mut kept: Vec<ExponentVector> = Vec::new();
    for a in sorted {
        if kept.len() == limit {
            break;
        }
        kept.push(a);
        if axis_overload(n, &kept, m).is_some() || !basis.push(&w_row(kept.last().unwrap(), &monomials)) {
            kept.pop();
        }
    }
    kept
}

fn check_single(n: usize, d: &[ExponentVector], c: usize, m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let capacity = jet_conditions(n, m);
    if c > capacity {
        return Err(Error::UnderDetermined { size: c, capacity, m });
    }
    if let Some(a) = d.iter().find(|a| a.len() != n + 1) {
        return Err(Error::DimensionMismatch(a.len(), n + 1));
    }
    Ok(())
}

/// The `⪯`-smallest `c`-subset `E ⊆ D` with `(n, E, (m))` non-special, or
/// `None` when no such subset exists.
///
/// Non-special subsets are exactly the independent sets of the point
/// evaluations in `W(m-1, .)`, so the answer is the first `c` points a
/// greedy `⪯`-ordered scan keeps.
pub fn minimal_nonspecial(
    n: usize,
    d: &[ExponentVector],
    c: usize,
    m: u32,
    ord: &MonomialOrdering,
) -> Result<Option<Vec<ExponentVector>>> {
    check_single(n, d, c, m)?;
    let kept = greedy_independent(n, d, m, ord, c);
    Ok((kept.len() == c).then_some(kept))
}

/// Reference implementation of [`minimal_nonspecial`]: walks all
/// `c`-subsets in `⪯` order and tests each exactly.
pub fn minimal_nonspecial_by_enumeration(
    n: usize,
    d: &[ExponentVector],
    c: usize,
    m: u32,
    ord: &MonomialOrdering,
) -> Result<Option<Vec<ExponentVector>>> {
    check_single(n, d, c, m)?;
    for e in enumerate_subsets_in_order(d, c, ord) {
        if is_special_single(n, &e, m)? == Speciality::Nonspecial {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// Successive minimal non-special subsets: step `i` removes the `⪯_i`-smallest
/// non-special subset of the largest size `c_i ≤ C(m_i+n-1, n)` available.
/// Pairs are consumed in the order given.
pub fn algorithm0(t: &Triple, ords: &[MonomialOrdering]) -> Result<CertificationResult> {
    let n = t.n();
    check_orderings(t.multiplicities(), ords, n)?;
    let mut current = t.points().to_vec();
    let mut steps = Vec::with_capacity(ords.len());
    let r = t.r();
    for (i, (&mi, ord)) in t.multiplicities().iter().zip(ords).enumerate() {
        // non-empty families are closed under subsets, so the largest
        // feasible size is the greedy rank and the greedy set is minimal
        let removed = greedy_independent(n, &current, mi, ord, jet_conditions(n, mi));
        current.retain(|a| !removed.contains(a));
        steps.push(ReductionStep {
            label: r - i,
            point: i + 1,
            multiplicity: mi,
            ordering: ord.clone(),
            removed,
            rows: Vec::new(),
            augmentation: 0,
        });
    }
    let trace = ReductionTrace { initial: t.points().to_vec(), steps, final_set: current };
    Ok(CertificationResult::conclude(t.edim(), trace))
}
