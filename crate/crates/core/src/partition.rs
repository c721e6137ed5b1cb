//! Exceptional partitions: the `σ(E)` coefficients, the search that decides
//! whether a partition is exceptional, the hyperplane partitions of `D(d)`
//! for `m^{×s^n}`, and a driver for generalized reduction plans.

use std::collections::{BTreeMap, BTreeSet};
use std::cell::Cell;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::certificates::{scrambled_simplex_nonspecial, ScrambledVerdict};
use crate::error::{Error, Result};
use crate::jet::jet_coefficient;
use crate::linalg::{self, IncrementalRank};
use crate::ordering::MonomialOrdering;
use crate::reductions::{mp_reduction, MpReduction, Status};
use crate::simplex::{enumerate_simplex, jet_conditions, part_sum, ExponentVector, Triple};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A square minor of the jet matrix together with a partition of its columns:
/// part `i` is matched to the derivative rows `rows[i]` of point `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanRepr")]
pub struct PartitionPlan {
    pub triple: Triple,
    pub parts: Vec<Vec<ExponentVector>>,
    pub rows: Vec<Vec<ExponentVector>>,
}

#[derive(Deserialize)]
struct PlanRepr {
    triple: Triple,
    parts: Vec<Vec<ExponentVector>>,
    rows: Vec<Vec<ExponentVector>>,
}

impl TryFrom<PlanRepr> for PartitionPlan {
    type Error = Error;

    fn try_from(r: PlanRepr) -> Result<Self> {
        PartitionPlan::new(r.triple, r.parts, r.rows)
    }
}

fn row_degree(t: &Triple, mi: u32) -> u32 {
    (mi - 1).min(t.d())
}

impl PartitionPlan {
    /// Validates and canonicalises a plan: parts and rows are sorted, parts
    /// must be disjoint subsets of `D`, and part `i` needs as many distinct
    /// derivatives of order `m_i - 1` as it has points.
    pub fn new(triple: Triple, mut parts: Vec<Vec<ExponentVector>>, mut rows: Vec<Vec<ExponentVector>>) -> Result<Self> {
        let r = triple.r();
        if parts.len() != r || rows.len() != r {
            return Err(Error::MalformedPlan(format!(
                "{} parts and {} row sets for {r} points",
                parts.len(),
                rows.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (i, part) in parts.iter_mut().enumerate() {
            part.sort();
            for a in part.iter() {
                if triple.points().binary_search(a).is_err() {
                    return Err(Error::MalformedPlan(format!("part {} contains {a}, which is not in D", i + 1)));
                }
                if !seen.insert(a.clone()) {
                    return Err(Error::MalformedPlan(format!("{a} appears in more than one part")));
                }
            }
        }
        for (i, rs) in rows.iter_mut().enumerate() {
            rs.sort();
            let deg = row_degree(&triple, triple.multiplicities()[i]) as u64;
            if rs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedPlan(format!("repeated row for point {}", i + 1)));
            }
            if let Some(b) = rs.iter().find(|b| b.len() != triple.n() + 1 || b.degree() != deg) {
                return Err(Error::MalformedPlan(format!("row {b} of point {} is not a derivative of order {deg}", i + 1)));
            }
            if rs.len() != parts[i].len() {
                return Err(Error::MalformedPlan(format!(
                    "point {} has {} rows for {} columns",
                    i + 1,
                    rs.len(),
                    parts[i].len()
                )));
            }
        }
        Ok(PartitionPlan { triple, parts, rows })
    }

    /// `σ(E)` up to sign and monomial: the product of the part coefficients.
    pub fn sigma(&self) -> BigInt {
        self.parts
            .iter()
            .zip(&self.rows)
            .map(|(e, u)| sigma_coefficient(u, e).expect("plan sizes are validated"))
            .product()
    }
}

/// The scalar `κ` with `det(U'_i, E_i) = κ P_i^{a_i(E) - b_i}`: the
/// determinant of `[jet_coefficient(a, b)]`, rows `b ∈ U'_i` and columns
/// `a ∈ E_i`, both in canonical order.
pub fn sigma_coefficient(rows: &[ExponentVector], part: &[ExponentVector]) -> Result<BigInt> {
    if rows.len() != part.len() {
        return Err(Error::SizeMismatch(rows.len(), part.len()));
    }
    let mut rows = rows.to_vec();
    let mut part = part.to_vec();
    rows.sort();
    part.sort();
    Ok(linalg::integer_det(&coefficient_matrix(&rows, &part)))
}

fn coefficient_matrix(rows: &[ExponentVector], part: &[ExponentVector]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|b| part.iter().map(|a| jet_coefficient(a, b)).collect())
        .collect()
}

fn kappa_nonzero(rows: &[ExponentVector], part: &[&ExponentVector]) -> bool {
    let m: Vec<Vec<i128>> = rows
        .iter()
        .map(|b| part.iter().map(|a| jet_coefficient(a, b).to_i128().unwrap_or(i128::MAX)).collect())
        .collect();
    let fits = m.iter().flatten().all(|&x| x != i128::MAX);
    match fits.then(|| linalg::i128_det(m)).flatten() {
        Some(det) => det != 0,
        None => {
            let owned: Vec<ExponentVector> = part.iter().map(|&a| a.clone()).collect();
            !linalg::integer_det(&coefficient_matrix(rows, &owned)).is_zero()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalVerdict {
    Exceptional,
    NotExceptional,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalityReport {
    pub verdict: ExceptionalVerdict,
    /// 1-based index of a part whose coefficient vanishes, so that `σ(E) = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_part: Option<usize>,
    /// A different partition with the same part sums and `σ(F) ≠ 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<ExponentVector>>>,
    pub nodes: u64,
}

struct Candidate {
    indices: Vec<usize>,
}

struct Counter {
    nodes: Cell<u64>,
    budget: u64,
}

impl Counter {
    /// Counts one node; false once the budget is spent.
    fn tick(&self) -> bool {
        let n = self.nodes.get();
        if n >= self.budget {
            return false;
        }
        self.nodes.set(n + 1);
        true
    }
}

/// For every start index and count `j`, the largest and smallest sums of `j`
/// values of each coordinate among the points from that index on.
struct SuffixBounds {
    hi: Vec<Vec<Vec<u64>>>,
    lo: Vec<Vec<Vec<u64>>>,
}

impl SuffixBounds {
    fn new(points: &[ExponentVector], k: usize) -> Self {
        let len = points.first().map_or(0, ExponentVector::len);
        let n = points.len();
        let mut hi = vec![vec![vec![0; k + 1]; len]; n + 1];
        let mut lo = vec![vec![vec![u64::MAX; k + 1]; len]; n + 1];
        for c in 0..len {
            let mut vals: Vec<u64> = Vec::new();
            for idx in (0..=n).rev() {
                if idx < n {
                    let v = points[idx].get(c) as u64;
                    let pos = vals.partition_point(|&x| x < v);
                    vals.insert(pos, v);
                }
                for j in 0..=k.min(vals.len()) {
                    lo[idx][c][j] = vals[..j].iter().sum();
                    hi[idx][c][j] = vals[vals.len() - j..].iter().sum();
                }
            }
        }
        SuffixBounds { hi, lo }
    }

    fn admits(&self, idx: usize, j: usize, rem: &[u64]) -> bool {
        rem.iter().enumerate().all(|(c, &r)| self.lo[idx][c][j] <= r && r <= self.hi[idx][c][j])
    }
}

/// All `k`-subsets of `points` with coordinate sum `target` and nonzero
/// coefficient for `rows`. `None` when the budget runs out.
fn part_candidates(
    points: &[ExponentVector],
    bounds: &SuffixBounds,
    target: &ExponentVector,
    rows: &[ExponentVector],
    counter: &Counter,
) -> Option<Vec<Candidate>> {
    fn go(
        points: &[ExponentVector],
        bounds: &SuffixBounds,
        rows: &[ExponentVector],
        counter: &Counter,
        start: usize,
        rem: &mut Vec<u64>,
        chosen: &mut Vec<usize>,
        k: usize,
        out: &mut Vec<Candidate>,
    ) -> bool {
        if !counter.tick() {
            return false;
        }
        let j = k - chosen.len();
        if j == 0 {
            let part: Vec<&ExponentVector> = chosen.iter().map(|&i| &points[i]).collect();
            if kappa_nonzero(rows, &part) {
                out.push(Candidate { indices: chosen.clone() });
            }
            return true;
        }
        for idx in start..=points.len() - j {
            if !bounds.admits(idx, j, rem) {
                // shorter suffixes have tighter bounds
                break;
            }
            let a = &points[idx];
            if a.entries().iter().zip(rem.iter()).any(|(&x, &r)| x as u64 > r) {
                continue;
            }
            for (r, &x) in rem.iter_mut().zip(a.entries()) {
                *r -= x as u64;
            }
            chosen.push(idx);
            let ok = go(points, bounds, rows, counter, idx + 1, rem, chosen, k, out);
            chosen.pop();
            for (r, &x) in rem.iter_mut().zip(a.entries()) {
                *r += x as u64;
            }
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    let k = rows.len();
    if k > points.len() {
        return Some(out);
    }
    let mut rem: Vec<u64> = target.entries().iter().map(|&x| x as u64).collect();
    go(points, bounds, rows, counter, 0, &mut rem, &mut Vec::new(), k, &mut out).then_some(out)
}

enum Search {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget,
}

/// Choice of one candidate per part with pairwise disjoint candidates, in
/// the style of dancing links: candidates clashing with a choice are killed
/// and restored from a trail, and the search branches on whichever part (or,
/// when every point must be covered, uncovered point) has fewest options.
struct Cover<'a> {
    cands: &'a [Candidate],
    owner: Vec<usize>,
    by_part: Vec<Vec<usize>>,
    by_point: Vec<Vec<usize>>,
    part_size: Vec<usize>,
    alive: Vec<bool>,
    part_alive: Vec<usize>,
    point_alive: Vec<usize>,
    assigned: Vec<bool>,
    covered: Vec<bool>,
    open_parts: usize,
    open_size: usize,
    uncovered: usize,
    trail: Vec<usize>,
}

impl<'a> Cover<'a> {
    fn new(cands: &'a [Candidate], owner: Vec<usize>, part_size: Vec<usize>, points: usize) -> Self {
        let parts = part_size.len();
        let mut by_part = vec![Vec::new(); parts];
        let mut by_point = vec![Vec::new(); points];
        for (id, c) in cands.iter().enumerate() {
            by_part[owner[id]].push(id);
            for &x in &c.indices {
                by_point[x].push(id);
            }
        }
        Cover {
            cands,
            part_alive: by_part.iter().map(Vec::len).collect(),
            point_alive: by_point.iter().map(Vec::len).collect(),
            owner,
            by_part,
            by_point,
            alive: vec![true; cands.len()],
            assigned: vec![false; parts],
            covered: vec![false; points],
            open_parts: parts,
            open_size: part_size.iter().sum(),
            uncovered: points,
            part_size,
            trail: Vec::new(),
        }
    }

    fn kill(&mut self, id: usize) {
        if !self.alive[id] {
            return;
        }
        self.alive[id] = false;
        self.part_alive[self.owner[id]] -= 1;
        for &x in &self.cands[id].indices {
            self.point_alive[x] -= 1;
        }
        self.trail.push(id);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let id = self.trail.pop().expect("trail is longer than mark");
            self.alive[id] = true;
            self.part_alive[self.owner[id]] += 1;
            for &x in &self.cands[id].indices {
                self.point_alive[x] += 1;
            }
        }
    }

    fn select(&mut self, id: usize) {
        let p = self.owner[id];
        self.assigned[p] = true;
        self.open_parts -= 1;
        self.open_size -= self.part_size[p];
        for i in 0..self.by_part[p].len() {
            let other = self.by_part[p][i];
            self.kill(other);
        }
        for &x in &self.cands[id].indices {
            self.covered[x] = true;
            self.uncovered -= 1;
            for i in 0..self.by_point[x].len() {
                let other = self.by_point[x][i];
                self.kill(other);
            }
        }
    }

    fn deselect(&mut self, id: usize, mark: usize) {
        self.undo(mark);
        let p = self.owner[id];
        self.assigned[p] = false;
        self.open_parts += 1;
        self.open_size += self.part_size[p];
        for &x in &self.cands[id].indices {
            self.covered[x] = false;
            self.uncovered += 1;
        }
    }

    /// Candidates to branch over, or `None` when some constraint is dead.
    fn branch(&self) -> Option<Vec<usize>> {
        let mut best: Option<(usize, bool, usize)> = None;
        for p in (0..self.part_size.len()).filter(|&p| !self.assigned[p]) {
            let count = self.part_alive[p];
            if best.is_none_or(|(c, _, _)| count < c) {
                best = Some((count, true, p));
            }
        }
        if self.open_size == self.uncovered {
            for x in (0..self.covered.len()).filter(|&x| !self.covered[x]) {
                let count = self.point_alive[x];
                if best.is_none_or(|(c, _, _)| count < c) {
                    best = Some((count, false, x));
                }
            }
        }
        let (count, is_part, key) = best?;
        if count == 0 {
            return None;
        }
        let list = if is_part { &self.by_part[key] } else { &self.by_point[key] };
        Some(list.iter().copied().filter(|&id| self.alive[id]).collect())
    }

    fn search(&mut self, own: &[usize], picked: &mut Vec<usize>, differs: bool, counter: &Counter) -> Search {
        if self.open_parts == 0 {
            return if differs { Search::Found(picked.clone()) } else { Search::Exhausted };
        }
        let Some(options) = self.branch() else {
            return Search::Exhausted;
        };
        for id in options {
            if !counter.tick() {
                return Search::OutOfBudget;
            }
            let mark = self.trail.len();
            self.select(id);
            picked.push(id);
            let res = self.search(own, picked, differs || own[self.owner[id]] != id, counter);
            picked.pop();
            self.deselect(id, mark);
            if !matches!(res, Search::Exhausted) {
                return res;
            }
        }
        Search::Exhausted
    }
}

/// Decides whether `plan` is exceptional: `σ(E) ≠ 0`, and no other family of
/// disjoint subsets of `D` with the same part sizes and part sums has
/// `σ(F) ≠ 0`. The search stops after `budget` nodes.
pub fn verify_exceptional(plan: &PartitionPlan, budget: u64) -> ExceptionalityReport {
    let counter = Counter { nodes: Cell::new(0), budget };
    let report = |verdict, zero_part, witness| ExceptionalityReport {
        verdict,
        zero_part,
        witness,
        nodes: counter.nodes.get(),
    };

    for (i, (e, u)) in plan.parts.iter().zip(&plan.rows).enumerate() {
        if sigma_coefficient(u, e).expect("plan sizes are validated").is_zero() {
            return report(ExceptionalVerdict::NotExceptional, Some(i + 1), None);
        }
    }

    let points = plan.triple.points();
    let active: Vec<usize> = (0..plan.parts.len()).filter(|&i| !plan.parts[i].is_empty()).collect();
    let kmax = active.iter().map(|&i| plan.parts[i].len()).max().unwrap_or(0);
    let bounds = SuffixBounds::new(points, kmax);
    let mut cands: Vec<(usize, Vec<Candidate>, usize)> = Vec::new();
    for &i in &active {
        let target = part_sum(plan.triple.n() + 1, &plan.parts[i]);
        let Some(list) = part_candidates(points, &bounds, &target, &plan.rows[i], &counter) else {
            return report(ExceptionalVerdict::BudgetExceeded, None, None);
        };
        let own_idx: Vec<usize> = plan.parts[i]
            .iter()
            .map(|a| points.binary_search(a).expect("parts lie in D"))
            .collect();
        let own = list
            .iter()
            .position(|c| c.indices == own_idx)
            .expect("E_i has the target sum and nonzero coefficient");
        cands.push((i, list, own));
    }
    let mut all = Vec::new();
    let mut owner = Vec::new();
    let mut own = Vec::new();
    let mut sizes = Vec::new();
    for (slot, (i, list, own_pos)) in cands.into_iter().enumerate() {
        own.push(all.len() + own_pos);
        sizes.push(plan.parts[i].len());
        owner.extend(std::iter::repeat_n(slot, list.len()));
        all.extend(list);
    }
    let mut cover = Cover::new(&all, owner, sizes, points.len());
    match cover.search(&own, &mut Vec::new(), false, &counter) {
        Search::Found(found) => {
            let mut witness = vec![Vec::new(); plan.parts.len()];
            for id in found {
                witness[active[cover.owner[id]]] = all[id].indices.iter().map(|&i| points[i].clone()).collect();
            }
            report(ExceptionalVerdict::NotExceptional, None, Some(witness))
        }
        Search::OutOfBudget => report(ExceptionalVerdict::BudgetExceeded, None, None),
        Search::Exhausted => report(ExceptionalVerdict::Exceptional, None, None),
    }
}

/// Parameters of the hyperplane partition of `D(d)` into `s^n` parts for
/// `s^n` points of multiplicity `m`, with exact cutting threshold `mu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictPartitionParams {
    pub n: usize,
    pub d: u32,
    pub m: u32,
    pub s: u32,
    pub mu: BigRational,
}

fn first_cut_hit(d: u32, s: u32, mu: &BigRational) -> Option<(u32, u32)> {
    (1..s).find_map(|c| {
        let v = mu * BigRational::from_integer(BigInt::from(c));
        let hit = v.is_integer() && !v.is_negative() && v.to_integer() <= BigInt::from(d);
        hit.then(|| (c, v.to_integer().to_u32().expect("bounded by d")))
    })
}

impl StrictPartitionParams {
    /// Uses `mu = d/s + δ` with `δ = 1/(2s(d+1))`, nudged by
    /// `1/(4s(d+1)q)` on attempt `q` until no lattice point is cut.
    pub fn new(n: usize, d: u32, m: u32, s: u32) -> Result<Self> {
        Self::check_shape(n, d, m, s)?;
        let scale = BigInt::from(s) * BigInt::from(d + 1);
        let mut mu = BigRational::new(BigInt::from(d), BigInt::from(s)) + BigRational::new(BigInt::one(), &scale * 2);
        for q in 1u32.. {
            if first_cut_hit(d, s, &mu).is_none() {
                break;
            }
            mu += BigRational::new(BigInt::one(), &scale * 4 * q);
        }
        Self::with_mu(n, d, m, s, mu)
    }

    pub fn with_mu(n: usize, d: u32, m: u32, s: u32, mu: BigRational) -> Result<Self> {
        Self::check_shape(n, d, m, s)?;
        let lower = BigRational::new(BigInt::from(d), BigInt::from(s));
        if mu <= lower || mu >= BigRational::from_integer(BigInt::from(m)) {
            return Err(Error::InvalidStrictParams(format!("mu = {mu} must lie strictly between d/s = {lower} and m = {m}")));
        }
        if let Some((c, sum)) = first_cut_hit(d, s, &mu) {
            return Err(Error::LatticePointOnCut { c, sum });
        }
        Ok(StrictPartitionParams { n, d, m, s, mu })
    }

    fn check_shape(n: usize, d: u32, m: u32, s: u32) -> Result<()> {
        if n == 0 || m == 0 || s == 0 {
            return Err(Error::InvalidStrictParams("n, m and s must be positive".into()));
        }
        if d as u64 >= m as u64 * s as u64 {
            return Err(Error::InvalidStrictParams(format!("need d < m*s, got d = {d}, m*s = {}", m as u64 * s as u64)));
        }
        Ok(())
    }

    fn cell(&self, a: &ExponentVector) -> Vec<u64> {
        let (num, den) = (self.mu.numer(), self.mu.denom());
        let mut label = Vec::new();
        for i in 0..self.n {
            let mut sum = 0u64;
            for j in i + 1..=self.n {
                sum += a.get(j) as u64;
                let q = (BigInt::from(sum) * den) / num;
                label.push(q.to_u64().expect("nonnegative"));
            }
        }
        label
    }
}

/// Picks `#part` derivative rows of order `m-1` with nonzero `κ`: the
/// canonical prefix when it works, else a greedy independent selection.
pub fn select_rows(n: usize, m: u32, part: &[ExponentVector]) -> Result<Vec<ExponentVector>> {
    let d = part.first().map_or(0, |a| a.degree() as u32);
    let all = enumerate_simplex(n, (m - 1).min(d));
    if part.len() > all.len() {
        return Err(Error::UnderDetermined { size: part.len(), capacity: all.len(), m });
    }
    let prefix = all[..part.len()].to_vec();
    if !sigma_coefficient(&prefix, part)?.is_zero() {
        return Ok(prefix);
    }
    let mut cols = part.to_vec();
    cols.sort();
    let mut basis = IncrementalRank::new();
    let mut chosen = Vec::new();
    for b in all {
        if chosen.len() == cols.len() {
            break;
        }
        let row: Vec<BigInt> = cols.iter().map(|a| jet_coefficient(a, &b)).collect();
        if basis.push(&row) {
            chosen.push(b);
        }
    }
    if chosen.len() < cols.len() {
        return Err(Error::InvalidCandidate(format!("part of {} points is special for multiplicity {m}", cols.len())));
    }
    Ok(chosen)
}

/// Cuts `D(d)` by the hyperplanes `a_{i+1} + ... + a_j = c·mu` into `s^n`
/// parts, each certified to lie in a scrambled simplex of size `m`.
pub fn strict_partition(params: &StrictPartitionParams) -> Result<PartitionPlan> {
    let StrictPartitionParams { n, d, m, s, .. } = *params;
    let mut cells: BTreeMap<Vec<u64>, Vec<ExponentVector>> = BTreeMap::new();
    for a in enumerate_simplex(n, d) {
        cells.entry(params.cell(&a)).or_default().push(a);
    }
    let expected = (s as usize).pow(n as u32);
    if cells.len() != expected {
        return Err(Error::InvalidStrictParams(format!("cuts produced {} parts, expected {expected}", cells.len())));
    }
    let parts: Vec<Vec<ExponentVector>> = cells.into_values().collect();
    for p in &parts {
        if p.len() > jet_conditions(n, m)
            || scrambled_simplex_nonspecial(n, p, m)? != ScrambledVerdict::CertifiedNonspecial
        {
            return Err(Error::InvalidStrictParams(format!("a part of {} points is not in a scrambled simplex of size {m}", p.len())));
        }
    }
    let rows = parts.iter().map(|p| select_rows(n, m, p)).collect::<Result<Vec<_>>>()?;
    PartitionPlan::new(Triple::full(n, d, vec![m; expected])?, parts, rows)
}

/// One step of a generalized reduction plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStep {
    /// An exceptional partition consuming the next `parts.len()` points.
    Partition {
        parts: Vec<Vec<ExponentVector>>,
        rows: Vec<Vec<ExponentVector>>,
    },
    /// An `(m, ⪯)`-reduction consuming the next point (plane only).
    Reduction { ordering: MonomialOrdering },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedPlan {
    pub triple: Triple,
    pub steps: Vec<PlanStep>,
}

impl From<PartitionPlan> for GeneralizedPlan {
    fn from(p: PartitionPlan) -> Self {
        GeneralizedPlan {
            triple: p.triple,
            steps: vec![PlanStep::Partition { parts: p.parts, rows: p.rows }],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStepReport {
    /// 1-based indices of the points consumed.
    pub points: Vec<usize>,
    pub removed: Vec<ExponentVector>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceptionality: Option<ExceptionalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<MpReduction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub bound: usize,
    pub edim: usize,
    pub status: Status,
    pub steps: Vec<PlanStepReport>,
    #[serde(rename = "final")]
    pub final_set: Vec<ExponentVector>,
}

/// Runs the steps in order, each on the points the previous steps left,
/// consuming the multiplicities of `t` front to back.
pub fn run_generalized_plan(t: &Triple, steps: &[PlanStep], budget: u64) -> Result<PlanReport> {
    let mut current = t.points().to_vec();
    let mut next = 0;
    let mut reports = Vec::with_capacity(steps.len());
    for step in steps {
        let report = match step {
            PlanStep::Partition { parts, rows } => {
                let group = next..next + parts.len();
                if group.end > t.r() {
                    return Err(Error::MalformedPlan(format!("steps consume more than the {} points", t.r())));
                }
                let sub = Triple::new(t.n(), t.d(), current.clone(), t.multiplicities()[group.clone()].to_vec())?;
                let plan = PartitionPlan::new(sub, parts.clone(), rows.clone())?;
                let check = verify_exceptional(&plan, budget);
                let removed: Vec<ExponentVector> = plan.parts.iter().flatten().cloned().collect();
                next = group.end;
                PlanStepReport {
                    points: group.map(|i| i + 1).collect(),
                    removed,
                    verified: check.verdict == ExceptionalVerdict::Exceptional,
                    exceptionality: Some(check),
                    reduction: None,
                }
            }
            PlanStep::Reduction { ordering } => {
                if next >= t.r() {
                    return Err(Error::MalformedPlan(format!("steps consume more than the {} points", t.r())));
                }
                let red = mp_reduction(&current, t.multiplicities()[next], ordering)?;
                next += 1;
                PlanStepReport {
                    points: vec![next],
                    removed: red.removed.clone(),
                    verified: true,
                    exceptionality: None,
                    reduction: Some(red),
                }
            }
        };
        let removed: BTreeSet<&ExponentVector> = report.removed.iter().collect();
        current.retain(|a| !removed.contains(a));
        reports.push(report);
    }
    if next != t.r() {
        return Err(Error::MalformedPlan(format!("steps consume {next} of the {} points", t.r())));
    }
    let bound = current.len();
    let edim = t.edim();
    let all_verified = reports.iter().all(|r| r.verified);
    Ok(PlanReport {
        bound,
        edim,
        status: if bound == edim && all_verified { Status::Nonspecial } else { Status::Undecided },
        steps: reports,
        final_set: current,
    })
}
