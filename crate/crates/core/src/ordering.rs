//! Monomial orderings restricted to a fixed-degree slice, the induced
//! lexicographic ordering on equal-size subsets, and in-order subset
//! enumeration.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::simplex::ExponentVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Lex,
    Rlex,
}

/// One of the `lex`/`rlex` orderings, parameterised by a permutation
/// `(i_0, ..., i_n)` of the variables.
///
/// Both families scan coordinates in the order `i_0, i_1, ...` and decide at
/// the first coordinate where the points differ:
///
/// * `lex`: the point with the *larger* exponent is smaller (graded reverse
///   lex with `X_{i_0}` the smallest variable);
/// * `rlex`: the point with the *smaller* exponent is smaller (pure lex with
///   `X_{i_0}` the most significant variable).
///
/// Either way the rows `{a : a_{i_0} = k}` are ordered as blocks: under `lex`
/// rows with larger `k` come first, under `rlex` rows with smaller `k` do.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrdering {
    family: Family,
    perm: Vec<usize>,
}

impl MonomialOrdering {
    pub fn new(family: Family, perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::ParseOrdering(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if perm.is_empty() {
            return Err(Error::ParseOrdering("empty permutation".into()));
        }
        Ok(MonomialOrdering { family, perm })
    }

    pub fn lex(perm: &[usize]) -> Self {
        Self::new(Family::Lex, perm.to_vec()).expect("invalid permutation")
    }

    pub fn rlex(perm: &[usize]) -> Self {
        Self::new(Family::Rlex, perm.to_vec()).expect("invalid permutation")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Number of variables `n + 1` the ordering acts on.
    pub fn arity(&self) -> usize {
        self.perm.len()
    }

    /// The coordinate whose level sets are the rows of this ordering.
    pub fn row_axis(&self) -> usize {
        self.perm[0]
    }

    /// Compares two points of equal length without validation.
    #[inline]
    pub fn cmp_points(&self, a: &ExponentVector, b: &ExponentVector) -> Ordering {
        let (a, b) = (a.entries(), b.entries());
        for &i in &self.perm {
            if a[i] != b[i] {
                return match self.family {
                    Family::Lex => b[i].cmp(&a[i]),
                    Family::Rlex => a[i].cmp(&b[i]),
                };
            }
        }
        Ordering::Equal
    }

    pub fn sort(&self, points: &mut [ExponentVector]) {
        points.sort_by(|a, b| self.cmp_points(a, b));
    }

    pub fn sorted(&self, points: &[ExponentVector]) -> Vec<ExponentVector> {
        let mut v = points.to_vec();
        self.sort(&mut v);
        v
    }
}

/// All `2 * (n+1)!` orderings on `n + 1` variables.
pub fn all_orderings(n: usize) -> Vec<MonomialOrdering> {
    let mut perms = Vec::new();
    permutations(&mut (0..=n).collect::<Vec<_>>(), 0, &mut perms);
    perms.sort();
    let mut out = Vec::with_capacity(2 * perms.len());
    for family in [Family::Lex, Family::Rlex] {
        for p in &perms {
            out.push(MonomialOrdering {
                family,
                perm: p.clone(),
            });
        }
    }
    out
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

pub fn compare_points(
    ord: &MonomialOrdering,
    a: &ExponentVector,
    b: &ExponentVector,
) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    if a.len() != ord.arity() {
        return Err(Error::OrderingArity {
            ordering: ord.arity(),
            points: a.len(),
        });
    }
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch(a.degree(), b.degree()));
    }
    Ok(ord.cmp_points(a, b))
}

/// The `ord`-lexicographic comparison of two sets of equal size: sort both
/// ascending and compare elementwise.
pub fn compare_subsets(
    ord: &MonomialOrdering,
    e: &[ExponentVector],
    f: &[ExponentVector],
) -> Result<Ordering> {
    if e.len() != f.len() {
        return Err(Error::SizeMismatch(e.len(), f.len()));
    }
    let (se, sf) = (ord.sorted(e), ord.sorted(f));
    for (a, b) in se.iter().zip(&sf) {
        match compare_points(ord, a, b)? {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    Ok(Ordering::Equal)
}

/// Lazily yields every `c`-subset of `points` in strictly increasing
/// `ord`-lexicographic order. Each subset comes out sorted ascending.
pub fn enumerate_subsets_in_order(
    points: &[ExponentVector],
    c: usize,
    ord: &MonomialOrdering,
) -> SubsetsInOrder {
    let mut sorted = ord.sorted(points);
    sorted.dedup();
    let idx = if c <= sorted.len() {
        Some((0..c).collect())
    } else {
        None
    };
    SubsetsInOrder { sorted, idx }
}

pub struct SubsetsInOrder {
    sorted: Vec<ExponentVector>,
    idx: Option<Vec<usize>>,
}

impl Iterator for SubsetsInOrder {
    type Item = Vec<ExponentVector>;

    fn next(&mut self) -> Option<Self::Item> {
        let idx = self.idx.as_mut()?;
        let item = idx.iter().map(|&i| self.sorted[i].clone()).collect();
        // advance to the next combination in lexicographic index order
        let n = self.sorted.len();
        let c = idx.len();
        let mut k = c;
        loop {
            if k == 0 {
                self.idx = None;
                break;
            }
            k -= 1;
            if idx[k] < n - c + k {
                idx[k] += 1;
                for j in k + 1..c {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(item)
    }
}

impl fmt::Display for MonomialOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Lex => "lex",
            Family::Rlex => "rlex",
        };
        write!(f, "{name}(")?;
        for (i, p) in self.perm.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for MonomialOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::ParseOrdering(s.to_string());
        let s = s.trim();
        let open = s.find('(').ok_or_else(err)?;
        if !s.ends_with(')') {
            return Err(err());
        }
        let family = match s[..open].trim() {
            "lex" => Family::Lex,
            "rlex" => Family::Rlex,
            _ => return Err(err()),
        };
        let perm = s[open + 1..s.len() - 1]
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| err()))
            .collect::<Result<Vec<_>>>()?;
        MonomialOrdering::new(family, perm).map_err(|_| err())
    }
}

/// Parses a comma-separated list such as `"lex(1,2,0),rlex(0,1,2)"`.
pub fn parse_ordering_list(s: &str) -> Result<Vec<MonomialOrdering>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(s[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(s[start..].parse()?);
    }
    Ok(out)
}

impl Serialize for MonomialOrdering {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonomialOrdering {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{enumerate_simplex, rows};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    #[test]
    fn point_examples() {
        let (a, b) = (ev(&[2, 0, 0]), ev(&[0, 2, 0]));
        let lex = MonomialOrdering::lex(&[0, 1, 2]);
        let rlex = MonomialOrdering::rlex(&[0, 1, 2]);
        assert_eq!(compare_points(&lex, &a, &b).unwrap(), Ordering::Less);
        assert_eq!(compare_points(&rlex, &a, &b).unwrap(), Ordering::Greater);
        for ord in all_orderings(2) {
            assert_eq!(compare_points(&ord, &a, &a).unwrap(), Ordering::Equal);
        }
        assert!(compare_points(&lex, &a, &ev(&[1, 0, 0])).is_err());
        assert!(compare_points(&lex, &a, &ev(&[2, 0])).is_err());
    }

    #[test]
    fn subset_examples() {
        let lex = MonomialOrdering::lex(&[0, 1, 2]);
        let e = [ev(&[2, 0, 0]), ev(&[0, 0, 2])];
        let f = [ev(&[1, 1, 0]), ev(&[1, 0, 1])];
        assert_eq!(compare_subsets(&lex, &e, &f).unwrap(), Ordering::Less);
        assert_eq!(compare_subsets(&lex, &e, &e).unwrap(), Ordering::Equal);
        assert!(compare_subsets(&lex, &e, &f[..1]).is_err());
        // singleton case reduces to points
        let d = lex.sorted(&enumerate_simplex(2, 3));
        for other in &d[1..] {
            assert_eq!(
                compare_subsets(&lex, &[d[0].clone()], std::slice::from_ref(other)).unwrap(),
                Ordering::Less
            );
        }
    }

    #[test]
    fn subset_enumeration_examples() {
        let lex = MonomialOrdering::lex(&[0, 1, 2]);
        let d1 = enumerate_simplex(2, 1);
        assert_eq!(
            enumerate_subsets_in_order(&d1, 0, &lex).collect::<Vec<_>>(),
            vec![Vec::<ExponentVector>::new()]
        );
        let all: Vec<_> = enumerate_subsets_in_order(&d1, 3, &lex).collect();
        assert_eq!(all.len(), 1);
        let pairs: Vec<_> = enumerate_subsets_in_order(&d1, 2, &lex).collect();
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs[0], vec![ev(&[1, 0, 0]), ev(&[0, 1, 0])]);
        assert_eq!(enumerate_subsets_in_order(&d1, 4, &lex).count(), 0);
    }

    #[test]
    fn twelve_plane_orderings() {
        let ords = all_orderings(2);
        assert_eq!(ords.len(), 12);
        let d = enumerate_simplex(2, 3);
        let distinct: HashSet<Vec<ExponentVector>> = ords.iter().map(|o| o.sorted(&d)).collect();
        assert_eq!(distinct.len(), 12);
    }

    #[test]
    fn parse_round_trip() {
        for ord in all_orderings(3) {
            assert_eq!(ord.to_string().parse::<MonomialOrdering>().unwrap(), ord);
        }
        let list = parse_ordering_list("lex(1,2,0), rlex(0,1,2)").unwrap();
        assert_eq!(list, vec![MonomialOrdering::lex(&[1, 2, 0]), MonomialOrdering::rlex(&[0, 1, 2])]);
        assert!("lex(0,0,1)".parse::<MonomialOrdering>().is_err());
        assert!("grevlex(0,1,2)".parse::<MonomialOrdering>().is_err());
        assert!("lex 0,1,2".parse::<MonomialOrdering>().is_err());
    }

    #[test]
    fn row_property_holds_for_every_ordering() {
        for n in 1..=3 {
            let d = enumerate_simplex(n, 5);
            for ord in all_orderings(n) {
                let fam = rows(&d, ord.row_axis());
                for (k, rk) in &fam.levels {
                    for (l, rl) in &fam.levels {
                        if k == l {
                            continue;
                        }
                        // lex: R(k) > R(l) iff k < l; rlex: iff k > l
                        let k_greater = match ord.family() {
                            Family::Lex => k < l,
                            Family::Rlex => k > l,
                        };
                        for a in rk {
                            for b in rl {
                                let want = if k_greater { Ordering::Greater } else { Ordering::Less };
                                assert_eq!(ord.cmp_points(a, b), want, "{ord} {a} {b}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_complete() {
        let d = enumerate_simplex(2, 3);
        for ord in all_orderings(2) {
            for c in 0..=4 {
                let subs: Vec<_> = enumerate_subsets_in_order(&d, c, &ord).collect();
                assert_eq!(subs.len(), crate::simplex::binomial(d.len() as u64, c as u64));
                for w in subs.windows(2) {
                    assert_eq!(compare_subsets(&ord, &w[0], &w[1]).unwrap(), Ordering::Less);
                }
            }
        }
    }

    fn point_of_degree(n: usize, d: u32) -> impl Strategy<Value = ExponentVector> {
        proptest::collection::vec(0u32..=d, n).prop_map(move |cuts| {
            let mut cuts = cuts;
            cuts.sort();
            let mut out = Vec::with_capacity(n + 1);
            let mut prev = 0;
            for c in cuts {
                out.push(c - prev);
                prev = c;
            }
            out.push(d - prev);
            ExponentVector::new(out)
        })
    }

    fn ordering_for(n: usize) -> impl Strategy<Value = MonomialOrdering> {
        let ords = all_orderings(n);
        (0..ords.len()).prop_map(move |i| ords[i].clone())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn multiplicative(
            (n, ord, a, b, c) in (1usize..=3).prop_flat_map(|n| (0u32..=8, 0u32..=8).prop_flat_map(move |(d, e)| (
                Just(n), ordering_for(n), point_of_degree(n, d), point_of_degree(n, d), point_of_degree(n, e),
            )))
        ) {
            let _ = n;
            let lhs = ord.cmp_points(&a, &b);
            prop_assert_eq!(ord.cmp_points(&a.add(&c), &b.add(&c)), lhs);
        }

        #[test]
        fn strict_total_order(
            (ord, a, b, c) in (1usize..=3).prop_flat_map(|n| (0u32..=8).prop_flat_map(move |d| (
                ordering_for(n), point_of_degree(n, d), point_of_degree(n, d), point_of_degree(n, d),
            )))
        ) {
            prop_assert_eq!(ord.cmp_points(&a, &b), ord.cmp_points(&b, &a).reverse());
            prop_assert_eq!(ord.cmp_points(&a, &b) == Ordering::Equal, a == b);
            if ord.cmp_points(&a, &b) == Ordering::Less && ord.cmp_points(&b, &c) == Ordering::Less {
                prop_assert_eq!(ord.cmp_points(&a, &c), Ordering::Less);
            }
        }
    }
}
