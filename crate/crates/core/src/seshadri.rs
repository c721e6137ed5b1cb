//! Certifying lower bounds on multi-point Seshadri constants of the plane by
//! showing candidate triples `(2, d, m)` non-special with [`algorithm1`].

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordering::{all_orderings, MonomialOrdering};
use crate::reductions::{algorithm1, Status};
use crate::simplex::{Determinacy, Triple};

/// An exact rational serialized as `[numerator, denominator]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction(pub i128, pub i128);

impl Fraction {
    fn ratio(self) -> Ratio<i128> {
        Ratio::new(self.0, self.1)
    }

    pub fn approx(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

impl From<Ratio<i128>> for Fraction {
    fn from(r: Ratio<i128>) -> Self {
        Fraction(*r.numer(), *r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeshadriCandidate {
    pub d: u32,
    pub m: Vec<u32>,
    /// Ordering tuples tried before any random ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orderings: Vec<Vec<MonomialOrdering>>,
}

impl SeshadriCandidate {
    /// The homogeneous candidate `(d, m^{×r})`.
    pub fn homogeneous(d: u32, m: u32, r: usize) -> Self {
        SeshadriCandidate { d, m: vec![m; r], orderings: Vec::new() }
    }

    /// `d / (m_1 + ... + m_r)`.
    pub fn ratio(&self) -> Fraction {
        let total: i128 = self.m.iter().map(|&x| x as i128).sum();
        Ratio::new(self.d as i128, total).into()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateOutcome {
    pub d: u32,
    pub m: Vec<u32>,
    pub status: Status,
    /// The tuple that certified the candidate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orderings: Option<Vec<MonomialOrdering>>,
    pub tuples_tried: usize,
    /// Smallest `#D_0` reached.
    pub best_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeshadriReport {
    pub r: usize,
    pub certified: Vec<CandidateOutcome>,
    /// Smallest `d / Σm` over the candidates, claimed only when all are certified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_bound: Option<Fraction>,
    /// `f = 1 / (1 - r e^2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_value: Option<Fraction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_approx: Option<String>,
}

/// `f` with `e = sqrt((1 - 1/f) / r)`, defined when `r e^2 < 1`.
pub fn f_value(r: usize, e: Fraction) -> Option<Fraction> {
    let e = e.ratio();
    let gap = Ratio::one() - Ratio::from_integer(r as i128) * e * e;
    (gap > Ratio::zero()).then(|| gap.recip().into())
}

fn check_candidate(r: usize, c: &SeshadriCandidate) -> Result<()> {
    if c.m.len() != r {
        return Err(Error::InvalidCandidate(format!("({}, {:?}) has {} points, expected {r}", c.d, c.m, c.m.len())));
    }
    let t = Triple::full(2, c.d, c.m.clone())?;
    if t.determinacy() == Determinacy::Under {
        return Err(Error::InvalidCandidate(format!("({}, {:?}) is under-determined", c.d, c.m)));
    }
    for tuple in &c.orderings {
        if tuple.len() != r || tuple.iter().any(|o| o.arity() != 3) {
            return Err(Error::InvalidCandidate(format!("pinned tuple {tuple:?} does not fit {r} plane points")));
        }
    }
    Ok(())
}

fn certify(c: &SeshadriCandidate, budget: usize, seed: u64) -> Result<CandidateOutcome> {
    let ords = all_orderings(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = (0..budget).map(|_| (0..c.m.len()).map(|_| ords.choose(&mut rng).expect("12 orderings").clone()).collect());
    let tuples: Vec<Vec<MonomialOrdering>> = c.orderings.iter().cloned().chain(random).collect();
    let mut outcome = CandidateOutcome {
        d: c.d,
        m: c.m.clone(),
        status: Status::Undecided,
        orderings: None,
        tuples_tried: 0,
        best_bound: Triple::full(2, c.d, c.m.clone())?.points().len(),
    };
    for tuple in tuples {
        outcome.tuples_tried += 1;
        let res = algorithm1(c.d, &c.m, &tuple)?;
        outcome.best_bound = outcome.best_bound.min(res.bound);
        if res.status == Status::Nonspecial {
            outcome.status = Status::Nonspecial;
            outcome.orderings = Some(tuple);
            break;
        }
    }
    Ok(outcome)
}

/// Runs [`algorithm1`] on each candidate with its pinned ordering tuples and
/// then `budget` random ones, stopping at the first non-special verdict.
/// A bound is claimed only when every candidate is certified.
pub fn seshadri_verify(r: usize, candidates: &[SeshadriCandidate], budget: usize, seed: u64) -> Result<SeshadriReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidCandidate("no candidates given".into()));
    }
    for c in candidates {
        check_candidate(r, c)?;
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = candidates.iter().map(|_| master.gen()).collect();
    let certified = candidates
        .par_iter()
        .zip(seeds)
        .map(|(c, s)| certify(c, budget, s))
        .collect::<Result<Vec<_>>>()?;
    let all = certified.iter().all(|o| o.status == Status::Nonspecial);
    let claimed_bound = all
        .then(|| candidates.iter().map(SeshadriCandidate::ratio).min_by_key(|f| f.ratio()))
        .flatten();
    let f = claimed_bound.and_then(|e| f_value(r, e));
    Ok(SeshadriReport {
        r,
        certified,
        claimed_bound,
        f_value: f,
        f_approx: f.map(|f| format!("{:.2}", f.approx())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_values() {
        assert_eq!(f_value(12, Fraction(83, 288)), Some(Fraction(6912, 23)));
        assert_eq!(f_value(12, Fraction(277, 960)).map(|f| format!("{:.2}", f.approx())), Some("1081.69".into()));
        assert_eq!(f_value(10, Fraction(117, 370)).map(|f| format!("{:.0}", f.approx())), Some("13690".into()));
        assert_eq!(f_value(9, Fraction(1, 3)), None);
    }

    #[test]
    fn f_inverts() {
        for (r, num, den) in [(12, 83, 288), (11, 169, 561), (13, 191, 689), (50, 601, 4250)] {
            let e = Fraction(num, den);
            let f = f_value(r, e).unwrap().ratio();
            let back = (Ratio::one() - f.recip()) / Ratio::from_integer(r as i128);
            assert_eq!(back, e.ratio() * e.ratio());
        }
    }

    #[test]
    fn empty_budget_claims_nothing() {
        let c = SeshadriCandidate::homogeneous(7, 2, 12);
        let rep = seshadri_verify(12, &[c], 0, 1).unwrap();
        assert_eq!(rep.certified[0].status, Status::Undecided);
        assert_eq!(rep.certified[0].tuples_tried, 0);
        assert!(rep.claimed_bound.is_none() && rep.f_value.is_none());
    }

    #[test]
    fn small_candidate_certifies() {
        let c = SeshadriCandidate::homogeneous(7, 3, 6);
        let rep = seshadri_verify(6, &[c], 50, 3).unwrap();
        assert_eq!(rep.certified[0].status, Status::Nonspecial);
        assert_eq!(rep.claimed_bound, Some(Fraction(7, 18)));
        // 6 e^2 = 294/324 < 1
        assert_eq!(rep.f_value, Some(Fraction(54, 5)));
    }

    #[test]
    fn rejects_bad_candidates() {
        assert!(seshadri_verify(12, &[], 5, 0).is_err());
        assert!(seshadri_verify(12, &[SeshadriCandidate::homogeneous(83, 24, 11)], 5, 0).is_err());
        assert!(matches!(
            seshadri_verify(2, &[SeshadriCandidate::homogeneous(5, 1, 2)], 5, 0),
            Err(Error::InvalidCandidate(_))
        ));
    }

    #[test]
    fn report_round_trip() {
        let rep = seshadri_verify(6, &[SeshadriCandidate::homogeneous(7, 3, 6)], 20, 9).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert_eq!(serde_json::from_str::<SeshadriReport>(&json).unwrap(), rep);
        assert_eq!(serde_json::to_string(&seshadri_verify(6, &[SeshadriCandidate::homogeneous(7, 3, 6)], 20, 9).unwrap()).unwrap(), json);
    }
}
