//! Candidate rosters, partial-ranking ballots, profiles and complete rankings.
//!
//! A [`Candidate`] is an index into the roster the profile was read with.
//! Condensing a profile keeps that roster and only shrinks the set of active
//! candidates, so candidate identity and the canonical (ballot-paper) order
//! used for tie-breaking survive any number of removals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A candidate, identified by its position in the roster's canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Candidate(u32);

impl Candidate {
    pub fn new(index: usize) -> Self {
        Candidate(u32::try_from(index).expect("candidate index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0 + 1)
    }
}

/// The ordered list of candidate names. List order is the canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRoster {
    names: Vec<String>,
    lookup: HashMap<String, Candidate>,
}

impl CandidateRoster {
    pub fn new<I, T>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidRoster("no candidates".into()));
        }
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::InvalidRoster(format!("candidate {} has an empty name", i + 1)));
            }
            if name.contains([',', '>', '\n', '\r']) || name.trim() != name {
                return Err(Error::InvalidRoster(format!(
                    "candidate name `{name}` contains a reserved character or padding"
                )));
            }
            if lookup.insert(name.clone(), Candidate::new(i)).is_some() {
                return Err(Error::InvalidRoster(format!("duplicate candidate `{name}`")));
            }
        }
        Ok(CandidateRoster { names, lookup })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, c: Candidate) -> &str {
        &self.names[c.index()]
    }

    pub fn get(&self, name: &str) -> Option<Candidate> {
        self.lookup.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<Candidate> {
        self.get(name).ok_or_else(|| Error::UnknownCandidate(name.to_string()))
    }

    pub fn candidates(&self) -> impl Iterator<Item = Candidate> + '_ {
        (0..self.names.len()).map(Candidate::new)
    }
}

/// One ballot (or a group of identical ballots): a strict ranking of some
/// candidates. Unlisted candidates are tied below every listed one.
#[derive(Clone, Debug, PartialEq)]
pub struct Ballot<S> {
    ranking: Vec<Candidate>,
    weight: S,
}

impl<S: Scalar> Ballot<S> {
    pub fn new(ranking: Vec<Candidate>, weight: S) -> Result<Self> {
        if weight < S::zero() {
            return Err(Error::InvalidWeight(format!("negative ballot weight {weight}")));
        }
        for (i, c) in ranking.iter().enumerate() {
            if ranking[..i].contains(c) {
                return Err(Error::DuplicateInBallot {
                    candidate: c.to_string(),
                });
            }
        }
        Ok(Ballot { ranking, weight })
    }

    /// A single voter's ballot.
    pub fn single(ranking: Vec<Candidate>) -> Result<Self> {
        Ballot::new(ranking, S::one())
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.ranking
    }

    pub fn weight(&self) -> &S {
        &self.weight
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn position(&self, c: Candidate) -> Option<usize> {
        self.ranking.iter().position(|&x| x == c)
    }

    pub fn condensed(&self, c: Candidate) -> Ballot<S> {
        Ballot {
            ranking: self.ranking.iter().copied().filter(|&x| x != c).collect(),
            weight: self.weight.clone(),
        }
    }

    pub(crate) fn with_weight(&self, weight: S) -> Ballot<S> {
        Ballot {
            ranking: self.ranking.clone(),
            weight,
        }
    }
}

/// A multiset of ballots over the active candidates of a roster.
#[derive(Clone, Debug)]
pub struct Profile<S> {
    roster: Arc<CandidateRoster>,
    candidates: Vec<Candidate>,
    ballots: Vec<Ballot<S>>,
    total: S,
}

impl<S: Scalar> Profile<S> {
    /// A profile over every candidate of `roster`.
    pub fn new(roster: Arc<CandidateRoster>, ballots: Vec<Ballot<S>>) -> Result<Self> {
        let candidates = roster.candidates().collect();
        Profile::with_candidates(roster, candidates, ballots)
    }

    /// A profile over a subset of the roster. `candidates` may be given in
    /// any order; it is stored in canonical order.
    pub fn with_candidates(
        roster: Arc<CandidateRoster>,
        mut candidates: Vec<Candidate>,
        ballots: Vec<Ballot<S>>,
    ) -> Result<Self> {
        candidates.sort_unstable();
        candidates.dedup();
        if candidates.is_empty() {
            return Err(Error::InvalidRoster("no active candidates".into()));
        }
        if candidates.iter().any(|c| c.index() >= roster.len()) {
            return Err(Error::InvalidRoster("candidate outside the roster".into()));
        }
        for ballot in &ballots {
            for c in ballot.ranking() {
                if candidates.binary_search(c).is_err() {
                    return Err(Error::UnknownCandidate(
                        roster.names.get(c.index()).cloned().unwrap_or_else(|| c.to_string()),
                    ));
                }
            }
        }
        let total = crate::scalar::sum(ballots.iter().map(|b| b.weight.clone()));
        if total <= S::zero() {
            return Err(Error::EmptyProfile);
        }
        Ok(Profile {
            roster,
            candidates,
            ballots,
            total,
        })
    }

    /// Builds a profile from candidate names and `(weight, ranking)` pairs.
    pub fn from_names(names: &[&str], ballots: &[(u64, &[&str])]) -> Result<Self> {
        let roster = Arc::new(CandidateRoster::new(names.iter().copied())?);
        let ballots = ballots
            .iter()
            .map(|(w, ranking)| {
                let ranking = ranking
                    .iter()
                    .map(|name| roster.require(name))
                    .collect::<Result<Vec<_>>>()?;
                Ballot::new(ranking, S::from_u64(*w))
            })
            .collect::<Result<Vec<_>>>()?;
        Profile::new(roster, ballots)
    }

    pub fn roster(&self) -> &Arc<CandidateRoster> {
        &self.roster
    }

    /// Active candidates in canonical order.
    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[Ballot<S>] {
        &self.ballots
    }

    /// Total voter weight.
    pub fn n(&self) -> &S {
        &self.total
    }

    /// Number of active candidates.
    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn contains(&self, c: Candidate) -> bool {
        self.candidates.binary_search(&c).is_ok()
    }

    pub fn name(&self, c: Candidate) -> &str {
        self.roster.name(c)
    }

    /// Position of `c` in the canonical order of the active candidates.
    pub fn local_index(&self, c: Candidate) -> Option<usize> {
        self.candidates.binary_search(&c).ok()
    }

    /// The profile with `c` disqualified: `c` is deleted from every ballot,
    /// ballots that become empty are kept, and n is unchanged.
    pub fn condense(&self, c: Candidate) -> Result<Profile<S>> {
        if !self.contains(c) {
            return Err(Error::UnknownCandidate(self.describe(c)));
        }
        if self.m() < 2 {
            return Err(Error::InvalidArgument(
                "cannot remove the only remaining candidate".into(),
            ));
        }
        Ok(Profile {
            roster: Arc::clone(&self.roster),
            candidates: self.candidates.iter().copied().filter(|&x| x != c).collect(),
            ballots: self.ballots.iter().map(|b| b.condensed(c)).collect(),
            total: self.total.clone(),
        })
    }

    /// Merges identical ballots and sorts them by ranking.
    pub fn compressed(&self) -> Profile<S> {
        let mut groups: BTreeMap<Vec<Candidate>, S> = BTreeMap::new();
        for b in &self.ballots {
            let entry = groups.entry(b.ranking.clone()).or_insert_with(S::zero);
            *entry = entry.clone() + b.weight.clone();
        }
        Profile {
            roster: Arc::clone(&self.roster),
            candidates: self.candidates.clone(),
            ballots: groups
                .into_iter()
                .map(|(ranking, weight)| Ballot { ranking, weight })
                .collect(),
            total: self.total.clone(),
        }
    }

    /// Ballot-multiset equality, comparing candidates by name so profiles read
    /// from different files can be compared.
    pub fn same_ballots(&self, other: &Profile<S>) -> bool {
        let names = |p: &Profile<S>| -> Vec<String> { p.candidates.iter().map(|&c| p.name(c).to_string()).collect() };
        let keyed = |p: &Profile<S>| -> Vec<(Vec<String>, S)> {
            let mut groups: BTreeMap<Vec<String>, S> = BTreeMap::new();
            for b in &p.ballots {
                let key = b.ranking.iter().map(|&c| p.name(c).to_string()).collect();
                let entry = groups.entry(key).or_insert_with(S::zero);
                *entry = entry.clone() + b.weight.clone();
            }
            groups.into_iter().filter(|(_, w)| !w.is_zero()).collect()
        };
        names(self) == names(other) && self.total == other.total && keyed(self) == keyed(other)
    }

    /// Replaces the ballot weights, keeping rankings. Zero weights are dropped.
    pub(crate) fn reweighted(&self, weights: Vec<S>) -> Result<Profile<S>> {
        let ballots = self
            .ballots
            .iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(b, w)| b.with_weight(w))
            .collect();
        Profile::with_candidates(Arc::clone(&self.roster), self.candidates.clone(), ballots)
    }

    fn describe(&self, c: Candidate) -> String {
        self.roster
            .names
            .get(c.index())
            .cloned()
            .unwrap_or_else(|| c.to_string())
    }
}

/// A complete, tie-free ranking of a candidate set, best first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ranking(Vec<Candidate>);

impl Ranking {
    pub fn new(order: Vec<Candidate>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("ranking lists a candidate twice".into()));
        }
        Ok(Ranking(order))
    }

    pub(crate) fn from_order_unchecked(order: Vec<Candidate>) -> Self {
        Ranking(order)
    }

    /// Parses a ranking of candidate names.
    pub fn from_names(roster: &CandidateRoster, names: &[&str]) -> Result<Self> {
        Ranking::new(names.iter().map(|n| roster.require(n)).collect::<Result<Vec<_>>>()?)
    }

    pub fn order(&self) -> &[Candidate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: Candidate) -> bool {
        self.0.contains(&c)
    }

    pub fn position(&self, c: Candidate) -> Option<usize> {
        self.0.iter().position(|&x| x == c)
    }

    /// True when `a` is ranked above `b`.
    pub fn prefers(&self, a: Candidate, b: Candidate) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(pa), Some(pb)) => pa < pb,
            _ => false,
        }
    }

    /// The ranking with `c` removed, order otherwise preserved.
    pub fn condense(&self, c: Candidate) -> Result<Ranking> {
        if !self.contains(c) {
            return Err(Error::UnknownCandidate(c.to_string()));
        }
        Ok(Ranking(self.0.iter().copied().filter(|&x| x != c).collect()))
    }

    pub fn reversed(&self) -> Ranking {
        Ranking(self.0.iter().rev().copied().collect())
    }

    /// True when this ranks exactly the active candidates of `profile`.
    pub fn is_complete_for<S: Scalar>(&self, profile: &Profile<S>) -> bool {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        sorted == profile.candidates()
    }

    /// Position lookup table indexed by roster index.
    pub(crate) fn position_table(&self, roster_len: usize) -> Vec<usize> {
        let mut table = vec![usize::MAX; roster_len];
        for (i, c) in self.0.iter().enumerate() {
            table[c.index()] = i;
        }
        table
    }

    pub fn names<'a>(&self, roster: &'a CandidateRoster) -> Vec<&'a str> {
        self.0.iter().map(|&c| roster.name(c)).collect()
    }

    /// One-based roster positions, e.g. `(3,5,1,2,4)`.
    pub fn numbered(&self) -> Vec<usize> {
        self.0.iter().map(|c| c.index() + 1).collect()
    }
}

/// Free-function form of [`Profile::condense`].
pub fn condense_profile<S: Scalar>(profile: &Profile<S>, c: Candidate) -> Result<Profile<S>> {
    profile.condense(c)
}

/// Free-function form of [`Ranking::condense`].
pub fn condense_ranking(ranking: &Ranking, c: Candidate) -> Result<Ranking> {
    ranking.condense(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn abc() -> Profile<Rational> {
        Profile::from_names(&["A", "B", "C"], &[(1, &["A", "B", "C"])]).unwrap()
    }

    #[test]
    fn condensing_preserves_relative_order() {
        let p = abc();
        let b = p.roster().require("B").unwrap();
        let q = p.condense(b).unwrap();
        assert_eq!(q.m(), 2);
        assert_eq!(
            q.ballots()[0].ranking(),
            Ranking::from_names(p.roster(), &["A", "C"]).unwrap().order()
        );
        assert_eq!(q.n(), p.n());
    }

    #[test]
    fn condensing_keeps_emptied_ballots() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C"], &[(2, &["B"]), (1, &["A"])]).unwrap();
        let b = p.roster().require("B").unwrap();
        let q = p.condense(b).unwrap();
        assert_eq!(q.ballots().len(), 2);
        assert!(q.ballots()[0].is_empty());
        assert_eq!(q.ballots()[0].weight(), &Rational::from_integer(2.into()));
        assert_eq!(q.n(), p.n());
    }

    #[test]
    fn condensing_rejects_unknown_or_last_candidate() {
        let p = abc();
        let b = p.roster().require("B").unwrap();
        let q = p.condense(b).unwrap();
        assert!(matches!(q.condense(b), Err(Error::UnknownCandidate(_))));
        let a = p.roster().require("A").unwrap();
        let c = p.roster().require("C").unwrap();
        let last = q.condense(a).unwrap();
        assert!(matches!(last.condense(c), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ranking_condense_examples() {
        let roster = CandidateRoster::new(["1", "2", "3", "4", "5"]).unwrap();
        let r = Ranking::from_names(&roster, &["3", "5", "1", "2", "4"]).unwrap();
        let four = roster.require("4").unwrap();
        assert_eq!(r.condense(four).unwrap().numbered(), vec![3, 5, 1, 2]);

        let roster = CandidateRoster::new(["A", "B", "C"]).unwrap();
        let ab = Ranking::from_names(&roster, &["A", "B"]).unwrap();
        let a = roster.require("A").unwrap();
        assert_eq!(ab.condense(a).unwrap().names(&roster), vec!["B"]);
        let abc = Ranking::from_names(&roster, &["A", "B", "C"]).unwrap();
        let b = roster.require("B").unwrap();
        assert_eq!(abc.condense(b).unwrap().names(&roster), vec!["A", "C"]);
        assert!(ab.condense(roster.require("C").unwrap()).is_err());
    }

    #[test]
    fn ballot_validation() {
        let a = Candidate::new(0);
        assert!(matches!(
            Ballot::<Rational>::single(vec![a, a]),
            Err(Error::DuplicateInBallot { .. })
        ));
        assert!(Ballot::new(vec![a], -1.0f64).is_err());
        assert!(Ballot::new(vec![], 0.0f64).is_ok());
    }

    #[test]
    fn roster_validation() {
        assert!(CandidateRoster::new(Vec::<String>::new()).is_err());
        assert!(CandidateRoster::new(["A", "A"]).is_err());
        assert!(CandidateRoster::new(["A", ""]).is_err());
        assert!(CandidateRoster::new(["A>B"]).is_err());
        assert!(CandidateRoster::new(["A,B"]).is_err());
    }

    #[test]
    fn profile_requires_positive_total_and_known_candidates() {
        let roster = Arc::new(CandidateRoster::new(["A", "B"]).unwrap());
        let empty: Result<Profile<f64>> = Profile::new(Arc::clone(&roster), vec![]);
        assert_eq!(empty.unwrap_err(), Error::EmptyProfile);
        let stray = Ballot::single(vec![Candidate::new(5)]).unwrap();
        assert!(Profile::<f64>::new(roster, vec![stray]).is_err());
    }

    #[test]
    fn compression_merges_identical_ballots() {
        let p: Profile<Rational> =
            Profile::from_names(&["A", "B"], &[(1, &["A", "B"]), (2, &["B"]), (3, &["A", "B"])]).unwrap();
        let q = p.compressed();
        assert_eq!(q.ballots().len(), 2);
        assert!(p.same_ballots(&q));
        assert_eq!(q.n(), p.n());
    }

    #[test]
    fn ranking_rejects_duplicates() {
        assert!(Ranking::new(vec![Candidate::new(0), Candidate::new(0)]).is_err());
    }
}
