#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axiometer::rules::{ScoringRule, Stv, StvConfig};
use axiometer::{Ballot, Candidate, CandidateRoster, DynRule, ExactProfile, Profile, Ranking, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn letters(m: usize) -> Vec<String> {
    (0..m).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
}

/// A profile over `A..` from local-index rankings, one voter each.
pub fn profile_of(m: usize, ballots: &[Vec<usize>]) -> ExactProfile {
    let roster = Arc::new(CandidateRoster::new(letters(m)).unwrap());
    let ballots = ballots
        .iter()
        .map(|b| {
            Ballot::new(
                b.iter().map(|&i| Candidate::new(i)).collect(),
                Rational::from_integer(1.into()),
            )
            .unwrap()
        })
        .collect();
    Profile::new(roster, ballots).unwrap()
}

/// `n` random ballots over `m` candidates. With `partial`, each ballot is a
/// uniformly random prefix (possibly empty) of a random permutation.
pub fn random_ballots<R: Rng>(rng: &mut R, m: usize, n: usize, partial: bool) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut perm: Vec<usize> = (0..m).collect();
            perm.shuffle(rng);
            if partial {
                perm.truncate(rng.random_range(0..=m));
            }
            perm
        })
        .collect()
}

pub fn random_profile<R: Rng>(rng: &mut R, m: usize, n: usize, partial: bool) -> ExactProfile {
    profile_of(m, &random_ballots(rng, m, n, partial))
}

/// Complete ballots with at least one majority cycle.
pub fn random_cyclic_profile<R: Rng>(rng: &mut R, m: usize, n: usize) -> ExactProfile {
    loop {
        let p = random_profile(rng, m, n, false);
        if axiometer::topological_sort(&axiometer::build_pwcg(&p)).is_none() {
            return p;
        }
    }
}

/// Every ranking of the active candidates, in lexicographic order.
pub fn all_rankings(p: &ExactProfile) -> Vec<Ranking> {
    fn go(rest: &mut Vec<Candidate>, prefix: &mut Vec<Candidate>, out: &mut Vec<Ranking>) {
        if rest.is_empty() {
            out.push(Ranking::new(prefix.clone()).unwrap());
            return;
        }
        for i in 0..rest.len() {
            let c = rest.remove(i);
            prefix.push(c);
            go(rest, prefix, out);
            prefix.pop();
            rest.insert(i, c);
        }
    }
    let mut out = Vec::new();
    go(&mut p.candidates().to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Borda, 3-approval, 2-approval, plurality and STV.
pub fn five_rules(seats: usize) -> Vec<DynRule<Rational>> {
    vec![
        Box::new(ScoringRule::borda()),
        Box::new(ScoringRule::approval(3)),
        Box::new(ScoringRule::approval(2)),
        Box::new(ScoringRule::plurality()),
        Box::new(Stv::new(StvConfig::droop(seats).unwrap())),
    ]
}

/// Proptest strategy: (m, ballots) with m in `ms` and 1..=`max_n` ballots.
pub fn ballots_strategy(
    ms: std::ops::RangeInclusive<usize>,
    max_n: usize,
    partial: bool,
) -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    ms.prop_flat_map(move |m| {
        let ballot = (Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), 0..=m).prop_map(move |(perm, len)| {
            if partial {
                perm[..len].to_vec()
            } else {
                perm
            }
        });
        (Just(m), prop::collection::vec(ballot, 1..=max_n))
    })
}

pub fn profile_strategy(
    ms: std::ops::RangeInclusive<usize>,
    max_n: usize,
    partial: bool,
) -> impl Strategy<Value = ExactProfile> {
    ballots_strategy(ms, max_n, partial).prop_map(|(m, b)| profile_of(m, &b))
}
