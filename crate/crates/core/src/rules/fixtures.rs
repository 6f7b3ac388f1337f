//! Rules that exist to pin down the endpoints of the metrics.

use crate::ballots::{Profile, Ranking};
use crate::error::{Error, Result};
use crate::rules::VotingRule;
use crate::scalar::Scalar;

/// Returns the ballot of voter `i` (1-based), completed with unlisted
/// candidates in canonical order.
///
/// Voters are counted through the ballot list by weight, so ballot `j` with
/// weight 3 covers three consecutive voter indices. Fractional weights are
/// rounded down when counting.
#[derive(Clone, Debug)]
pub struct Dictatorship {
    voter: usize,
}

impl Dictatorship {
    pub fn new(voter: usize) -> Self {
        Dictatorship { voter }
    }

    pub fn voter(&self) -> usize {
        self.voter
    }
}

impl<S: Scalar> VotingRule<S> for Dictatorship {
    fn name(&self) -> String {
        format!("dictator:i={}", self.voter)
    }

    fn rank(&self, p: &Profile<S>) -> Result<Ranking> {
        let target = S::from_usize(self.voter);
        let mut seen = S::zero();
        let ballot = p
            .ballots()
            .iter()
            .find(|b| {
                seen = seen.clone() + b.weight().clone();
                seen >= target
            })
            .filter(|_| self.voter >= 1)
            .ok_or_else(|| Error::InvalidArgument(format!("no voter {} in profile", self.voter)))?;
        let mut order = ballot.ranking().to_vec();
        order.extend(p.candidates().iter().filter(|c| !ballot.ranking().contains(c)));
        Ok(Ranking::from_order_unchecked(order))
    }
}

/// Runs `rule` and reverses its output.
#[derive(Clone, Debug)]
pub struct ReversalOf<R> {
    rule: R,
}

impl<R> ReversalOf<R> {
    pub fn new(rule: R) -> Self {
        ReversalOf { rule }
    }
}

impl<S: Scalar, R: VotingRule<S>> VotingRule<S> for ReversalOf<R> {
    fn name(&self) -> String {
        format!("reverse({})", self.rule.name())
    }

    fn rank(&self, p: &Profile<S>) -> Result<Ranking> {
        Ok(self.rule.rank(p)?.reversed())
    }
}

/// Applies `rule` to profiles with `full` active candidates and its reversal
/// to anything smaller. If `rule` ranks condensed profiles consistently
/// (a dictatorship always does) every removal reverses the survivors and the
/// IIA score is exactly zero.
#[derive(Clone, Debug)]
pub struct ReverseWhenCondensed<R> {
    rule: R,
    full: usize,
}

impl<R> ReverseWhenCondensed<R> {
    pub fn new(rule: R, full: usize) -> Self {
        ReverseWhenCondensed { rule, full }
    }
}

impl<S: Scalar, R: VotingRule<S>> VotingRule<S> for ReverseWhenCondensed<R> {
    fn name(&self) -> String {
        format!("reverse-condensed({})", self.rule.name())
    }

    fn rank(&self, p: &Profile<S>) -> Result<Ranking> {
        let r = self.rule.rank(p)?;
        Ok(if p.m() < self.full { r.reversed() } else { r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::ScoringRule;
    use crate::Rational;

    #[test]
    fn dictator_returns_their_ballot() {
        let p: Profile<Rational> =
            Profile::from_names(&["A", "B", "C"], &[(2, &["A", "B", "C"]), (1, &["C", "A", "B"])]).unwrap();
        let d = Dictatorship::new(3);
        assert_eq!(d.rank(&p).unwrap().names(p.roster()), ["C", "A", "B"]);
        assert_eq!(
            Dictatorship::new(2).rank(&p).unwrap().names(p.roster()),
            ["A", "B", "C"]
        );
        assert!(Dictatorship::new(4).rank(&p).is_err());
        assert!(Dictatorship::new(0).rank(&p).is_err());
    }

    #[test]
    fn partial_dictator_ballot_is_completed_canonically() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C"], &[(1, &["C"])]).unwrap();
        assert_eq!(
            Dictatorship::new(1).rank(&p).unwrap().names(p.roster()),
            ["C", "A", "B"]
        );
    }

    #[test]
    fn reversal_reverses() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C"], &[(1, &["A", "B", "C"])]).unwrap();
        let r = ReversalOf::new(ScoringRule::borda()).rank(&p).unwrap();
        assert_eq!(r.names(p.roster()), ["C", "B", "A"]);
        assert_eq!(
            VotingRule::<Rational>::name(&ReversalOf::new(ScoringRule::<Rational>::borda())),
            "reverse(borda)"
        );
    }

    #[test]
    fn condensed_reversal_only_flips_smaller_profiles() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C"], &[(1, &["A", "B", "C"])]).unwrap();
        let rule = ReverseWhenCondensed::new(Dictatorship::new(1), 3);
        assert_eq!(rule.rank(&p).unwrap().names(p.roster()), ["A", "B", "C"]);
        let q = p.condense(p.roster().require("B").unwrap()).unwrap();
        assert_eq!(rule.rank(&q).unwrap().names(p.roster()), ["C", "A"]);
    }
}
