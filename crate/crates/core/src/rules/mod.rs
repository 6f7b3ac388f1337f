//! Voting rules: deterministic maps from a profile to a complete ranking.
//!
//! Every rule breaks ties by canonical (ballot-paper) order, so equal
//! profiles always give equal rankings.

mod fixtures;
mod scoring;
mod stv;

pub use fixtures::{Dictatorship, ReversalOf, ReverseWhenCondensed};
pub use scoring::{ScoreVector, ScoringRule};
pub use stv::{Quota, Stv, StvConfig};

use crate::ballots::{Profile, Ranking};
use crate::error::{Error, Result};
use crate::optimizer::OptimalU;
use crate::scalar::Scalar;

/// A named, deterministic voting rule.
pub trait VotingRule<S: Scalar>: Send + Sync {
    /// Registry name, e.g. `borda` or `stv:k=3`.
    fn name(&self) -> String;

    fn rank(&self, profile: &Profile<S>) -> Result<Ranking>;
}

impl<S: Scalar, R: VotingRule<S> + ?Sized> VotingRule<S> for Box<R> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn rank(&self, profile: &Profile<S>) -> Result<Ranking> {
        (**self).rank(profile)
    }
}

impl<S: Scalar, R: VotingRule<S> + ?Sized> VotingRule<S> for &R {
    fn name(&self) -> String {
        (**self).name()
    }

    fn rank(&self, profile: &Profile<S>) -> Result<Ranking> {
        (**self).rank(profile)
    }
}

pub type DynRule<S> = Box<dyn VotingRule<S>>;

pub fn borda<S: Scalar>(p: &Profile<S>) -> Result<Ranking> {
    ScoringRule::borda().rank(p)
}

pub fn three_approval<S: Scalar>(p: &Profile<S>) -> Result<Ranking> {
    ScoringRule::approval(3).rank(p)
}

pub fn two_approval<S: Scalar>(p: &Profile<S>) -> Result<Ranking> {
    ScoringRule::approval(2).rank(p)
}

pub fn plurality<S: Scalar>(p: &Profile<S>) -> Result<Ranking> {
    ScoringRule::plurality().rank(p)
}

pub fn stv<S: Scalar>(cfg: &StvConfig<S>, p: &Profile<S>) -> Result<Ranking> {
    Stv::new(cfg.clone()).rank(p)
}

/// Looks a rule up by name: `borda`, `3-approval`, `2-approval`,
/// `plurality`, `stv:k=<int>`, `dictator:i=<int>` or `optimal-u`.
///
/// A bare `stv` takes its seat count from `default_seats` (usually the
/// election file's metadata).
pub fn rule_by_name<S: Scalar>(name: &str, default_seats: Option<usize>) -> Result<DynRule<S>> {
    let name = name.trim();
    let rule: DynRule<S> = match name {
        "borda" => Box::new(ScoringRule::borda()),
        "plurality" => Box::new(ScoringRule::plurality()),
        "optimal-u" => Box::new(OptimalU),
        "stv" => {
            let k = default_seats.ok_or_else(|| Error::Config("`stv` needs a seat count (`stv:k=<int>`)".into()))?;
            Box::new(Stv::new(StvConfig::droop(k)?))
        }
        _ => {
            if let Some(k) = name.strip_suffix("-approval") {
                let k = parse_count(k, name)?;
                Box::new(ScoringRule::approval(k))
            } else if let Some(k) = name.strip_prefix("stv:k=") {
                Box::new(Stv::new(StvConfig::droop(parse_count(k, name)?)?))
            } else if let Some(i) = name.strip_prefix("dictator:i=") {
                let i: usize = i
                    .parse()
                    .map_err(|_| Error::Config(format!("bad voter index in `{name}`")))?;
                Box::new(Dictatorship::new(i))
            } else {
                return Err(Error::Config(format!("unknown rule `{name}`")));
            }
        }
    };
    Ok(rule)
}

fn parse_count(text: &str, name: &str) -> Result<usize> {
    match text.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::Config(format!("bad count in rule `{name}`"))),
    }
}

/// Parses a comma-separated rule list.
pub fn rules_by_name<S: Scalar>(list: &str, default_seats: Option<usize>) -> Result<Vec<DynRule<S>>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| rule_by_name(s, default_seats))
        .collect()
}

/// Borda, 3-approval, 2-approval, plurality and STV with `seats` seats.
pub fn standard_rules<S: Scalar>(seats: usize) -> Result<Vec<DynRule<S>>> {
    Ok(vec![
        Box::new(ScoringRule::borda()),
        Box::new(ScoringRule::approval(3)),
        Box::new(ScoringRule::approval(2)),
        Box::new(ScoringRule::plurality()),
        Box::new(Stv::new(StvConfig::droop(seats)?)),
    ])
}
