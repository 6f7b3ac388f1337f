use crate::ballots::{Candidate, Profile, Ranking};
use crate::error::{Error, Result};
use crate::rules::VotingRule;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Quota<S> {
    /// Exact Droop quota: valid vote weight / (seats + 1).
    Droop,
    Fixed(S),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StvConfig<S> {
    seats: usize,
    quota: Quota<S>,
}

impl<S: Scalar> StvConfig<S> {
    pub fn droop(seats: usize) -> Result<Self> {
        StvConfig::new(seats, Quota::Droop)
    }

    pub fn new(seats: usize, quota: Quota<S>) -> Result<Self> {
        if seats == 0 {
            return Err(Error::Config("STV needs at least one seat".into()));
        }
        if let Quota::Fixed(q) = &quota {
            if *q <= S::zero() {
                return Err(Error::Config("STV quota must be positive".into()));
            }
        }
        Ok(StvConfig { seats, quota })
    }

    pub fn seats(&self) -> usize {
        self.seats
    }

    pub fn quota(&self) -> &Quota<S> {
        &self.quota
    }
}

/// What happened in one counting round.
#[derive(Clone, Debug, PartialEq)]
pub enum RoundEvent {
    /// Candidates over quota, in order of election.
    Elected(Vec<Candidate>),
    Eliminated(Candidate),
    /// Remaining hopefuls took the remaining seats.
    FilledRemaining(Vec<Candidate>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round<S> {
    /// First-place support of each hopeful at the start of the round.
    pub support: Vec<(Candidate, S)>,
    pub event: RoundEvent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StvOutcome<S> {
    pub quota: S,
    pub rounds: Vec<Round<S>>,
    pub elected: Vec<Candidate>,
    pub ranking: Ranking,
}

/// Single transferable vote, reported as a ranking: winners in order of
/// election, then unelected survivors by final support, then eliminated
/// candidates with the first eliminated last.
#[derive(Clone, Debug)]
pub struct Stv<S> {
    config: StvConfig<S>,
}

struct Paper<S> {
    ballot: usize,
    weight: S,
}

impl<S: Scalar> Stv<S> {
    pub fn new(config: StvConfig<S>) -> Self {
        Stv { config }
    }

    pub fn config(&self) -> &StvConfig<S> {
        &self.config
    }

    /// Runs the count and returns the full round trace.
    pub fn count(&self, p: &Profile<S>) -> Result<StvOutcome<S>> {
        let m = p.m();
        let seats = self.config.seats;
        if seats > m {
            return Err(Error::Config(format!("{seats} seats but only {m} candidates")));
        }
        let ballots = p.ballots();
        let mut papers: Vec<Paper<S>> = ballots
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty() && !b.weight().is_zero())
            .map(|(i, b)| Paper {
                ballot: i,
                weight: b.weight().clone(),
            })
            .collect();
        let valid = crate::scalar::sum(papers.iter().map(|x| x.weight.clone()));
        let quota = match &self.config.quota {
            Quota::Droop => valid / S::from_usize(seats + 1),
            Quota::Fixed(q) => q.clone(),
        };

        let mut hopeful = vec![true; m];
        let mut elected: Vec<usize> = Vec::new();
        let mut eliminated: Vec<usize> = Vec::new();
        let mut rounds = Vec::new();
        let cand = |i: usize| p.candidates()[i];

        loop {
            let hopefuls: Vec<usize> = (0..m).filter(|&i| hopeful[i]).collect();
            if elected.len() == seats || hopefuls.is_empty() {
                break;
            }
            let (support, holders) = tally(p, &mut papers, &hopeful);
            let snapshot: Vec<(Candidate, S)> = hopefuls.iter().map(|&i| (cand(i), support[i].clone())).collect();
            let seats_left = seats - elected.len();

            let mut over: Vec<usize> = hopefuls.iter().copied().filter(|&i| support[i] > quota).collect();
            if !over.is_empty() {
                sort_by_support_desc(&mut over, &support);
                over.truncate(seats_left);
                let factors: Vec<(usize, S)> = over
                    .iter()
                    .map(|&i| (i, (support[i].clone() - quota.clone()) / support[i].clone()))
                    .collect();
                for (paper, holder) in papers.iter_mut().zip(&holders) {
                    if let Some((_, f)) = factors.iter().find(|(i, _)| Some(*i) == *holder) {
                        paper.weight = paper.weight.clone() * f.clone();
                    }
                }
                for &i in &over {
                    hopeful[i] = false;
                    elected.push(i);
                }
                rounds.push(Round {
                    support: snapshot,
                    event: RoundEvent::Elected(over.iter().map(|&i| cand(i)).collect()),
                });
                continue;
            }

            if hopefuls.len() <= seats_left {
                let mut rest = hopefuls.clone();
                sort_by_support_desc(&mut rest, &support);
                for &i in &rest {
                    hopeful[i] = false;
                    elected.push(i);
                }
                rounds.push(Round {
                    support: snapshot,
                    event: RoundEvent::FilledRemaining(rest.iter().map(|&i| cand(i)).collect()),
                });
                break;
            }

            // lowest support goes; among equals the latest in canonical order
            let loser = hopefuls
                .iter()
                .copied()
                .reduce(|best, i| if support[i] <= support[best] { i } else { best })
                .expect("hopefuls is non-empty");
            hopeful[loser] = false;
            eliminated.push(loser);
            rounds.push(Round {
                support: snapshot,
                event: RoundEvent::Eliminated(cand(loser)),
            });
        }

        let (support, _) = tally(p, &mut papers, &hopeful);
        let mut remaining: Vec<usize> = (0..m).filter(|&i| hopeful[i]).collect();
        sort_by_support_desc(&mut remaining, &support);
        let order = elected
            .iter()
            .chain(&remaining)
            .chain(eliminated.iter().rev())
            .map(|&i| cand(i))
            .collect();
        Ok(StvOutcome {
            quota,
            rounds,
            elected: elected.iter().map(|&i| cand(i)).collect(),
            ranking: Ranking::from_order_unchecked(order),
        })
    }
}

/// Current first-place support of each hopeful (by local index) and the
/// holder of each paper. Exhausted papers are dropped.
fn tally<S: Scalar>(p: &Profile<S>, papers: &mut Vec<Paper<S>>, hopeful: &[bool]) -> (Vec<S>, Vec<Option<usize>>) {
    let ballots = p.ballots();
    let holder_of = |paper: &Paper<S>| {
        ballots[paper.ballot]
            .ranking()
            .iter()
            .map(|&c| p.local_index(c).expect("active candidate"))
            .find(|&i| hopeful[i])
    };
    papers.retain(|paper| holder_of(paper).is_some());
    let mut support = vec![S::zero(); hopeful.len()];
    let holders: Vec<Option<usize>> = papers.iter().map(holder_of).collect();
    for (paper, holder) in papers.iter().zip(&holders) {
        let i = holder.expect("exhausted papers were dropped");
        support[i] = support[i].clone() + paper.weight.clone();
    }
    (support, holders)
}

/// Descending support; equal support keeps canonical (ascending index) order.
fn sort_by_support_desc<S: Scalar>(items: &mut [usize], support: &[S]) {
    items.sort_by(|&a, &b| {
        support[b]
            .partial_cmp(&support[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
}

impl<S: Scalar> VotingRule<S> for Stv<S> {
    fn name(&self) -> String {
        format!("stv:k={}", self.config.seats)
    }

    fn rank(&self, p: &Profile<S>) -> Result<Ranking> {
        Ok(self.count(p)?.ranking)
    }
}
