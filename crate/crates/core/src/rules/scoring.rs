use crate::ballots::{Profile, Ranking};
use crate::error::Result;
use crate::rules::VotingRule;
use crate::scalar::Scalar;

/// Points per ballot position. Unranked candidates always get zero.
#[derive(Clone, Debug, PartialEq)]
pub enum ScoreVector<S> {
    /// (m, m-1, ..., 1) for the m active candidates.
    Borda,
    /// One point for each of the top k positions.
    Approval(usize),
    /// Explicit scores, padded with zeros or truncated to length m.
    Fixed(Vec<S>),
}

impl<S: Scalar> ScoreVector<S> {
    pub fn resolve(&self, m: usize) -> Vec<S> {
        match self {
            ScoreVector::Borda => (0..m).map(|i| S::from_usize(m - i)).collect(),
            ScoreVector::Approval(k) => (0..m).map(|i| if i < *k { S::one() } else { S::zero() }).collect(),
            ScoreVector::Fixed(v) => (0..m).map(|i| v.get(i).cloned().unwrap_or_else(S::zero)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScoringRule<S> {
    name: String,
    vector: ScoreVector<S>,
}

impl<S: Scalar> ScoringRule<S> {
    pub fn new(name: impl Into<String>, vector: ScoreVector<S>) -> Self {
        ScoringRule {
            name: name.into(),
            vector,
        }
    }

    pub fn borda() -> Self {
        ScoringRule::new("borda", ScoreVector::Borda)
    }

    pub fn plurality() -> Self {
        ScoringRule::new("plurality", ScoreVector::Approval(1))
    }

    pub fn approval(k: usize) -> Self {
        if k == 1 {
            return ScoringRule::plurality();
        }
        ScoringRule::new(format!("{k}-approval"), ScoreVector::Approval(k))
    }

    pub fn vector(&self) -> &ScoreVector<S> {
        &self.vector
    }

    /// Total score of each active candidate, in canonical order.
    pub fn scores(&self, p: &Profile<S>) -> Vec<S> {
        let points = self.vector.resolve(p.m());
        let mut totals = vec![S::zero(); p.m()];
        for ballot in p.ballots() {
            for (pos, &c) in ballot.ranking().iter().enumerate() {
                if points[pos].is_zero() {
                    continue;
                }
                let i = p.local_index(c).expect("ballot candidates are active");
                totals[i] = totals[i].clone() + points[pos].clone() * ballot.weight().clone();
            }
        }
        totals
    }
}

impl<S: Scalar> VotingRule<S> for ScoringRule<S> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn rank(&self, p: &Profile<S>) -> Result<Ranking> {
        let scores = self.scores(p);
        let mut order: Vec<usize> = (0..p.m()).collect();
        // stable: equal scores keep canonical order
        order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Ranking::from_order_unchecked(
            order.into_iter().map(|i| p.candidates()[i]).collect(),
        ))
    }
}
