//! Bradley–Terry synthetic profiles.
//!
//! A ranking's weight is the product, over every pair, of the probability
//! that the higher-placed candidate wins their head-to-head:
//! s_i / (s_i + s_j). Strengths come from a symmetric Dirichlet.

use std::io::Write;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ballots::{Ballot, Candidate, CandidateRoster, Profile, Ranking};
use crate::error::{Error, Result};
use crate::metrics::evaluate_all;
use crate::optimizer::next_permutation;
use crate::report::{csv_writer, DIGITS};
use crate::rules::VotingRule;
use crate::scalar::{decimal_string, Scalar};

/// Largest candidate count sampled by full enumeration under `Sampler::Auto`.
pub const EXACT_LIMIT: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrengthMode {
    /// New strengths for every replicate.
    Fresh,
    /// One strength vector for the whole experiment.
    Shared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Enumeration up to `EXACT_LIMIT` candidates, Metropolis above.
    Auto,
    Exact,
    Mcmc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BtConfig {
    pub m: usize,
    pub voters: usize,
    /// Symmetric Dirichlet concentration.
    pub alpha: f64,
    pub seed: u64,
    pub profiles: usize,
    pub strengths: StrengthMode,
    pub sampler: Sampler,
    /// Metropolis steps before the first ballot. Default 10 m².
    pub burn_in: Option<usize>,
    /// Metropolis steps between ballots. Default m².
    pub thin: Option<usize>,
}

impl BtConfig {
    /// 1000 voters, 100 profiles, seed 0, fresh strengths.
    pub fn new(m: usize, alpha: f64) -> Self {
        BtConfig {
            m,
            voters: 1000,
            alpha,
            seed: 0,
            profiles: 100,
            strengths: StrengthMode::Fresh,
            sampler: Sampler::Auto,
            burn_in: None,
            thin: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.voters == 0 {
            return Err(Error::Config("voters must be at least 1".into()));
        }
        if self.m < 2 {
            return Err(Error::Config("need at least two candidates".into()));
        }
        if self.sampler == Sampler::Exact && self.m > 10 {
            return Err(Error::Config(format!(
                "exact sampling of {}! rankings is not feasible",
                self.m
            )));
        }
        if self.thin == Some(0) {
            return Err(Error::Config("thinning must be at least 1".into()));
        }
        Ok(())
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(10 * self.m * self.m)
    }

    pub fn thin(&self) -> usize {
        self.thin.unwrap_or(self.m * self.m)
    }

    fn uses_mcmc(&self) -> bool {
        match self.sampler {
            Sampler::Auto => self.m > EXACT_LIMIT,
            Sampler::Exact => false,
            Sampler::Mcmc => true,
        }
    }
}

/// Positive candidate strengths summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrengthVector(Vec<f64>);

impl StrengthVector {
    /// Normalises positive weights.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("strengths must be positive and finite".into()));
        }
        let total: f64 = weights.iter().sum();
        Ok(StrengthVector(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn uniform(m: usize) -> Self {
        StrengthVector(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One Dirichlet(alpha, ..., alpha) draw, via normalised Gamma(alpha, 1)
/// variates. Underflowing variates are raised to the smallest positive float.
pub fn sample_strengths<R: Rng + ?Sized>(cfg: &BtConfig, rng: &mut R) -> Result<StrengthVector> {
    let gamma = Gamma::new(cfg.alpha, 1.0).map_err(|e| Error::Config(format!("alpha: {e}")))?;
    let draws = (0..cfg.m).map(|_| gamma.sample(rng).max(f64::MIN_POSITIVE)).collect();
    StrengthVector::new(draws)
}

/// Unnormalised weight of `order` (local candidate indices, best first).
pub fn bt_weight<S: Scalar>(s: &[S], order: &[usize]) -> S {
    let mut w = S::one();
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            w = w * (s[a].clone() / (s[a].clone() + s[b].clone()));
        }
    }
    w
}

/// Unnormalised weight of a ranking of candidates `0..m`.
pub fn bt_ranking_probability(s: &StrengthVector, r: &Ranking) -> f64 {
    let order: Vec<usize> = r.order().iter().map(|c| c.index()).collect();
    bt_weight(s.as_slice(), &order)
}

/// Every ranking with its normalised probability, in lexicographic order.
pub fn bt_distribution<S: Scalar>(s: &[S]) -> Vec<(Vec<usize>, S)> {
    let mut perm: Vec<usize> = (0..s.len()).collect();
    let mut out = Vec::new();
    loop {
        let w = bt_weight(s, &perm);
        out.push((perm.clone(), w));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let total = crate::scalar::sum(out.iter().map(|(_, w)| w.clone()));
    out.into_iter().map(|(p, w)| (p, w / total.clone())).collect()
}

/// `count` i.i.d. rankings, each as local indices best first.
pub fn sample_orders<R: Rng + ?Sized>(
    cfg: &BtConfig,
    s: &StrengthVector,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if s.len() != cfg.m {
        return Err(Error::InvalidArgument(format!(
            "{} strengths for {} candidates",
            s.len(),
            cfg.m
        )));
    }
    if cfg.uses_mcmc() {
        Ok(metropolis(s.as_slice(), count, cfg.burn_in(), cfg.thin(), rng))
    } else {
        let dist = bt_distribution(s.as_slice());
        let index = WeightedIndex::new(dist.iter().map(|(_, w)| *w))
            .map_err(|e| Error::InvalidArgument(format!("strengths: {e}")))?;
        Ok((0..count).map(|_| dist[index.sample(rng)].0.clone()).collect())
    }
}

/// Metropolis over adjacent transpositions. Swapping a (above) with b
/// changes only their pair, so the acceptance ratio is s_b / s_a.
fn metropolis<R: Rng + ?Sized>(s: &[f64], count: usize, burn_in: usize, thin: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let m = s.len();
    let mut state: Vec<usize> = (0..m).collect();
    state.shuffle(rng);
    let mut step = |state: &mut Vec<usize>| {
        let k = rng.random_range(0..m - 1);
        let (a, b) = (state[k], state[k + 1]);
        let ratio = s[b] / s[a];
        if ratio >= 1.0 || rng.random::<f64>() < ratio {
            state.swap(k, k + 1);
        }
    };
    for _ in 0..burn_in {
        step(&mut state);
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 {
            for _ in 0..thin {
                step(&mut state);
            }
        }
        out.push(state.clone());
    }
    out
}

pub fn candidate_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("C{i}")).collect()
}

/// Complete-ballot profile over `C1..Cm`, identical rankings merged.
pub fn profile_from_orders<S: Scalar>(m: usize, orders: &[Vec<usize>]) -> Result<Profile<S>> {
    let roster = Arc::new(CandidateRoster::new(candidate_names(m))?);
    let ballots = orders
        .iter()
        .map(|o| Ballot::new(o.iter().map(|&i| Candidate::new(i)).collect(), S::one()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Profile::new(roster, ballots)?.compressed())
}

pub fn sample_profile<S: Scalar, R: Rng + ?Sized>(
    cfg: &BtConfig,
    s: &StrengthVector,
    rng: &mut R,
) -> Result<Profile<S>> {
    profile_from_orders(cfg.m, &sample_orders(cfg, s, cfg.voters, rng)?)
}

/// The random stream for replicate `r`: independent of every other
/// replicate, so serial and parallel runs agree.
pub fn replicate_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// Strengths used by every replicate under `StrengthMode::Shared`.
pub fn shared_strengths(cfg: &BtConfig) -> Result<StrengthVector> {
    sample_strengths(cfg, &mut replicate_rng(cfg.seed, u64::MAX))
}

/// Strengths and profile of replicate `r`.
pub fn replicate<S: Scalar>(
    cfg: &BtConfig,
    r: usize,
    shared: Option<&StrengthVector>,
) -> Result<(StrengthVector, Profile<S>)> {
    let mut rng = replicate_rng(cfg.seed, r as u64);
    let s = match shared {
        Some(s) => s.clone(),
        None => sample_strengths(cfg, &mut rng)?,
    };
    let p = sample_profile(cfg, &s, &mut rng)?;
    Ok((s, p))
}

pub const BT_HEADER: [&str; 6] = ["replicate", "rule", "sigma_iia", "sigma_u", "alpha", "m"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BtRow {
    pub replicate: usize,
    pub rule: String,
    pub sigma_iia: f64,
    pub sigma_u: f64,
    pub alpha: f64,
    pub m: usize,
}

/// Scores every rule on `cfg.profiles` replicates. Rows are ordered by
/// replicate, then rule name.
pub fn run_bt_experiment<S: Scalar, R: VotingRule<S>>(cfg: &BtConfig, rules: &[R]) -> Result<Vec<BtRow>> {
    cfg.validate()?;
    let shared = match cfg.strengths {
        StrengthMode::Shared => Some(shared_strengths(cfg)?),
        StrengthMode::Fresh => None,
    };
    let per_replicate = (0..cfg.profiles)
        .into_par_iter()
        .map(|r| {
            let (_, p) = replicate::<S>(cfg, r, shared.as_ref())?;
            score_replicate(cfg, rules, r, &p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_replicate.into_iter().flatten().collect())
}

/// Experiment rows for one replicate's profile, ordered by rule name.
pub fn score_replicate<S: Scalar, R: VotingRule<S>>(
    cfg: &BtConfig,
    rules: &[R],
    r: usize,
    p: &Profile<S>,
) -> Result<Vec<BtRow>> {
    Ok(evaluate_all(rules, p)?
        .into_iter()
        .map(|rep| BtRow {
            replicate: r,
            rule: rep.rule_name,
            sigma_iia: rep.sigma_iia.to_f64(),
            sigma_u: rep.sigma_u.to_f64(),
            alpha: cfg.alpha,
            m: cfg.m,
        })
        .collect())
}

pub fn write_bt_rows<W: Write>(rows: &[BtRow], out: W) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(BT_HEADER).map_err(std::io::Error::other)?;
    for row in rows {
        w.write_record([
            row.replicate.to_string(),
            row.rule.clone(),
            decimal_string(row.sigma_iia, DIGITS),
            decimal_string(row.sigma_u, DIGITS),
            decimal_string(row.alpha, DIGITS),
            row.m.to_string(),
        ])
        .map_err(std::io::Error::other)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::ScoringRule;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn equal_strengths_give_a_uniform_distribution() {
        let s = vec![q(1, 4); 4];
        let dist = bt_distribution(&s);
        assert_eq!(dist.len(), 24);
        assert!(dist.iter().all(|(_, p)| *p == q(1, 24)));
    }

    #[test]
    fn two_candidates_follow_the_pairwise_odds() {
        let dist = bt_distribution(&[q(3, 4), q(1, 4)]);
        assert_eq!(dist[0], (vec![0, 1], q(3, 4)));
    }

    // weights over 280: ABC 75, ACB 50, BAC 45, BCA 18, CAB 20, CBA 12
    #[test]
    fn three_candidate_enumeration() {
        let dist = bt_distribution(&[q(1, 2), q(3, 10), q(1, 5)]);
        let expect = [75, 50, 45, 18, 20, 12].map(|w| q(w, 220));
        let got: Vec<Rational> = dist.into_iter().map(|(_, p)| p).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn strengths_are_normalised_and_positive() {
        let cfg = BtConfig::new(5, 0.2);
        let mut rng = replicate_rng(7, 0);
        for _ in 0..200 {
            let s = sample_strengths(&cfg, &mut rng).unwrap();
            assert!(s.as_slice().iter().all(|&x| x > 0.0));
            assert!((s.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(StrengthVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn pairwise_frequency_matches_strengths() {
        let mut cfg = BtConfig::new(2, 1.0);
        cfg.voters = 100_000;
        let s = StrengthVector::new(vec![0.75, 0.25]).unwrap();
        let p: Profile<f64> = sample_profile(&cfg, &s, &mut replicate_rng(1, 0)).unwrap();
        let a_first: f64 = p
            .ballots()
            .iter()
            .filter(|b| b.ranking()[0] == Candidate::new(0))
            .map(|b| *b.weight())
            .sum();
        assert!((a_first / 100_000.0 - 0.75).abs() < 0.01, "{a_first}");
    }

    #[test]
    fn same_seed_same_profile() {
        let mut cfg = BtConfig::new(9, 2.0);
        cfg.voters = 300;
        let one = replicate::<Rational>(&cfg, 3, None).unwrap();
        let two = replicate::<Rational>(&cfg, 3, None).unwrap();
        assert_eq!(one.0, two.0);
        assert_eq!(
            crate::format::profile_to_string(&one.1),
            crate::format::profile_to_string(&two.1)
        );
        let other = replicate::<Rational>(&cfg, 4, None).unwrap();
        assert_ne!(one.0, other.0);
    }

    #[test]
    fn experiment_shapes() {
        let mut cfg = BtConfig::new(4, 2.0);
        cfg.voters = 50;
        cfg.profiles = 3;
        let rules = [ScoringRule::<Rational>::borda(), ScoringRule::plurality()];
        let rows = run_bt_experiment(&cfg, &rules).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].rule, "borda");
        assert_eq!(rows[5].replicate, 2);
        cfg.profiles = 0;
        assert!(run_bt_experiment(&cfg, &rules).unwrap().is_empty());
        cfg.alpha = 0.0;
        assert!(run_bt_experiment(&cfg, &rules).is_err());
    }

    #[test]
    fn shared_mode_reuses_strengths() {
        let mut cfg = BtConfig::new(3, 1.0);
        cfg.voters = 10;
        cfg.strengths = StrengthMode::Shared;
        let s = shared_strengths(&cfg).unwrap();
        let (a, _) = replicate::<f64>(&cfg, 0, Some(&s)).unwrap();
        let (b, _) = replicate::<f64>(&cfg, 1, Some(&s)).unwrap();
        assert_eq!(a, b);
    }
}
