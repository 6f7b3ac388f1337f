//! Percentile bootstrap over voters, and corpus summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ballots::Profile;
use crate::error::{Error, Result};
use crate::metrics::{sigma_iia, sigma_u_of};
use crate::report::{csv_writer, MetricRow, DIGITS};
use crate::rules::VotingRule;
use crate::scalar::{decimal_string, Scalar};
use crate::synth::replicate_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SigmaIia,
    SigmaU,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::SigmaIia, Metric::SigmaU];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SigmaIia => "sigma_iia",
            Metric::SigmaU => "sigma_u",
        }
    }

    pub fn of_row(self, row: &MetricRow) -> f64 {
        match self {
            Metric::SigmaIia => row.sigma_iia,
            Metric::SigmaU => row.sigma_u,
        }
    }

    /// The metric of `rule` on `p`.
    pub fn evaluate<S: Scalar, R: VotingRule<S> + ?Sized>(self, rule: &R, p: &Profile<S>) -> Result<S> {
        match self {
            Metric::SigmaIia => Ok(sigma_iia(rule, p)?.sigma_iia),
            Metric::SigmaU => Ok(sigma_u_of(p, &rule.rank(p)?)?.sigma_u),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma_iia" | "iia" => Ok(Metric::SigmaIia),
            "sigma_u" | "u" => Ok(Metric::SigmaU),
            _ => Err(Error::Config(format!("unknown metric `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    /// 1000 resamples at 95%.
    pub fn new(seed: u64) -> Self {
        BootstrapConfig {
            resamples: 1000,
            confidence: 0.95,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resamples == 0 {
            return Err(Error::Config("need at least one resample".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalEstimate<S> {
    pub rule: String,
    pub metric: Metric,
    /// The metric on the original profile.
    pub point: S,
    /// Mean of the resampled values.
    pub mean: S,
    pub lo: S,
    pub hi: S,
    pub resamples: usize,
    pub confidence: f64,
}

/// 1-based nearest rank of quantile `q` among `count` sorted values.
pub fn nearest_rank(q: f64, count: usize) -> usize {
    // the epsilon keeps products like 0.025 * 1000 from rounding up a rank
    let rank = (q * count as f64 - 1e-9).ceil();
    (rank.max(1.0) as usize).min(count)
}

/// Resamples `n` voters with replacement from the expanded voter list.
/// Needs whole-number ballot weights.
pub fn resample_voters<S: Scalar, R: Rng + ?Sized>(p: &Profile<S>, rng: &mut R) -> Result<Profile<S>> {
    let mut cumulative = Vec::with_capacity(p.ballots().len());
    let mut total = 0u64;
    for b in p.ballots() {
        let c = b.weight().to_count().ok_or_else(|| {
            Error::InvalidArgument(format!("voter bootstrap needs whole weights, got {}", b.weight()))
        })?;
        total += c;
        cumulative.push(total);
    }
    let mut counts = vec![0u64; cumulative.len()];
    for _ in 0..total {
        let v = rng.random_range(0..total);
        counts[cumulative.partition_point(|&c| c <= v)] += 1;
    }
    p.reweighted(counts.into_iter().map(S::from_u64).collect())
}

/// Percentile interval for one (rule, metric). Resample `b` uses stream `b`
/// of the seed, so results do not depend on scheduling.
pub fn bootstrap_metric<S: Scalar, R: VotingRule<S> + ?Sized>(
    p: &Profile<S>,
    rule: &R,
    metric: Metric,
    cfg: &BootstrapConfig,
) -> Result<IntervalEstimate<S>> {
    cfg.validate()?;
    let point = metric.evaluate(rule, p)?;
    let mut values = (0..cfg.resamples)
        .into_par_iter()
        .map(|b| {
            let sample = resample_voters(p, &mut replicate_rng(cfg.seed, b as u64))?;
            metric.evaluate(rule, &sample.compressed())
        })
        .collect::<Result<Vec<S>>>()?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let count = values.len();
    let mean = crate::scalar::sum(values.iter().cloned()) / S::from_usize(count);
    let lo = values[nearest_rank((1.0 - cfg.confidence) / 2.0, count) - 1].clone();
    let hi = values[nearest_rank((1.0 + cfg.confidence) / 2.0, count) - 1].clone();
    Ok(IntervalEstimate {
        rule: rule.name(),
        metric,
        point,
        mean,
        lo,
        hi,
        resamples: cfg.resamples,
        confidence: cfg.confidence,
    })
}

pub const INTERVAL_HEADER: [&str; 8] = ["election_id", "rule", "metric", "mean", "lo", "hi", "B", "confidence"];

pub fn write_intervals<S: Scalar, W: Write>(rows: &[(String, IntervalEstimate<S>)], out: W) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(INTERVAL_HEADER).map_err(std::io::Error::other)?;
    for (id, e) in rows {
        w.write_record([
            id.clone(),
            e.rule.clone(),
            e.metric.to_string(),
            decimal_string(e.mean.to_f64(), DIGITS),
            decimal_string(e.lo.to_f64(), DIGITS),
            decimal_string(e.hi.to_f64(), DIGITS),
            e.resamples.to_string(),
            decimal_string(e.confidence, DIGITS),
        ])
        .map_err(std::io::Error::other)?;
    }
    w.flush()
}

/// Columns a corpus summary can be grouped by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupField {
    Rule,
    Candidates,
    Seats,
}

impl GroupField {
    pub fn name(self) -> &'static str {
        match self {
            GroupField::Rule => "rule",
            GroupField::Candidates => "candidates",
            GroupField::Seats => "seats",
        }
    }

    fn key(self, row: &MetricRow) -> GroupKey {
        match self {
            GroupField::Rule => GroupKey::Text(row.rule.clone()),
            GroupField::Candidates => GroupKey::Count(Some(row.m)),
            GroupField::Seats => GroupKey::Count(row.seats),
        }
    }
}

impl FromStr for GroupField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rule" => Ok(GroupField::Rule),
            "candidates" | "m" => Ok(GroupField::Candidates),
            "seats" => Ok(GroupField::Seats),
            _ => Err(Error::Config(format!("unknown group field `{s}`"))),
        }
    }
}

/// A group value. Counts sort numerically, missing seat counts first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupKey {
    Count(Option<usize>),
    Text(String),
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Count(Some(k)) => write!(f, "{k}"),
            GroupKey::Count(None) => Ok(()),
            GroupKey::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub group: Vec<GroupKey>,
    pub metric: Metric,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

/// Quantile of sorted data by linear interpolation between order
/// statistics (position q (len - 1)).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Count, mean, quartiles and range of each metric per group, ordered by
/// group key then metric.
pub fn aggregate_corpus<'a, I>(rows: I, group_by: &[GroupField]) -> Vec<Summary>
where
    I: IntoIterator<Item = &'a MetricRow>,
{
    let mut groups: BTreeMap<Vec<GroupKey>, Vec<&MetricRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry(group_by.iter().map(|f| f.key(row)).collect())
            .or_default()
            .push(row);
    }
    let mut out = Vec::new();
    for (key, members) in groups {
        for metric in Metric::ALL {
            let mut v: Vec<f64> = members.iter().map(|r| metric.of_row(r)).collect();
            v.sort_by(f64::total_cmp);
            out.push(Summary {
                group: key.clone(),
                metric,
                count: v.len(),
                mean: v.iter().sum::<f64>() / v.len() as f64,
                median: quantile(&v, 0.5),
                q1: quantile(&v, 0.25),
                q3: quantile(&v, 0.75),
                min: v[0],
                max: v[v.len() - 1],
            });
        }
    }
    out
}

pub fn write_summaries<W: Write>(group_by: &[GroupField], rows: &[Summary], out: W) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    let mut header: Vec<&str> = group_by.iter().map(|f| f.name()).collect();
    header.extend(["metric", "count", "mean", "median", "q1", "q3", "min", "max"]);
    w.write_record(&header).map_err(std::io::Error::other)?;
    for s in rows {
        let mut rec: Vec<String> = s.group.iter().map(|k| k.to_string()).collect();
        rec.push(s.metric.to_string());
        rec.push(s.count.to_string());
        for x in [s.mean, s.median, s.q1, s.q3, s.min, s.max] {
            rec.push(decimal_string(x, DIGITS));
        }
        w.write_record(&rec).map_err(std::io::Error::other)?;
    }
    w.flush()
}

/// Per-election intervals pooled by averaging their endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PooledInterval {
    pub candidates: usize,
    pub seats: Option<usize>,
    pub rule: String,
    pub metric: Metric,
    pub elections: usize,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Groups `(m, seats, interval)` triples by candidate count, seat count,
/// rule and metric, and averages mean, lo and hi within each group.
pub fn pool_intervals<S: Scalar>(items: &[(usize, Option<usize>, IntervalEstimate<S>)]) -> Vec<PooledInterval> {
    type Key = (usize, Option<usize>, String, Metric);
    let mut groups: BTreeMap<Key, Vec<&IntervalEstimate<S>>> = BTreeMap::new();
    for (m, k, e) in items {
        groups.entry((*m, *k, e.rule.clone(), e.metric)).or_default().push(e);
    }
    groups
        .into_iter()
        .map(|((candidates, seats, rule, metric), es)| {
            let avg = |f: fn(&IntervalEstimate<S>) -> f64| es.iter().map(|e| f(e)).sum::<f64>() / es.len() as f64;
            PooledInterval {
                candidates,
                seats,
                rule,
                metric,
                elections: es.len(),
                mean: avg(|e| e.mean.to_f64()),
                lo: avg(|e| e.lo.to_f64()),
                hi: avg(|e| e.hi.to_f64()),
            }
        })
        .collect()
}

pub const POOLED_HEADER: [&str; 8] = ["candidates", "seats", "rule", "metric", "elections", "mean", "lo", "hi"];

pub fn write_pooled<W: Write>(rows: &[PooledInterval], out: W) -> std::io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(POOLED_HEADER).map_err(std::io::Error::other)?;
    for p in rows {
        w.write_record([
            p.candidates.to_string(),
            p.seats.map(|k| k.to_string()).unwrap_or_default(),
            p.rule.clone(),
            p.metric.to_string(),
            p.elections.to_string(),
            decimal_string(p.mean, DIGITS),
            decimal_string(p.lo, DIGITS),
            decimal_string(p.hi, DIGITS),
        ])
        .map_err(std::io::Error::other)?;
    }
    w.flush()
}
