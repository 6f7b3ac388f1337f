//! Head-to-head structure of a profile: relative ranking vectors, pairwise
//! support, alignment with an output ranking, and the majority-margin graph.

use std::collections::BTreeSet;
use std::io::Write;

use crate::ballots::{Ballot, Candidate, Profile, Ranking};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How one ballot orders a pair (A, B).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// A above B.
    Prefers,
    /// Neither is listed.
    Unranked,
    /// B above A.
    Opposes,
}

impl Relation {
    /// Entry of the relative ranking vector: 1, 1/2 or 0.
    pub fn value<S: Scalar>(self) -> S {
        match self {
            Relation::Prefers => S::one(),
            Relation::Unranked => S::half(),
            Relation::Opposes => S::zero(),
        }
    }
}

/// Relation of `a` to `b` on one ballot. Listed beats unlisted.
pub fn relation<S: Scalar>(ballot: &Ballot<S>, a: Candidate, b: Candidate) -> Relation {
    match (ballot.position(a), ballot.position(b)) {
        (Some(pa), Some(pb)) if pa < pb => Relation::Prefers,
        (Some(_), Some(_)) => Relation::Opposes,
        (Some(_), None) => Relation::Prefers,
        (None, Some(_)) => Relation::Opposes,
        (None, None) => Relation::Unranked,
    }
}

/// Per-ballot entries of X_{A,B}, each paired with the ballot weight.
#[derive(Clone, Debug)]
pub struct RelativeRankingVector<S> {
    pub pair: (Candidate, Candidate),
    pub entries: Vec<(Relation, S)>,
}

impl<S: Scalar> RelativeRankingVector<S> {
    /// Weighted L1 norm, i.e. the weighted count of voters preferring A,
    /// with unranked pairs counting one half.
    pub fn norm1(&self) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, (r, w)| acc + r.value::<S>() * w.clone())
    }
}

fn check_pair<S: Scalar>(p: &Profile<S>, a: Candidate, b: Candidate) -> Result<()> {
    if a == b {
        return Err(Error::InvalidArgument("a pair needs two distinct candidates".into()));
    }
    for c in [a, b] {
        if !p.contains(c) {
            return Err(Error::UnknownCandidate(c.to_string()));
        }
    }
    Ok(())
}

pub fn relative_vector<S: Scalar>(p: &Profile<S>, a: Candidate, b: Candidate) -> Result<RelativeRankingVector<S>> {
    check_pair(p, a, b)?;
    Ok(RelativeRankingVector {
        pair: (a, b),
        entries: p
            .ballots()
            .iter()
            .map(|ballot| (relation(ballot, a, b), ballot.weight().clone()))
            .collect(),
    })
}

/// Share of voters who order `a`, `b` the way `out` does (ties count half).
pub fn alignment<S: Scalar>(p: &Profile<S>, out: &Ranking, a: Candidate, b: Candidate) -> Result<S> {
    check_pair(p, a, b)?;
    let (first, second) = if out.prefers(a, b) {
        (a, b)
    } else if out.prefers(b, a) {
        (b, a)
    } else {
        return Err(Error::RosterMismatch);
    };
    Ok(relative_vector(p, first, second)?.norm1() / p.n().clone())
}

/// ‖X_{A,B}‖₁ for every ordered pair of active candidates, computed in one
/// pass over the ballots.
#[derive(Clone, Debug)]
pub struct SupportMatrix<S> {
    candidates: Vec<Candidate>,
    roster_len: usize,
    local: Vec<usize>,
    support: Vec<S>,
    n: S,
}

impl<S: Scalar> SupportMatrix<S> {
    pub fn new(p: &Profile<S>) -> Self {
        let k = p.m();
        let roster_len = p.roster().len();
        let mut local = vec![usize::MAX; roster_len];
        for (i, c) in p.candidates().iter().enumerate() {
            local[c.index()] = i;
        }
        let mut support = vec![S::zero(); k * k];
        // rank[i] = position of local candidate i on the current ballot
        let mut rank = vec![usize::MAX; k];
        for ballot in p.ballots() {
            if ballot.weight().is_zero() {
                continue;
            }
            rank.iter_mut().for_each(|r| *r = usize::MAX);
            for (pos, c) in ballot.ranking().iter().enumerate() {
                rank[local[c.index()]] = pos;
            }
            let w = ballot.weight().clone();
            let half = w.clone() * S::half();
            for i in 0..k {
                for j in (i + 1)..k {
                    match (rank[i], rank[j]) {
                        (usize::MAX, usize::MAX) => {
                            support[i * k + j] = support[i * k + j].clone() + half.clone();
                            support[j * k + i] = support[j * k + i].clone() + half.clone();
                        }
                        (ri, rj) if ri < rj => {
                            support[i * k + j] = support[i * k + j].clone() + w.clone();
                        }
                        _ => {
                            support[j * k + i] = support[j * k + i].clone() + w.clone();
                        }
                    }
                }
            }
        }
        SupportMatrix {
            candidates: p.candidates().to_vec(),
            roster_len,
            local,
            support,
            n: p.n().clone(),
        }
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn n(&self) -> &S {
        &self.n
    }

    fn idx(&self, c: Candidate) -> usize {
        let i = if c.index() < self.roster_len {
            self.local[c.index()]
        } else {
            usize::MAX
        };
        assert!(i != usize::MAX, "candidate {c} is not active");
        i
    }

    /// ‖X_{A,B}‖₁.
    pub fn support(&self, a: Candidate, b: Candidate) -> &S {
        let k = self.candidates.len();
        &self.support[self.idx(a) * k + self.idx(b)]
    }

    /// Signed margin δ_{A,B} = ‖X_{A,B}‖₁ − ‖X_{B,A}‖₁.
    pub fn margin(&self, a: Candidate, b: Candidate) -> S {
        self.support(a, b).clone() - self.support(b, a).clone()
    }

    /// Worst alignment of `out` over all pairs (raw M, no transform).
    pub fn misalignment(&self, out: &Ranking) -> Result<S> {
        if self.candidates.len() < 2 {
            return Err(Error::InvalidArgument(
                "misalignment needs at least two candidates".into(),
            ));
        }
        if out.len() != self.candidates.len()
            || out
                .order()
                .iter()
                .any(|&c| c.index() >= self.roster_len || self.local[c.index()] == usize::MAX)
        {
            return Err(Error::RosterMismatch);
        }
        let order = out.order();
        let mut worst: Option<S> = None;
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                let value = self.support(a, b).clone() / self.n.clone();
                if worst.as_ref().is_none_or(|w| value < *w) {
                    worst = Some(value);
                }
            }
        }
        Ok(worst.expect("at least one pair"))
    }
}

/// M(f, P): the minimum alignment over all candidate pairs.
pub fn misalignment<S: Scalar>(p: &Profile<S>, out: &Ranking) -> Result<S> {
    SupportMatrix::new(p).misalignment(out)
}

/// A directed edge towards the pairwise loser, weighted by the margin.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub from: Candidate,
    pub to: Candidate,
    pub weight: S,
}

/// The pairwise comparison graph. Only strictly positive margins are edges.
#[derive(Clone, Debug)]
pub struct PairwiseGraph<S> {
    candidates: Vec<Candidate>,
    n: S,
    edges: Vec<Edge<S>>,
}

impl<S: Scalar> PairwiseGraph<S> {
    pub fn from_support(matrix: &SupportMatrix<S>) -> Self {
        let cands = matrix.candidates();
        let mut edges = Vec::new();
        for (i, &a) in cands.iter().enumerate() {
            for &b in &cands[i + 1..] {
                let delta = matrix.margin(a, b);
                if delta > S::zero() {
                    edges.push(Edge {
                        from: a,
                        to: b,
                        weight: delta,
                    });
                } else if delta < S::zero() {
                    edges.push(Edge {
                        from: b,
                        to: a,
                        weight: S::zero() - delta,
                    });
                }
            }
        }
        PairwiseGraph {
            candidates: cands.to_vec(),
            n: matrix.n().clone(),
            edges,
        }
    }

    /// A graph from explicit edges. Weights must be positive.
    pub fn from_edges(candidates: Vec<Candidate>, n: S, edges: Vec<Edge<S>>) -> Result<Self> {
        for e in &edges {
            if e.weight <= S::zero() || e.from == e.to {
                return Err(Error::InvalidArgument(
                    "edges need distinct ends and positive weight".into(),
                ));
            }
            if !candidates.contains(&e.from) || !candidates.contains(&e.to) {
                return Err(Error::UnknownCandidate(e.from.to_string()));
            }
        }
        let mut candidates = candidates;
        candidates.sort_unstable();
        Ok(PairwiseGraph { candidates, n, edges })
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn n(&self) -> &S {
        &self.n
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    /// δ_{A,B}: positive when A beats B head to head.
    pub fn margin(&self, a: Candidate, b: Candidate) -> S {
        for e in &self.edges {
            if e.from == a && e.to == b {
                return e.weight.clone();
            }
            if e.from == b && e.to == a {
                return S::zero() - e.weight.clone();
            }
        }
        S::zero()
    }

    /// Removes every edge whose weight equals the current minimum. Returns
    /// the removed weight, or `None` when the graph has no edges.
    pub fn remove_lightest(&mut self) -> Option<S> {
        let min = self
            .edges
            .iter()
            .map(|e| &e.weight)
            .fold(None::<&S>, |acc, w| match acc {
                Some(m) if m <= w => Some(m),
                _ => Some(w),
            })?;
        let min = min.clone();
        self.edges.retain(|e| e.weight != min);
        Some(min)
    }

    /// Writes the edge list as `from,to,weight` CSV with candidate names.
    pub fn write_edge_csv<W: Write>(&self, profile: &Profile<S>, mut out: W) -> std::io::Result<()> {
        writeln!(out, "from,to,weight")?;
        let mut edges: Vec<&Edge<S>> = self.edges.iter().collect();
        edges.sort_by_key(|e| (e.from, e.to));
        for e in edges {
            writeln!(out, "{},{},{}", profile.name(e.from), profile.name(e.to), e.weight)?;
        }
        Ok(())
    }
}

pub fn build_pwcg<S: Scalar>(p: &Profile<S>) -> PairwiseGraph<S> {
    PairwiseGraph::from_support(&SupportMatrix::new(p))
}

/// Kahn's algorithm. Among candidates with no remaining incoming edge the one
/// earliest in canonical order goes next. `None` iff the graph has a cycle.
pub fn topological_sort<S: Scalar>(g: &PairwiseGraph<S>) -> Option<Ranking> {
    let cands = g.candidates();
    let k = cands.len();
    let local = |c: Candidate| cands.binary_search(&c).expect("edge endpoint is a vertex");
    let mut indegree = vec![0usize; k];
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); k];
    for e in g.edges() {
        let (u, v) = (local(e.from), local(e.to));
        out_edges[u].push(v);
        indegree[v] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..k).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(u) = ready.pop_first() {
        order.push(cands[u]);
        for &v in &out_edges[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                ready.insert(v);
            }
        }
    }
    (order.len() == k).then(|| Ranking::from_order_unchecked(order))
}
