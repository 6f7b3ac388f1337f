//! The greedy rule that maximises the majoritarian score, its margin-based
//! shortcut, and an exhaustive oracle for small profiles.

use crate::ballots::{Candidate, Profile, Ranking};
use crate::error::{Error, Result};
use crate::metrics::u_transform;
use crate::pairwise::{build_pwcg, topological_sort, PairwiseGraph, SupportMatrix};
use crate::rules::VotingRule;
use crate::scalar::Scalar;

/// Drop every lightest edge until the graph sorts, then sort it.
#[derive(Clone, Copy, Debug, Default)]
pub struct OptimalU;

impl<S: Scalar> VotingRule<S> for OptimalU {
    fn name(&self) -> String {
        "optimal-u".into()
    }

    fn rank(&self, p: &Profile<S>) -> Result<Ranking> {
        Ok(optimal_u_rule(p))
    }
}

pub fn optimal_u_rule<S: Scalar>(p: &Profile<S>) -> Ranking {
    optimal_u_from_graph(build_pwcg(p)).0
}

/// Runs the deletion loop on `g`. Also returns the number of deletion rounds.
pub fn optimal_u_from_graph<S: Scalar>(mut g: PairwiseGraph<S>) -> (Ranking, usize) {
    let mut rounds = 0;
    loop {
        if let Some(r) = topological_sort(&g) {
            return (r, rounds);
        }
        g.remove_lightest().expect("an edgeless graph always sorts");
        rounds += 1;
    }
}

/// Graph edges that point against a ranking.
#[derive(Clone, Debug, PartialEq)]
pub struct DisagreementSet<S> {
    /// (winner, loser) of each disagreeing edge.
    pub pairs: Vec<(Candidate, Candidate)>,
    pub max_disagreeing_margin: Option<S>,
}

impl<S> DisagreementSet<S> {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn disagreement_set<S: Scalar>(g: &PairwiseGraph<S>, r: &Ranking) -> Result<DisagreementSet<S>> {
    let mut sorted = r.order().to_vec();
    sorted.sort_unstable();
    if sorted != g.candidates() {
        return Err(Error::RosterMismatch);
    }
    let mut pairs = Vec::new();
    let mut max: Option<S> = None;
    for e in g.edges() {
        if r.prefers(e.to, e.from) {
            pairs.push((e.from, e.to));
            if max.as_ref().is_none_or(|m| e.weight > *m) {
                max = Some(e.weight.clone());
            }
        }
    }
    pairs.sort_unstable();
    Ok(DisagreementSet {
        pairs,
        max_disagreeing_margin: max,
    })
}

/// h(x) = 1/2 - x/(2n).
pub fn margin_to_alignment<S: Scalar>(x: &S, n: &S) -> S {
    S::half() - x.clone() / (S::from_u64(2) * n.clone())
}

/// g(x) = x/(1 - x).
pub fn odds<S: Scalar>(x: &S) -> S {
    x.clone() / (S::one() - x.clone())
}

/// The majoritarian score from the largest disagreeing margin alone.
/// Agrees with the definition when every ballot is complete.
pub fn sigma_u_via_margins<S: Scalar>(g: &PairwiseGraph<S>, r: &Ranking) -> Result<S> {
    Ok(match disagreement_set(g, r)?.max_disagreeing_margin {
        None => S::one(),
        Some(x) => odds(&margin_to_alignment(&x, g.n())),
    })
}

/// Largest profile size `brute_force_optimal` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Tries every ranking. Returns the first maximiser in lexicographic
/// canonical order and its score.
pub fn brute_force_optimal<S: Scalar>(p: &Profile<S>) -> Result<(Ranking, S)> {
    let m = p.m();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "brute force is limited to {BRUTE_FORCE_LIMIT} candidates, got {m}"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("need at least two candidates".into()));
    }
    let support = SupportMatrix::new(p);
    let mut perm: Vec<Candidate> = p.candidates().to_vec();
    let mut best: Option<(Vec<Candidate>, S)> = None;
    loop {
        let r = Ranking::from_order_unchecked(perm.clone());
        let value = u_transform(support.misalignment(&r)?);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((perm.clone(), value));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (order, value) = best.expect("at least one ranking");
    Ok((Ranking::from_order_unchecked(order), value))
}

/// Advances to the next permutation in lexicographic order.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::sigma_u;
    use crate::pairwise::Edge;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn cycle() -> Profile<Rational> {
        Profile::from_names(
            &["A", "B", "C"],
            &[(1, &["A", "B", "C"]), (1, &["B", "C", "A"]), (1, &["C", "A", "B"])],
        )
        .unwrap()
    }

    // A>B by 5, B>C by 3, C>A by 1 over nine voters.
    fn gadget() -> Profile<Rational> {
        Profile::from_names(
            &["A", "B", "C"],
            &[(4, &["A", "B", "C"]), (2, &["B", "C", "A"]), (3, &["C", "A", "B"])],
        )
        .unwrap()
    }

    #[test]
    fn cycle_loses_every_edge_at_once() {
        let p = cycle();
        let (r, rounds) = optimal_u_from_graph(build_pwcg(&p));
        assert_eq!(rounds, 1);
        assert_eq!(r.names(p.roster()), ["A", "B", "C"]);
        assert_eq!(sigma_u(&OptimalU, &p).unwrap().sigma_u, q(1, 2));
    }

    #[test]
    fn gadget_keeps_heavy_edges() {
        let p = gadget();
        let g = build_pwcg(&p);
        let [a, b, c] = [0, 1, 2].map(Candidate::new);
        assert_eq!(g.margin(a, b), q(5, 1));
        assert_eq!(g.margin(b, c), q(3, 1));
        assert_eq!(g.margin(c, a), q(1, 1));
        let r = optimal_u_rule(&p);
        assert_eq!(r.names(p.roster()), ["A", "B", "C"]);
        assert_eq!(sigma_u_via_margins(&g, &r).unwrap(), q(4, 5));
        assert_eq!(sigma_u(&OptimalU, &p).unwrap().sigma_u, q(4, 5));
        let (best, value) = brute_force_optimal(&p).unwrap();
        assert_eq!(value, q(4, 5));
        assert_eq!(best, r);
    }

    #[test]
    fn disagreements_of_the_cycle() {
        let p = cycle();
        let g = build_pwcg(&p);
        let mut perm = p.candidates().to_vec();
        let mut sizes = Vec::new();
        loop {
            let r = Ranking::new(perm.clone()).unwrap();
            let d = disagreement_set(&g, &r).unwrap();
            assert_eq!(d.max_disagreeing_margin, Some(q(1, 1)));
            sizes.push(d.pairs.len());
            if !next_permutation(&mut perm) {
                break;
            }
        }
        // rotations of the cycle break one edge, the mirrored orders break two
        assert_eq!(sizes, [1, 2, 2, 1, 1, 2]);
    }

    #[test]
    fn reversed_sort_disagrees_everywhere() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C", "D"], &[(3, &["A", "B", "C", "D"])]).unwrap();
        let g = build_pwcg(&p);
        let r = topological_sort(&g).unwrap();
        assert!(disagreement_set(&g, &r).unwrap().is_empty());
        assert_eq!(sigma_u_via_margins(&g, &r).unwrap(), q(1, 1));
        let d = disagreement_set(&g, &r.reversed()).unwrap();
        assert_eq!(d.pairs.len(), 6);
        assert_eq!(d.max_disagreeing_margin, Some(q(3, 1)));
        assert_eq!(sigma_u_via_margins(&g, &r.reversed()).unwrap(), q(0, 1));
    }

    #[test]
    fn margin_transform_endpoints() {
        let n = q(9, 1);
        assert_eq!(odds(&margin_to_alignment(&q(0, 1), &n)), q(1, 1));
        assert_eq!(odds(&margin_to_alignment(&n, &n)), q(0, 1));
        assert_eq!(odds(&margin_to_alignment(&q(1, 1), &n)), q(4, 5));
    }

    #[test]
    fn explicit_graph_deletion_rounds() {
        let [a, b, c, d] = [0, 1, 2, 3].map(Candidate::new);
        let e = |from, to, w: i64| Edge {
            from,
            to,
            weight: q(w, 1),
        };
        // two cycles with different lightest edges: two rounds
        let g = PairwiseGraph::from_edges(
            vec![a, b, c, d],
            q(10, 1),
            vec![e(a, b, 5), e(b, c, 4), e(c, a, 2), e(c, d, 6), e(d, b, 3)],
        )
        .unwrap();
        let (r, rounds) = optimal_u_from_graph(g);
        assert_eq!(rounds, 2);
        assert_eq!(r.order(), &[a, b, c, d]);
    }

    #[test]
    fn brute_force_guard() {
        let names: Vec<String> = (0..9).map(|i| format!("C{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let p: Profile<Rational> = Profile::from_names(&refs, &[(1, &["C0"])]).unwrap();
        assert!(brute_force_optimal(&p).is_err());
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut v = vec![1, 2, 3];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], [1, 3, 2]);
        assert_eq!(seen[5], [3, 2, 1]);
    }
}
