//! Swap distance and the two relaxed axioms: stability under candidate
//! removal (`sigma_iia`) and majoritarian alignment (`sigma_u`).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ballots::{Candidate, Profile, Ranking};
use crate::error::{Error, Result};
use crate::pairwise::SupportMatrix;
use crate::rules::VotingRule;
use crate::scalar::Scalar;

/// Kendall tau distance: pairs the two rankings order differently.
pub fn swap_distance(r1: &Ranking, r2: &Ranking) -> Result<u64> {
    let (a, b) = (r1.order(), r2.order());
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(Error::RosterMismatch);
    }
    let size = sa.last().map_or(0, |c| c.index() + 1);
    let pos = r2.position_table(size);
    // inversions of r1 read through r2's positions
    let seq: Vec<usize> = a.iter().map(|c| pos[c.index()]).collect();
    let mut count = 0u64;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            if seq[i] > seq[j] {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Maps the worst alignment M to the score: M/(1-M) below one half, else 1.
pub fn u_transform<S: Scalar>(m: S) -> S {
    if m < S::half() {
        m.clone() / (S::one() - m)
    } else {
        S::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IiaScore<S> {
    pub sigma_iia: S,
    /// d_swap(f(P^C), f(P)^C) for each removed candidate C.
    pub per_candidate_swaps: BTreeMap<Candidate, u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UScore<S> {
    pub sigma_u: S,
    /// The raw worst alignment M.
    pub m_value: S,
}

/// Both scores for one rule on one profile.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport<S> {
    pub rule_name: String,
    pub ranking: Ranking,
    pub sigma_iia: S,
    pub sigma_u: S,
    pub m_value: S,
    pub per_candidate_swaps: BTreeMap<Candidate, u64>,
}

/// The removal score for a rule whose output on `p` is already known.
pub fn sigma_iia_with<S: Scalar, R: VotingRule<S> + ?Sized>(
    rule: &R,
    p: &Profile<S>,
    full: &Ranking,
) -> Result<IiaScore<S>> {
    let m = p.m();
    if m < 2 {
        return Ok(IiaScore {
            sigma_iia: S::one(),
            per_candidate_swaps: BTreeMap::new(),
        });
    }
    let swaps = p
        .candidates()
        .par_iter()
        .map(|&c| {
            let condensed = p.condense(c)?;
            let out = rule.rank(&condensed)?;
            check_complete(&out, &condensed)?;
            Ok((c, swap_distance(&out, &full.condense(c)?)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let sigma_iia = if m <= 2 {
        S::one()
    } else {
        let total: u64 = swaps.values().sum();
        let pairs = ((m - 1) * (m - 2) / 2) as u64;
        S::one() - S::from_u64(total) / S::from_u64(m as u64 * pairs)
    };
    Ok(IiaScore {
        sigma_iia,
        per_candidate_swaps: swaps,
    })
}

pub fn sigma_iia<S: Scalar, R: VotingRule<S> + ?Sized>(rule: &R, p: &Profile<S>) -> Result<IiaScore<S>> {
    let full = rule.rank(p)?;
    check_complete(&full, p)?;
    sigma_iia_with(rule, p, &full)
}

/// The majoritarian score of a given output ranking.
pub fn sigma_u_of<S: Scalar>(p: &Profile<S>, out: &Ranking) -> Result<UScore<S>> {
    let m_value = SupportMatrix::new(p).misalignment(out)?;
    Ok(UScore {
        sigma_u: u_transform(m_value.clone()),
        m_value,
    })
}

pub fn sigma_u<S: Scalar, R: VotingRule<S> + ?Sized>(rule: &R, p: &Profile<S>) -> Result<UScore<S>> {
    sigma_u_of(p, &rule.rank(p)?)
}

/// Both scores, with errors attributed to the rule.
pub fn evaluate<S: Scalar, R: VotingRule<S> + ?Sized>(rule: &R, p: &Profile<S>) -> Result<MetricReport<S>> {
    let name = rule.name();
    let inner = || -> Result<MetricReport<S>> {
        if p.m() < 2 {
            return Err(Error::InvalidArgument("scores need at least two candidates".into()));
        }
        let ranking = rule.rank(p)?;
        check_complete(&ranking, p)?;
        let iia = sigma_iia_with(rule, p, &ranking)?;
        let u = sigma_u_of(p, &ranking)?;
        Ok(MetricReport {
            rule_name: name.clone(),
            ranking,
            sigma_iia: iia.sigma_iia,
            sigma_u: u.sigma_u,
            m_value: u.m_value,
            per_candidate_swaps: iia.per_candidate_swaps,
        })
    };
    inner().map_err(|e| e.in_rule(&name))
}

/// One report per rule, sorted by rule name.
pub fn evaluate_all<S: Scalar, R: VotingRule<S>>(rules: &[R], p: &Profile<S>) -> Result<Vec<MetricReport<S>>> {
    let mut reports = rules
        .par_iter()
        .map(|rule| evaluate(rule, p))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.rule_name.cmp(&b.rule_name));
    Ok(reports)
}

fn check_complete<S: Scalar>(r: &Ranking, p: &Profile<S>) -> Result<()> {
    if r.is_complete_for(p) {
        Ok(())
    } else {
        Err(Error::RosterMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{standard_rules, Dictatorship, ReversalOf, ReverseWhenCondensed, ScoringRule, Stv, StvConfig};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ranking(p: &Profile<Rational>, names: &[&str]) -> Ranking {
        Ranking::from_names(p.roster(), names).unwrap()
    }

    fn plurality_example() -> Profile<Rational> {
        Profile::from_names(
            &["A", "B", "C"],
            &[(3, &["A", "B", "C"]), (2, &["B", "C", "A"]), (2, &["C", "B", "A"])],
        )
        .unwrap()
    }

    fn cycle() -> Profile<Rational> {
        Profile::from_names(
            &["A", "B", "C"],
            &[(1, &["A", "B", "C"]), (1, &["B", "C", "A"]), (1, &["C", "A", "B"])],
        )
        .unwrap()
    }

    #[test]
    fn swap_distance_examples() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C", "D"], &[(1, &[])]).unwrap();
        let abcd = ranking(&p, &["A", "B", "C", "D"]);
        assert_eq!(swap_distance(&abcd, &abcd).unwrap(), 0);
        assert_eq!(swap_distance(&abcd, &abcd.reversed()).unwrap(), 6);
        assert_eq!(
            swap_distance(&ranking(&p, &["A", "B", "C"]), &ranking(&p, &["B", "A", "C"])).unwrap(),
            1
        );
        assert!(swap_distance(&abcd, &ranking(&p, &["A", "B", "C"])).is_err());
        assert!(swap_distance(&ranking(&p, &["A", "B"]), &ranking(&p, &["A", "C"])).is_err());
    }

    #[test]
    fn plurality_removal_score_is_one_third() {
        let p = plurality_example();
        let score = sigma_iia(&ScoringRule::plurality(), &p).unwrap();
        assert_eq!(score.sigma_iia, q(1, 3));
        let swaps: Vec<u64> = score.per_candidate_swaps.values().copied().collect();
        assert_eq!(swaps, [0, 1, 1]);
    }

    #[test]
    fn any_output_on_the_cycle_scores_one_half() {
        let p = cycle();
        let mut perm = p.candidates().to_vec();
        loop {
            let r = Ranking::new(perm.clone()).unwrap();
            let u = sigma_u_of(&p, &r).unwrap();
            assert_eq!(u.m_value, q(1, 3));
            assert_eq!(u.sigma_u, q(1, 2));
            if !crate::optimizer::next_permutation(&mut perm) {
                break;
            }
        }
    }

    #[test]
    fn reversing_a_unanimous_profile_scores_zero() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C"], &[(4, &["A", "B", "C"])]).unwrap();
        let u = sigma_u(&ReversalOf::new(ScoringRule::borda()), &p).unwrap();
        assert_eq!(u.sigma_u, q(0, 1));
        assert_eq!(sigma_u(&ScoringRule::borda(), &p).unwrap().sigma_u, q(1, 1));
    }

    #[test]
    fn dictatorship_and_crafted_reversal_hit_the_endpoints() {
        let p: Profile<Rational> = Profile::from_names(
            &["A", "B", "C", "D"],
            &[(2, &["B", "D"]), (1, &["A", "C", "D", "B"]), (3, &["D"])],
        )
        .unwrap();
        assert_eq!(sigma_iia(&Dictatorship::new(2), &p).unwrap().sigma_iia, q(1, 1));
        let crafted = ReverseWhenCondensed::new(Dictatorship::new(2), 4);
        let score = sigma_iia(&crafted, &p).unwrap();
        assert_eq!(score.sigma_iia, q(0, 1));
        assert!(score.per_candidate_swaps.values().all(|&s| s == 3));
    }

    #[test]
    fn two_candidates_score_one() {
        let p: Profile<Rational> = Profile::from_names(&["A", "B"], &[(2, &["B"]), (1, &["A"])]).unwrap();
        let score = sigma_iia(&ScoringRule::plurality(), &p).unwrap();
        assert_eq!(score.sigma_iia, q(1, 1));
        assert_eq!(score.per_candidate_swaps.len(), 2);
    }

    #[test]
    fn partial_ballots_with_abstentions() {
        // B over A for nobody, but one voter lists neither: not unanimous
        let p: Profile<Rational> = Profile::from_names(&["A", "B", "C"], &[(3, &["A", "B"]), (1, &["C"])]).unwrap();
        let u = sigma_u_of(&p, &ranking(&p, &["B", "A", "C"])).unwrap();
        assert_eq!(u.m_value, q(1, 8));
        assert_eq!(u.sigma_u, q(1, 7));
    }

    #[test]
    fn evaluate_all_sorts_and_attributes() {
        let p = plurality_example();
        let rules = standard_rules::<Rational>(1).unwrap();
        let reports = evaluate_all(&rules, &p).unwrap();
        let names: Vec<&str> = reports.iter().map(|r| r.rule_name.as_str()).collect();
        assert_eq!(names, ["2-approval", "3-approval", "borda", "plurality", "stv:k=1"]);
        for r in &reports {
            assert!(r.sigma_iia >= q(0, 1) && r.sigma_iia <= q(1, 1));
            assert!(r.sigma_u >= q(0, 1) && r.sigma_u <= q(1, 1));
        }
        assert!(evaluate_all::<Rational, Box<dyn VotingRule<Rational>>>(&[], &p)
            .unwrap()
            .is_empty());

        let bad: Vec<Box<dyn VotingRule<Rational>>> = vec![Box::new(Stv::new(StvConfig::droop(3).unwrap()))];
        let small: Profile<Rational> = Profile::from_names(&["A", "B"], &[(1, &["A"])]).unwrap();
        match evaluate_all(&bad, &small) {
            Err(Error::Rule { rule, .. }) => assert_eq!(rule, "stv:k=3"),
            other => panic!("{other:?}"),
        }
    }
}
