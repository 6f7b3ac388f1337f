//! Real ward files in the position-column layout.

mod common;

use std::fs;

use axiometer::format::{parse_election_auto, write_election, ProfileFormat};
use axiometer::rules::{ScoringRule, Stv, StvConfig};
use axiometer::{parse_election, parse_profile, ExactElection, ExactProfile, VotingRule};
use common::{fixture, q};

fn load(name: &str) -> ExactElection {
    let text = fs::read_to_string(fixture(name)).unwrap();
    assert_eq!(ProfileFormat::detect(&text), ProfileFormat::PositionColumnsCsv);
    parse_election_auto(&text).unwrap()
}

#[test]
fn eilean_siar_ward_3() {
    let e = load("eilean_siar_2012_ward3.csv");
    let p = &e.profile;
    assert_eq!(e.seats, Some(3));
    assert_eq!(e.ward.as_deref(), Some("Na Hearadh Agus Ceann A Deas Nan Loch"));
    assert_eq!(
        p.roster().names(),
        [
            "Catherine Macdonald",
            "D J Macrae",
            "Philip Robert Mclean",
            "David Cameron Wilson"
        ]
    );
    // VoteKit's loader reports 57 distinct ballots of total weight 802
    assert_eq!(*p.n(), q(802, 1));
    assert_eq!(p.compressed().ballots().len(), 57);
}

#[test]
fn eilean_siar_stv_matches_votekit() {
    let e = load("eilean_siar_2012_ward3.csv");
    let r = Stv::new(StvConfig::droop(3).unwrap()).rank(&e.profile).unwrap();
    // VoteKit 3.5: Macdonald and Mclean in round 1, Wilson out, Macrae elected
    assert_eq!(r.numbered(), [1, 3, 2, 4]);
}

#[test]
fn wardy_sample() {
    let e = load("scot_wardy_mc_ward.csv");
    assert_eq!(e.seats, Some(1));
    assert_eq!(*e.profile.n(), q(146, 1));
    assert_eq!(e.profile.roster().names(), ["Paul", "George", "Ringo"]);
    let r = Stv::new(StvConfig::droop(1).unwrap()).rank(&e.profile).unwrap();
    assert_eq!(r.names(e.profile.roster()), ["Paul", "George", "Ringo"]);
}

#[test]
fn canonical_round_trip_of_real_data() {
    for name in ["eilean_siar_2012_ward3.csv", "scot_wardy_mc_ward.csv"] {
        let e = load(name);
        let mut buf = Vec::new();
        write_election(&e.profile, e.seats, &mut buf).unwrap();
        let back: ExactElection = parse_election(&buf[..], ProfileFormat::CanonicalCsv).unwrap();
        assert!(back.profile.same_ballots(&e.profile), "{name}");
        assert_eq!(back.seats, e.seats);
        assert_eq!(back.profile.n(), e.profile.n());
        assert_eq!(back.profile.m(), e.profile.m());
    }
}

#[test]
fn condensing_a_real_ward_keeps_n() {
    let e = load("eilean_siar_2012_ward3.csv");
    let p = &e.profile;
    for &c in p.candidates() {
        let pc = p.condense(c).unwrap();
        assert_eq!(pc.m(), 3);
        // recount from the file-derived ballots
        let recount = pc.ballots().iter().fold(q(0, 1), |acc, b| acc + b.weight().clone());
        assert_eq!(recount, q(802, 1));
        assert_eq!(pc.n(), p.n());
    }
}

#[test]
fn scoring_rules_run_on_real_data() {
    let e = load("eilean_siar_2012_ward3.csv");
    let scores = ScoringRule::plurality().scores(&e.profile);
    // first preferences read straight off the file
    let firsts: Vec<i64> = (1..=4)
        .map(|c| {
            fs::read_to_string(fixture("eilean_siar_2012_ward3.csv"))
                .unwrap()
                .lines()
                .skip(1)
                .filter(|l| !l.starts_with('"'))
                .filter_map(|l| {
                    let f: Vec<&str> = l.split(',').collect();
                    (f.len() > 1 && f[1] == c.to_string()).then(|| f[0].parse::<i64>().unwrap())
                })
                .sum()
        })
        .collect();
    assert_eq!(scores, firsts.iter().map(|&x| q(x, 1)).collect::<Vec<_>>());
}

#[test]
fn broken_scottish_files_report_lines() {
    let text = "2,1\n3,1,2\n4,3,1\n\"Candidate 1\",\"A\",\"X\"\n\"Candidate 2\",\"B\",\"Y\"\n\"Ward\",1\n";
    let err = parse_profile::<axiometer::Rational, _>(text.as_bytes(), ProfileFormat::PositionColumnsCsv).unwrap_err();
    assert_eq!(err.line(), Some(3));
    let dup = "2,1\n3,1,1\n\"Candidate 1\",\"A\",\"X\"\n\"Candidate 2\",\"B\",\"Y\"\n\"Ward\",1\n";
    let err = parse_profile::<axiometer::Rational, _>(dup.as_bytes(), ProfileFormat::PositionColumnsCsv).unwrap_err();
    assert_eq!(err.line(), Some(2));
    let ok: ExactProfile = parse_profile(
        "2,1\n3,1,0,0\n\"Candidate 1\",\"A\",\"X\"\n\"Candidate 2\",\"B\",\"Y\"\n\"Ward\",1\n".as_bytes(),
        ProfileFormat::PositionColumnsCsv,
    )
    .unwrap();
    assert_eq!(ok.ballots()[0].ranking().len(), 1);
}
