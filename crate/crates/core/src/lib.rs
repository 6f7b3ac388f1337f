//! Ranked-ballot analysis: profiles with partial ballots, positional rules
//! and STV, the removal-stability and majoritarian scores, the greedy rule
//! that maximises the latter, Bradley–Terry synthetic profiles and a voter
//! bootstrap.
//!
//! All computation is generic over [`Scalar`]. [`Rational`] is the default
//! and keeps tie detection exact.
//!
//! ```
//! use axiometer::{ExactProfile, metrics, rules::ScoringRule};
//!
//! let p = ExactProfile::from_names(
//!     &["A", "B", "C"],
//!     &[(3, &["A", "B", "C"]), (2, &["B", "C", "A"]), (2, &["C", "B", "A"])],
//! )
//! .unwrap();
//! let score = metrics::sigma_iia(&ScoringRule::plurality(), &p).unwrap();
//! assert_eq!(score.sigma_iia.to_string(), "1/3");
//! ```

pub mod ballots;
pub mod error;
pub mod format;
pub mod metrics;
pub mod optimizer;
pub mod pairwise;
pub mod report;
pub mod rules;
pub mod scalar;
pub mod stats;
pub mod synth;

pub use ballots::{condense_profile, condense_ranking, Ballot, Candidate, CandidateRoster, Profile, Ranking};
pub use error::{Error, Result};
pub use format::{parse_election, parse_election_auto, parse_profile, write_profile, Election, ProfileFormat};
pub use metrics::{evaluate, evaluate_all, sigma_iia, sigma_u, swap_distance, MetricReport};
pub use optimizer::{brute_force_optimal, optimal_u_rule, OptimalU};
pub use pairwise::{build_pwcg, misalignment, topological_sort, PairwiseGraph};
pub use rules::{rule_by_name, DynRule, VotingRule};
pub use scalar::Scalar;

/// Exact arbitrary-precision rational, the default scalar.
pub type Rational = num_rational::BigRational;

pub type ExactProfile = Profile<Rational>;
pub type FloatProfile = Profile<f64>;
pub type ExactElection = Election<Rational>;
pub type ExactReport = MetricReport<Rational>;
