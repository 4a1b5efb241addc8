//! Fair probabilistic committee voting on approval ballots.
//!
//! The library computes fractional committees (per-candidate selection
//! probabilities summing to the committee size `k`) that give every group of
//! voters a proportional share of representation, using exact rational
//! arithmetic throughout. The machinery is built on a source → voters →
//! candidates → sink flow network:
//!
//! * [`flownet`] — exact-rational max-flow / min-cost max-flow on entitlement
//!   networks, with restriction, residual graphs, and a brute-force min-cut
//!   oracle for testing.
//! * [`axioms`] — checkers for group resource proportionality, group fair
//!   share, strong unanimous fair share, and proportional justified
//!   representation, each with violating-group witnesses.
//! * [`rut`] — the redistributive utilitarian rule: proportional and
//!   Pareto-efficient committees via score-ordered candidate insertion with
//!   flow rebalancing.
//! * [`gcut`] — the generalized conditional utilitarian rule: welfare-maximal
//!   proportional committees via a min-cost max-flow on a dummy-voter network.
//! * [`bbw`] — best-of-both-worlds pipeline: affordability certificates, the
//!   method of equal shares, flow completion, and lotteries whose every
//!   support committee contains a given affordable committee.
//! * [`lottery`] — decomposition of fractional committees into lotteries over
//!   integral committees with exact marginals, plus seeded sampling.
//!
//! All types are immutable after construction and all operations are pure, so
//! everything is safe to share across threads.

#![forbid(unsafe_code)]

pub mod axioms;
pub mod bbw;
mod error;
pub mod flownet;
pub mod gcut;
pub mod gen;
mod instance;
pub mod lottery;
pub mod rational;
pub mod rut;

pub use error::Error;
pub use instance::{
    lottery_marginals, utility, utility_profile, FractionalCommittee, Instance, Lottery,
    UtilityProfile,
};
pub use rational::Rational;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
