//! The generalized conditional utilitarian rule: welfare-maximal
//! proportional committees via min-cost max-flow on a dummy-voter network.
//!
//! Candidates are priced by approval-score rank (more approvals = cheaper), a
//! dummy voter tops the maximum flow up to total mass `k`, and a min-cost
//! maximum flow then fills cheap candidates first. With pairwise-distinct
//! costs the sink flows are unique, so the rule is well defined regardless of
//! how the solver breaks ties internally.

use crate::flownet::{self, network_representation, EntitlementNetwork};
use crate::rational::{rat_usize, sum, Rational};
use crate::{FractionalCommittee, Instance};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// The costed dummy-voter network of an instance.
///
/// The dummy voter's capacity is `k` minus the instance's max-flow value, and
/// candidate `r` in the score order (descending approval score, ties by
/// ascending index) costs `r + 1`.
#[derive(Debug, Clone)]
pub struct DummyNetwork {
    net: EntitlementNetwork,
    cost_order: Vec<usize>,
}

impl DummyNetwork {
    pub fn network(&self) -> &EntitlementNetwork {
        &self.net
    }

    /// Candidates by ascending cost.
    pub fn cost_order(&self) -> &[usize] {
        &self.cost_order
    }

    pub fn dummy_cap(&self) -> &Rational {
        self.net.dummy_cap().expect("dummy networks have a dummy")
    }

    pub fn cost_of(&self, c: usize) -> u64 {
        self.net.costs().expect("dummy networks have costs")[c]
    }

    /// Cumulative masses of a committee along the cost order; the rule's
    /// output dominates every proportional committee prefix-by-prefix.
    pub fn prefix_masses(&self, p: &FractionalCommittee) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.cost_order
            .iter()
            .map(|&c| {
                acc += p.get(c);
                acc.clone()
            })
            .collect()
    }
}

/// Builds the dummy network of an instance.
pub fn build_dummy_network(instance: &Instance) -> DummyNetwork {
    let net = network_representation(instance);
    let value = flownet::max_flow(&net, None)
        .expect("no warm start")
        .value();
    let dummy_cap = rat_usize(instance.k()) - value;
    assert!(
        dummy_cap >= Rational::zero(),
        "max flow value cannot exceed the committee size"
    );
    let scores = instance.approval_scores();
    let mut cost_order: Vec<usize> = (0..instance.m()).collect();
    cost_order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let mut costs = vec![0u64; instance.m()];
    for (rank, &c) in cost_order.iter().enumerate() {
        costs[c] = rank as u64 + 1;
    }
    let net = net
        .with_dummy(dummy_cap)
        .expect("capacity is nonnegative")
        .with_costs(costs)
        .expect("ranks are positive and distinct");
    DummyNetwork { net, cost_order }
}

/// The generalized conditional utilitarian rule.
pub fn gcut(instance: &Instance) -> FractionalCommittee {
    let dummy = build_dummy_network(instance);
    let flow = flownet::min_cost_max_flow(dummy.network()).expect("costs are attached");
    debug_assert_eq!(
        flow.value(),
        rat_usize(instance.k()),
        "the dummy voter tops the flow up to exactly k"
    );
    FractionalCommittee::new(flow.sink_flows().to_vec(), instance.k())
        .expect("a value-k flow on unit sink capacities is a fractional committee")
}

/// A seeded proportional committee: the committee of a max flow, topped up to
/// mass `k` by random assignment over unsaturated candidates. Always passes
/// the proportionality check; used as a comparison pool for welfare and
/// dominance properties.
pub fn sample_grp_committee(instance: &Instance, seed: u64) -> FractionalCommittee {
    let net = network_representation(instance);
    let flow = flownet::max_flow(&net, None).expect("no warm start");
    let mut probs = flow.sink_flows().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deficit = rat_usize(instance.k()) - sum(&probs);
    let mut attempts = 0usize;
    while !deficit.is_zero() {
        let open: Vec<usize> = (0..instance.m())
            .filter(|&c| probs[c] < Rational::one())
            .collect();
        assert!(
            !open.is_empty(),
            "mass below k leaves an unsaturated candidate"
        );
        attempts += 1;
        if attempts > 64 {
            // finish deterministically
            for &c in &open {
                let add = (Rational::one() - &probs[c]).min(deficit.clone());
                probs[c] += &add;
                deficit -= add;
                if deficit.is_zero() {
                    break;
                }
            }
            break;
        }
        let c = open[rng.random_range(0..open.len())];
        let headroom = (Rational::one() - &probs[c]).min(deficit.clone());
        let quarters = rng.random_range(1..=4u64);
        let add = headroom * Rational::new(quarters.into(), 4.into());
        probs[c] += &add;
        deficit -= add;
    }
    FractionalCommittee::new(probs, instance.k()).expect("top-up preserves validity")
}

/// Utility a voter is credited with under the excludable reading: only
/// candidates both truly approved and reported count.
pub fn excludable_utility(
    true_ballot: &BTreeSet<usize>,
    reported: &BTreeSet<usize>,
    p_reported: &FractionalCommittee,
) -> Rational {
    sum(true_ballot
        .intersection(reported)
        .map(|&c| p_reported.get(c)))
}
