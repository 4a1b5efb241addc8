//! Cross-module invariants on randomized inputs: flow duality, min-cost
//! uniqueness and restriction, lottery identities, and witness soundness.

mod common;

use common::*;
use fairflow::axioms::{
    check_gfs, check_gfs_oracle, check_grp, check_grp_oracle, check_strong_ufs, coverage, grp_rhs,
};
use fairflow::flownet::{
    committee_of_flow, max_flow, min_cost_max_flow, min_cut_value_oracle, network_representation,
    residual, EntitlementNetwork, Flow,
};
use fairflow::gcut::{build_dummy_network, gcut};
use fairflow::lottery::{decompose, sample};
use fairflow::rational::{format_rational, parse_rational, rat, sum, Rational};
use fairflow::{lottery_marginals, utility, FractionalCommittee, Instance, Lottery};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

// ---------------------------------------------------------------------------
// proptest strategies
// ---------------------------------------------------------------------------

fn arb_lottery(m: usize) -> impl Strategy<Value = Lottery> {
    (1..=m)
        .prop_flat_map(move |k| {
            let committees = prop::collection::vec(
                prop::sample::subsequence((0..m).collect::<Vec<_>>(), k),
                1..5,
            );
            let weights = prop::collection::vec(1u32..20, 5);
            (committees, weights, Just(k))
        })
        .prop_map(|(committees, weights, _k)| {
            let total: u32 = weights.iter().take(committees.len()).sum();
            let entries = committees
                .into_iter()
                .zip(weights)
                .map(|(c, w)| {
                    (
                        rat(w as i64, total as i64),
                        c.into_iter().collect::<BTreeSet<usize>>(),
                    )
                })
                .collect();
            Lottery::new(entries).unwrap()
        })
}

fn arb_ballots(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(
        prop::collection::btree_set(0..m, 0..=m).prop_map(|s| s.into_iter().collect()),
        1..=n,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Expected utility under a lottery equals utility of its marginals.
    #[test]
    fn lottery_utilities_match_marginals(
        lottery in arb_lottery(5),
        ballots in arb_ballots(4, 5),
    ) {
        let k = lottery.k();
        let instance = Instance::new(5, k.max(1), ballots.iter().map(|b| b.iter().copied().collect()).collect()).unwrap();
        let p = lottery_marginals(&lottery, 5).unwrap();
        for i in 0..instance.n() {
            let direct: Rational = lottery
                .entries()
                .iter()
                .map(|(w, committee)| {
                    w * Rational::from_integer(
                        (committee.intersection(instance.ballot(i)).count() as i64).into(),
                    )
                })
                .sum();
            prop_assert_eq!(direct, utility(&instance, &p, i).unwrap());
        }
    }

    /// Decomposition reproduces marginals exactly and stays small.
    #[test]
    fn decompose_marginals_identity(lottery in arb_lottery(6)) {
        let p = lottery_marginals(&lottery, 6).unwrap();
        let rebuilt = decompose(&p, lottery.k()).unwrap();
        prop_assert_eq!(lottery_marginals(&rebuilt, 6).unwrap(), p);
        prop_assert!(rebuilt.support_size() <= 7);
    }

    /// Rationals round-trip through their string form.
    #[test]
    fn rational_string_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = rat(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

// ---------------------------------------------------------------------------
// flow duality and min-cost structure
// ---------------------------------------------------------------------------

#[test]
fn max_flow_value_equals_enumerated_min_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..150 {
        let instance = random_instance(&mut rng, 12, 7, 1000 + round);
        let net = network_representation(&instance);
        let flow = max_flow(&net, None).unwrap();
        assert_eq!(
            flow.value(),
            min_cut_value_oracle(&net).unwrap(),
            "duality gap on {instance:?}"
        );
        // capped variant
        let p = random_committee(instance.m(), instance.k(), 5000 + round);
        let capped = net.clone().with_sink_caps(p.probs().to_vec()).unwrap();
        let flow = max_flow(&capped, None).unwrap();
        assert_eq!(flow.value(), min_cut_value_oracle(&capped).unwrap());
        // dummy variant
        let dummy = build_dummy_network(&instance);
        let flow = max_flow(dummy.network(), None).unwrap();
        assert_eq!(flow.value(), min_cut_value_oracle(dummy.network()).unwrap());
    }
}

#[test]
fn residual_of_max_flow_never_augments() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for round in 0..100 {
        let instance = random_instance(&mut rng, 10, 7, 2000 + round);
        let net = network_representation(&instance);
        let flow = max_flow(&net, None).unwrap();
        let res = residual(&net, &flow).unwrap();
        assert_eq!(res.shortest_augmenting_path_len(), None);
    }
}

/// Independent route to the min-cost sink flows: the mass on the cheapest
/// `ℓ` candidates of a min-cost max flow equals the max-flow value of the
/// network restricted to them, for every `ℓ`. Successive differences pin
/// every sink flow without running the cost-aware solver.
fn mcmf_sink_oracle(net: &EntitlementNetwork, cost_order: &[usize]) -> Vec<Rational> {
    let mut kept: BTreeSet<usize> = BTreeSet::new();
    let mut previous = Rational::zero();
    let mut sink = vec![Rational::zero(); net.m()];
    for &c in cost_order {
        kept.insert(c);
        let value = max_flow(&net.restrict(&kept), None).unwrap().value();
        sink[c] = &value - &previous;
        previous = value;
    }
    sink
}

#[test]
fn min_cost_sink_flows_match_prefix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..120 {
        let instance = random_instance(&mut rng, 9, 7, 3000 + round);
        let dummy = build_dummy_network(&instance);
        let flow = min_cost_max_flow(dummy.network()).unwrap();
        let expected = mcmf_sink_oracle(dummy.network(), dummy.cost_order());
        assert_eq!(flow.sink_flows(), expected.as_slice(), "on {instance:?}");
    }
}

#[test]
fn min_cost_sink_flows_ignore_arc_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for round in 0..60 {
        let instance = random_instance(&mut rng, 9, 7, 4000 + round);
        let dummy = build_dummy_network(&instance);
        let baseline = min_cost_max_flow(dummy.network()).unwrap();
        for shuffle_seed in [7u64, 999] {
            let shuffled = dummy.network().clone().with_arc_shuffle(shuffle_seed);
            let flow = min_cost_max_flow(&shuffled).unwrap();
            assert_eq!(flow.sink_flows(), baseline.sink_flows());
        }
    }
}

#[test]
fn min_cost_flow_restricts_to_min_cost_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for round in 0..60 {
        let instance = random_instance(&mut rng, 8, 6, 5000 + round);
        let dummy = build_dummy_network(&instance);
        let flow = min_cost_max_flow(dummy.network()).unwrap();
        let mut kept: BTreeSet<usize> = BTreeSet::new();
        for &c in dummy.cost_order() {
            kept.insert(c);
            let subnet = dummy.network().restrict(&kept);
            let restricted = flow.restrict(&kept);
            subnet.check_feasible(&restricted).unwrap();
            let recomputed = min_cost_max_flow(&subnet).unwrap();
            assert_eq!(
                restricted.value(),
                recomputed.value(),
                "restriction lost maximality"
            );
            assert_eq!(restricted.sink_flows(), recomputed.sink_flows());
        }
    }
}

#[test]
fn committee_of_flow_is_bounded_by_caps() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for round in 0..50 {
        let instance = random_instance(&mut rng, 10, 7, 6000 + round);
        let net = network_representation(&instance);
        let flow = max_flow(&net, None).unwrap();
        let p = committee_of_flow(&net, &flow).unwrap();
        for value in &p {
            assert!(value >= &Rational::zero() && value <= &rat(1, 1));
        }
        assert!(sum(&p) <= Rational::from_integer(instance.k().into()));
    }
}

// ---------------------------------------------------------------------------
// axiom checkers against their definitional oracles
// ---------------------------------------------------------------------------

#[test]
fn grp_rhs_agrees_with_subnetwork_flow() {
    // the enumerated right-hand side equals the group's own max-flow value
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for round in 0..60 {
        let instance = random_instance(&mut rng, 10, 6, 7000 + round);
        let group: BTreeSet<usize> = (0..instance.n()).filter(|_| round % 2 == 0).collect();
        let net = network_representation(&instance).restrict_voters(&group);
        let value = max_flow(&net, None).unwrap().value();
        assert_eq!(grp_rhs(&instance, &group).unwrap(), value);
    }
}

#[test]
fn witnesses_revalidate_against_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut grp_violations = 0;
    let mut gfs_violations = 0;
    for round in 0..200 {
        let instance = random_instance(&mut rng, 10, 6, 8000 + round);
        let p = random_committee(instance.m(), instance.k(), 9000 + round);
        let grp = check_grp(&instance, &p).unwrap();
        if let Some(witness) = &grp.witness {
            grp_violations += 1;
            assert!(
                coverage(&instance, &p, witness) < grp_rhs(&instance, witness).unwrap(),
                "witness fails to violate the proportionality bound"
            );
        }
        let gfs = check_gfs(&instance, &p).unwrap();
        if let Some(witness) = &gfs.witness {
            gfs_violations += 1;
            let bound: Rational = witness
                .iter()
                .map(|&i| {
                    rat(
                        instance.ballot(i).len().min(instance.k()) as i64,
                        instance.n() as i64,
                    )
                })
                .sum();
            assert!(coverage(&instance, &p, witness) < bound);
        }
        let ufs = check_strong_ufs(&instance, &p).unwrap();
        if let Some(witness) = &ufs.witness {
            let ballot = instance.ballot(*witness.iter().next().unwrap());
            let cov = sum(ballot.iter().map(|&c| p.get(c)));
            let bound = (Rational::from_integer((witness.len() * instance.k()).into())
                / Rational::from_integer((instance.n() as i64).into()))
            .min(Rational::from_integer((ballot.len() as i64).into()));
            assert!(cov < bound);
        }
    }
    assert!(
        grp_violations > 20,
        "suite needs real violations to be meaningful"
    );
    assert!(
        gfs_violations > 5,
        "suite needs real violations to be meaningful"
    );
}

#[test]
fn checker_and_oracle_verdicts_coincide_on_focus_instances() {
    // spot agreement here; the full counted sweep lives in the acceptance gate
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for round in 0..80 {
        let instance = random_instance(&mut rng, 9, 6, 10_000 + round);
        let p = random_committee(instance.m(), instance.k(), 11_000 + round);
        assert_eq!(
            check_grp(&instance, &p).unwrap().satisfied,
            check_grp_oracle(&instance, &p).unwrap().satisfied
        );
        assert_eq!(
            check_gfs(&instance, &p).unwrap().satisfied,
            check_gfs_oracle(&instance, &p).unwrap().satisfied
        );
    }
}

// ---------------------------------------------------------------------------
// rule-level structure
// ---------------------------------------------------------------------------

#[test]
fn gcut_dummy_flow_dominates_plain_min_cost_flow() {
    // the dummy voter only ever adds mass on top of what the plain network
    // already routes
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for round in 0..60 {
        let instance = random_instance(&mut rng, 8, 6, 12_000 + round);
        let dummy = build_dummy_network(&instance);
        let with_dummy = min_cost_max_flow(dummy.network()).unwrap();
        let costs: Vec<u64> = (0..instance.m()).map(|c| dummy.cost_of(c)).collect();
        let plain = network_representation(&instance).with_costs(costs).unwrap();
        let without = min_cost_max_flow(&plain).unwrap();
        for c in 0..instance.m() {
            assert!(with_dummy.sink_flow(c) >= without.sink_flow(c));
        }
    }
}

#[test]
fn gcut_superset_reports_never_help() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for round in 0..120 {
        let instance = random_instance(&mut rng, 7, 6, 13_000 + round);
        let voter = rng.random_range(0..instance.n());
        let mut superset = instance.ballot(voter).clone();
        for c in 0..instance.m() {
            if rng.random_range(0..2) == 0 {
                superset.insert(c);
            }
        }
        let misreported = instance.with_ballot(voter, superset).unwrap();
        let honest = utility(&instance, &gcut(&instance), voter).unwrap();
        let inflated = utility(&instance, &gcut(&misreported), voter).unwrap();
        assert!(
            inflated <= honest,
            "superset report raised true utility on {instance:?} voter {voter}"
        );
    }
}

#[test]
fn sampling_respects_weights_on_seeded_draws() {
    let lottery = Lottery::new(vec![
        (rat(1, 4), BTreeSet::from([0, 1])),
        (rat(3, 4), BTreeSet::from([0, 2])),
    ])
    .unwrap();
    let heavy: BTreeSet<usize> = [0, 2].into();
    let hits = (0..10_000u64)
        .filter(|&seed| sample(&lottery, seed) == heavy)
        .count();
    let freq = hits as f64 / 10_000.0;
    assert!(
        (freq - 0.75).abs() < 0.02,
        "frequency {freq} too far from 3/4"
    );
}

#[test]
fn empty_ballots_pass_through_every_rule() {
    // an empty-ballot voter and a zero-score candidate go through every rule
    let instance = inst(3, 2, &[&[], &[0, 1], &[1]]);
    let p = fairflow::rut::rut(&instance);
    assert_eq!(p.sum(), Rational::from_integer(2.into()));
    let q = gcut(&instance);
    assert_eq!(q.sum(), Rational::from_integer(2.into()));
    assert!(check_grp(&instance, &p).unwrap().satisfied);
    assert!(check_grp(&instance, &q).unwrap().satisfied);
}

#[test]
fn warm_started_flow_dominates_on_every_sink_arc() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for round in 0..60 {
        let instance = random_instance(&mut rng, 9, 6, 14_000 + round);
        let net = network_representation(&instance);
        // a partial flow: route a random fraction of each voter's entitlement
        // to their first approved candidate
        let mut warm = Flow::zero(&net);
        for i in 0..instance.n() {
            if let Some(&c) = instance.ballot(i).iter().next() {
                if rng.random_range(0..2) == 0 {
                    let fraction = rat(1, 2) * net.entitlement(i);
                    warm.apply_residual_arc(
                        fairflow::flownet::Node::Source,
                        fairflow::flownet::Node::Voter(i),
                        &fraction,
                    );
                    warm.apply_residual_arc(
                        fairflow::flownet::Node::Voter(i),
                        fairflow::flownet::Node::Candidate(c),
                        &fraction,
                    );
                    warm.apply_residual_arc(
                        fairflow::flownet::Node::Candidate(c),
                        fairflow::flownet::Node::Sink,
                        &fraction,
                    );
                }
            }
        }
        // cap any oversubscribed sink arc back to feasibility
        if net.check_feasible(&warm).is_err() {
            continue;
        }
        let completed = max_flow(&net, Some(&warm)).unwrap();
        for c in 0..instance.m() {
            assert!(completed.sink_flow(c) >= warm.sink_flow(c));
        }
    }
}

#[test]
fn indicator_round_trip_through_decomposition() {
    let members: BTreeSet<usize> = [1, 3].into();
    let p = FractionalCommittee::indicator(&members, 5).unwrap();
    let lottery = decompose(&p, 2).unwrap();
    assert_eq!(lottery.entries().len(), 1);
    assert_eq!(lottery.entries()[0].1, members);
}
