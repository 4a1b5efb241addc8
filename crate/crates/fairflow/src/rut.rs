//! The redistributive utilitarian rule: proportional and Pareto-efficient
//! fractional committees.
//!
//! The rule grows a subnetwork one candidate at a time in order of weighted
//! approval score, keeps a maximum flow on the subnetwork, and after every
//! recomputation redistributes flow around residual cycles so that no voter's
//! source arc is saturated while they still approve an uninserted candidate.
//! Voters whose entitlement is exhausted stop gaining weight; everyone else's
//! weight rises uniformly until the next candidate's score reaches the
//! ceiling. The final weights certify Pareto efficiency: the output maximizes
//! the λ-weighted utilitarian welfare.

use crate::flownet::{self, network_representation, EntitlementNetwork, Flow, Node};
use crate::rational::{rat_usize, sum, Rational};
use crate::{FractionalCommittee, Instance, Result};
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// Final per-voter weights of a run, with the saturation flags and the score
/// ceiling that gated candidate insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightState {
    /// Per-voter weights; start at 1 and only grow.
    pub lambda: Vec<Rational>,
    /// Voters whose source arc ended saturated (or who approve nothing).
    pub frozen: Vec<bool>,
    /// The initial maximum score; uninserted candidates never exceed it.
    pub s_star: Rational,
}

/// One main-loop round: which candidate was inserted, the subnetwork after
/// insertion, and the rebalanced max flow on it.
#[derive(Debug, Clone)]
pub struct RutRound {
    pub inserted: usize,
    pub committee: BTreeSet<usize>,
    pub flow: Flow,
    pub rebalance_pushes: usize,
}

/// Full trace of a run, for auditing the flow and weight invariants.
#[derive(Debug, Clone)]
pub struct RutTrace {
    pub rounds: Vec<RutRound>,
    pub weights: WeightState,
}

/// Maximum flow on the subnetwork of `keep`, rebalanced so that no voter with
/// a saturated source arc still approves a candidate outside `keep`, unless
/// the saturation cannot be traded away.
///
/// Starting from the (validated) warm start, augmenting weakly raises source
/// and sink arcs; the rebalancing sweep then repeatedly finds a residual
/// cycle through such a voter and pushes half its bottleneck around it, which
/// frees the voter without saturating anyone else. On return, the shortest
/// augmenting path in the full network's residual graph, if any exists, has
/// length exactly three.
pub fn rebalanced_max_flow(
    net: &EntitlementNetwork,
    keep: &BTreeSet<usize>,
    warm_start: &Flow,
) -> Result<Flow> {
    Ok(rebalanced_with_pushes(net, keep, warm_start)?.0)
}

fn rebalanced_with_pushes(
    net: &EntitlementNetwork,
    keep: &BTreeSet<usize>,
    warm_start: &Flow,
) -> Result<(Flow, usize)> {
    let sub = net.restrict(keep);
    let mut flow = flownet::max_flow(&sub, Some(warm_start))?;
    let mut pushes = 0usize;
    loop {
        let stranded: BTreeSet<Node> = (0..net.n())
            .filter(|&i| {
                flow.source_flow(i) == net.entitlement(i)
                    && flow.source_flow(i) > &Rational::zero()
                    && net.approval_arcs(i).iter().any(|c| !keep.contains(c))
            })
            .map(Node::Voter)
            .collect();
        if stranded.is_empty() {
            break;
        }
        let residual = flownet::residual(&sub, &flow)?;
        let Some(path) = residual.find_path(Node::Source, &stranded, &BTreeSet::from([Node::Sink]))
        else {
            break;
        };
        let Node::Voter(reached) = path.last().expect("path is nonempty").to else {
            unreachable!("targets are voter nodes");
        };
        // close the cycle with the backward source arc of the reached voter
        let mut bottleneck = flow.source_flow(reached).clone();
        for arc in &path {
            if arc.residual < bottleneck {
                bottleneck = arc.residual.clone();
            }
        }
        let delta = bottleneck / rat_usize(2);
        for arc in &path {
            flow.apply_residual_arc(arc.from, arc.to, &delta);
        }
        flow.apply_residual_arc(Node::Voter(reached), Node::Source, &delta);
        pushes += 1;
        assert!(
            pushes <= net.n(),
            "rebalancing must settle within one push per voter"
        );
    }
    debug_assert!(
        matches!(
            flownet::residual(net, &flow)
                .expect("subnetwork flow is feasible on the full network")
                .shortest_augmenting_path_len(),
            None | Some(3)
        ),
        "rebalanced flow admits an augmenting path longer than three arcs"
    );
    Ok((flow, pushes))
}

/// The redistributive utilitarian rule.
pub fn rut(instance: &Instance) -> FractionalCommittee {
    rut_with_trace(instance).0
}

/// Runs the rule and returns the full per-round trace alongside the result.
pub fn rut_with_trace(instance: &Instance) -> (FractionalCommittee, RutTrace) {
    let n = instance.n();
    let m = instance.m();
    let k = instance.k();
    let ent = instance.entitlement();
    let net = network_representation(instance);
    let supporters: Vec<Vec<usize>> = (0..m).map(|c| instance.supporters(c)).collect();
    let score = |c: usize, lambda: &[Rational]| -> Rational {
        sum(supporters[c].iter().map(|&i| &lambda[i]))
    };

    let mut lambda = vec![Rational::one(); n];
    let s_star = (0..m)
        .map(|c| score(c, &lambda))
        .max()
        .expect("at least one candidate");
    let mut inserted: BTreeSet<usize> = BTreeSet::new();
    let mut flow = Flow::zero(&net);
    let mut rounds: Vec<RutRound> = Vec::new();

    for _ in 0..m {
        let next = (0..m)
            .filter(|c| !inserted.contains(c))
            .max_by(|&a, &b| score(a, &lambda).cmp(&score(b, &lambda)).then(b.cmp(&a)))
            .expect("an uninserted candidate remains");
        inserted.insert(next);
        let (new_flow, pushes) = rebalanced_with_pushes(&net, &inserted, &flow)
            .expect("previous round's flow is feasible on the grown subnetwork");
        flow = new_flow;
        rounds.push(RutRound {
            inserted: next,
            committee: inserted.clone(),
            flow: flow.clone(),
            rebalance_pushes: pushes,
        });

        // voters still holding entitlement; empty ballots are frozen from the start
        let active: Vec<usize> = (0..n)
            .filter(|&i| !instance.ballot(i).is_empty() && flow.source_flow(i) < &ent)
            .collect();
        let saturated: BTreeSet<usize> = (0..m).filter(|&c| flow.sink_flow(c).is_one()).collect();
        if active
            .iter()
            .all(|&i| instance.ballot(i).is_subset(&saturated))
        {
            break;
        }

        // uniform weight increase until the next candidate score hits the ceiling
        let active_set: BTreeSet<usize> = active.iter().copied().collect();
        let mut alpha: Option<Rational> = None;
        for c in (0..m).filter(|c| !inserted.contains(c)) {
            let backers = supporters[c]
                .iter()
                .filter(|i| active_set.contains(i))
                .count();
            if backers == 0 {
                continue;
            }
            let gap = &s_star - score(c, &lambda);
            debug_assert!(
                gap >= Rational::zero(),
                "uninserted scores stay below the ceiling"
            );
            let step = gap / rat_usize(backers);
            alpha = Some(match alpha {
                Some(a) if a <= step => a,
                _ => step,
            });
        }
        let alpha =
            alpha.expect("a growable candidate must exist while the exit condition is unmet");
        for &i in &active {
            lambda[i] += &alpha;
        }
    }

    // greedy completion: hand the remaining mass to the highest-scoring
    // unsaturated candidates, capping each at its sink capacity
    let mut probs = flow.sink_flows().to_vec();
    loop {
        let deficit = rat_usize(k) - sum(&probs);
        if deficit.is_zero() {
            break;
        }
        let target = (0..m)
            .filter(|&c| probs[c] < Rational::one())
            .max_by(|&a, &b| score(a, &lambda).cmp(&score(b, &lambda)).then(b.cmp(&a)))
            .expect("mass below k leaves an unsaturated candidate");
        let headroom = Rational::one() - &probs[target];
        probs[target] += headroom.min(deficit);
    }
    let committee =
        FractionalCommittee::new(probs, k).expect("completion yields a valid committee");

    let frozen = (0..n)
        .map(|i| instance.ballot(i).is_empty() || flow.source_flow(i) == &ent)
        .collect();
    let trace = RutTrace {
        rounds,
        weights: WeightState {
            lambda,
            frozen,
            s_star,
        },
    };
    (committee, trace)
}

/// Verifies the efficiency certificate of the final weights: all fractionally
/// selected candidates share one weighted score, integrally selected
/// candidates score at least as much as partially selected ones, and any
/// positively selected candidate scores at least as much as any unselected
/// one.
pub fn weighted_score_certificate(
    instance: &Instance,
    p: &FractionalCommittee,
    weights: &WeightState,
) -> bool {
    let m = instance.m();
    let scores: Vec<Rational> = (0..m)
        .map(|c| sum(instance.supporters(c).iter().map(|&i| &weights.lambda[i])))
        .collect();
    for c1 in 0..m {
        for c2 in 0..m {
            let p1 = p.get(c1);
            let p2 = p.get(c2);
            let fractional = |x: &Rational| !x.is_zero() && !x.is_one();
            if fractional(p1) && fractional(p2) && scores[c1] != scores[c2] {
                return false;
            }
            if p1.is_one() && p2 < p1 && scores[c1] < scores[c2] {
                return false;
            }
            if p1 > p2 && p2.is_zero() && scores[c1] < scores[c2] {
                return false;
            }
        }
    }
    true
}
