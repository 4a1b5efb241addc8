//! Best-of-both-worlds pipeline: affordability certificates, the method of
//! equal shares, max-flow completion, and proportional lotteries whose every
//! support committee contains a given affordable committee.
//!
//! A committee `W` is affordable when voters can jointly pay one unit for
//! each of its members out of per-voter budgets `k/n`, paying only for
//! candidates they approve. Such payments are literally a feasible flow on
//! the instance network with every member's sink arc saturated; completing
//! that flow to a maximum flow (which never lowers a sink arc) and
//! decomposing the result yields a proportional lottery over committees that
//! all contain `W`.

use crate::flownet::{self, network_representation, EntitlementNetwork, Flow};
use crate::lottery::decompose;
use crate::rational::{rat_usize, sum, Rational};
use crate::{Error, FractionalCommittee, Instance, Lottery, Result};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Per-voter, per-candidate payments certifying a committee's affordability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentFunction {
    matrix: Vec<Vec<Rational>>,
}

impl PaymentFunction {
    /// All-zero payments.
    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            matrix: vec![vec![Rational::zero(); m]; n],
        }
    }

    /// Validates shape and nonnegativity.
    pub fn new(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let m = matrix.first().map_or(0, Vec::len);
        for row in &matrix {
            if row.len() != m {
                return Err(Error::DimensionMismatch(
                    "payment rows must share one length".into(),
                ));
            }
            if row.iter().any(|x| x < &Rational::zero()) {
                return Err(Error::InvalidParameters(
                    "payments must be nonnegative".into(),
                ));
            }
        }
        Ok(Self {
            matrix: matrix.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn m(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn get(&self, voter: usize, c: usize) -> &Rational {
        &self.matrix[voter][c]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    /// Total spent by one voter.
    pub fn voter_total(&self, voter: usize) -> Rational {
        sum(&self.matrix[voter])
    }

    /// Total collected by one candidate.
    pub fn candidate_total(&self, c: usize) -> Rational {
        sum(self.matrix.iter().map(|row| &row[c]))
    }
}

/// Checks the four affordability conditions exactly: voters pay only for
/// candidates they approve, nobody exceeds the budget `k/n`, every committee
/// member collects exactly one unit, and nobody else collects anything.
pub fn verify_affordability(
    instance: &Instance,
    committee: &BTreeSet<usize>,
    payments: &PaymentFunction,
) -> Result<bool> {
    if payments.n() != instance.n() || payments.m() != instance.m() {
        return Err(Error::DimensionMismatch(format!(
            "payments are {}x{}, instance needs {}x{}",
            payments.n(),
            payments.m(),
            instance.n(),
            instance.m()
        )));
    }
    if committee.iter().any(|&c| c >= instance.m()) {
        return Err(Error::IndexOutOfRange(
            "committee member outside candidate range".into(),
        ));
    }
    if committee.len() > instance.k() {
        return Err(Error::DimensionMismatch(format!(
            "committee has {} members, at most k={} allowed",
            committee.len(),
            instance.k()
        )));
    }
    let budget = instance.entitlement();
    for i in 0..instance.n() {
        for c in 0..instance.m() {
            if !instance.ballot(i).contains(&c) && !payments.get(i, c).is_zero() {
                return Ok(false);
            }
        }
        if payments.voter_total(i) > budget {
            return Ok(false);
        }
    }
    for c in 0..instance.m() {
        let collected = payments.candidate_total(c);
        let target = if committee.contains(&c) {
            Rational::one()
        } else {
            Rational::zero()
        };
        if collected != target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest uniform price `ρ` with `Σ_i min(b_i, ρ) = 1` over the given
/// budgets, or `None` when the budgets cannot raise one unit.
fn uniform_price(budgets: &[Rational]) -> Option<Rational> {
    if sum(budgets) < Rational::one() {
        return None;
    }
    let mut sorted = budgets.to_vec();
    sorted.sort();
    let s = sorted.len();
    let mut prefix = Rational::zero();
    for j in 0..s {
        // voters 0..j pay their whole budget, the rest pay ρ
        let rho = (Rational::one() - &prefix) / rat_usize(s - j);
        let lower_ok = j == 0 || sorted[j - 1] <= rho;
        if lower_ok && rho <= sorted[j] {
            return Some(rho);
        }
        prefix += &sorted[j];
    }
    unreachable!("a total of at least one always brackets the uniform price");
}

/// The method of equal shares for approval utilities.
///
/// Every voter starts with budget `k/n`. Repeatedly select the candidate
/// whose supporters can jointly raise one unit at the lowest uniform price
/// (ties by ascending candidate index), charge each supporter
/// `min(budget, price)`, and stop when no candidate is affordable or the
/// committee is full. The result always passes [`verify_affordability`].
pub fn mes(instance: &Instance) -> (BTreeSet<usize>, PaymentFunction) {
    let n = instance.n();
    let m = instance.m();
    let mut budgets: Vec<Rational> = vec![instance.entitlement(); n];
    let mut committee = BTreeSet::new();
    let mut payments = PaymentFunction::zero(n, m);
    while committee.len() < instance.k() {
        let mut best: Option<(Rational, usize)> = None;
        for c in 0..m {
            if committee.contains(&c) {
                continue;
            }
            let supporters = instance.supporters(c);
            if supporters.is_empty() {
                continue;
            }
            let pool: Vec<Rational> = supporters.iter().map(|&i| budgets[i].clone()).collect();
            if let Some(rho) = uniform_price(&pool) {
                match &best {
                    Some((best_rho, _)) if best_rho <= &rho => {}
                    _ => best = Some((rho, c)),
                }
            }
        }
        let Some((rho, c)) = best else { break };
        for i in instance.supporters(c) {
            let charge = budgets[i].clone().min(rho.clone());
            payments.matrix[i][c] = charge.clone();
            budgets[i] -= charge;
        }
        committee.insert(c);
    }
    debug_assert_eq!(
        verify_affordability(instance, &committee, &payments),
        Ok(true),
        "equal-shares output must certify its own affordability"
    );
    (committee, payments)
}

/// Interprets payments as a flow on the instance network: each voter routes
/// their payments to the candidates they fund, saturating every funded
/// candidate's sink arc.
pub fn flow_from_payments(instance: &Instance, payments: &PaymentFunction) -> Result<Flow> {
    let committee: BTreeSet<usize> = (0..instance.m().min(payments.m()))
        .filter(|&c| payments.candidate_total(c).is_one())
        .collect();
    match verify_affordability(instance, &committee, payments) {
        Ok(true) => {}
        Ok(false) => {
            return Err(Error::UnaffordablePayments(
                "payments violate the affordability conditions".into(),
            ))
        }
        Err(e) => return Err(e),
    }
    let mut voter_cand = BTreeMap::new();
    for i in 0..instance.n() {
        for c in 0..instance.m() {
            let paid = payments.get(i, c);
            if !paid.is_zero() {
                voter_cand.insert((i, c), paid.clone());
            }
        }
    }
    let flow = Flow::from_voter_candidate(instance.n(), instance.m(), voter_cand);
    network_representation(instance).check_feasible(&flow)?;
    Ok(flow)
}

/// Completes a feasible flow to a maximum flow without lowering any
/// candidate→sink flow: every augmentation raises exactly one sink arc.
pub fn complete_to_max_flow(net: &EntitlementNetwork, flow: &Flow) -> Result<Flow> {
    flownet::max_flow(net, Some(flow))
}

/// Builds a proportional lottery all of whose support committees contain the
/// affordable committee `W`.
///
/// Pipeline: payments → flow → max-flow completion → greedy mass top-up to
/// `k` (cap one, descending approval score) → lottery decomposition. The
/// top-up only raises sink values above a max flow, so proportionality
/// survives it.
pub fn bbw_lottery(
    instance: &Instance,
    committee: &BTreeSet<usize>,
    payments: &PaymentFunction,
) -> Result<Lottery> {
    match verify_affordability(instance, committee, payments) {
        Ok(true) => {}
        Ok(false) => {
            return Err(Error::UnaffordablePayments(
                "the committee is not certified affordable by these payments".into(),
            ))
        }
        Err(e) => return Err(e),
    }
    let net = network_representation(instance);
    let base = flow_from_payments(instance, payments)?;
    let completed = complete_to_max_flow(&net, &base)?;
    let mut probs = completed.sink_flows().to_vec();
    let scores = instance.approval_scores();
    let mut order: Vec<usize> = (0..instance.m()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let mut deficit = rat_usize(instance.k()) - sum(&probs);
    for &c in &order {
        if deficit.is_zero() {
            break;
        }
        let add = (Rational::one() - &probs[c]).min(deficit.clone());
        probs[c] += &add;
        deficit -= add;
    }
    assert!(deficit.is_zero(), "sink capacity m >= k absorbs the top-up");
    let marginals = FractionalCommittee::new(probs, instance.k())
        .expect("topped-up max flow is a fractional committee");
    decompose(&marginals, instance.k())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::check_grp;
    use crate::lottery_marginals;
    use crate::rational::{rat, rat_int};

    fn overlap_instance() -> Instance {
        Instance::from_ballots(3, 2, &[&[0], &[0, 1], &[0, 1], &[2]]).unwrap()
    }

    fn thirds_payment() -> PaymentFunction {
        let mut payments = PaymentFunction::zero(4, 3);
        for i in 0..3 {
            payments.matrix[i][0] = rat(1, 3);
        }
        payments
    }

    #[test]
    fn affordability_examples() {
        let inst = overlap_instance();
        assert_eq!(
            verify_affordability(&inst, &[0].into(), &thirds_payment()),
            Ok(true)
        );
        assert_eq!(
            verify_affordability(&inst, &BTreeSet::new(), &PaymentFunction::zero(4, 3)),
            Ok(true)
        );
        // half a unit is not enough for candidate 2
        let mut half = PaymentFunction::zero(4, 3);
        half.matrix[3][2] = rat(1, 2);
        assert_eq!(verify_affordability(&inst, &[2].into(), &half), Ok(false));
        // dimension mismatch is an error, not a verdict
        assert!(verify_affordability(&inst, &[0].into(), &PaymentFunction::zero(2, 3)).is_err());
    }

    #[test]
    fn affordability_rejects_unapproved_and_over_budget() {
        let inst = overlap_instance();
        let mut sneaky = thirds_payment();
        sneaky.matrix[3][0] = rat(1, 3);
        sneaky.matrix[0][0] = rat_int(0);
        assert_eq!(verify_affordability(&inst, &[0].into(), &sneaky), Ok(false));

        let inst2 = Instance::from_ballots(2, 1, &[&[0], &[0]]).unwrap();
        let mut greedy = PaymentFunction::zero(2, 2);
        greedy.matrix[0][0] = rat_int(1); // budget is only 1/2
        assert_eq!(
            verify_affordability(&inst2, &[0].into(), &greedy),
            Ok(false)
        );
    }

    #[test]
    fn equal_shares_on_overlap_instance() {
        let (committee, payments) = mes(&overlap_instance());
        assert_eq!(committee, [0].into());
        for i in 0..3 {
            assert_eq!(payments.get(i, 0), &rat(1, 3));
        }
        assert_eq!(payments.get(3, 0), &rat_int(0));
    }

    #[test]
    fn equal_shares_symmetric_and_empty() {
        let diag = Instance::from_ballots(2, 2, &[&[0], &[1]]).unwrap();
        let (committee, payments) = mes(&diag);
        assert_eq!(committee, [0, 1].into());
        assert_eq!(payments.get(0, 0), &rat_int(1));
        assert_eq!(payments.get(1, 1), &rat_int(1));

        let silent = Instance::from_ballots(3, 2, &[&[], &[]]).unwrap();
        let (committee, payments) = mes(&silent);
        assert!(committee.is_empty());
        assert_eq!(payments, PaymentFunction::zero(2, 3));
    }

    #[test]
    fn uniform_price_splits() {
        assert_eq!(
            uniform_price(&[rat(1, 2), rat(1, 2), rat(1, 2)]),
            Some(rat(1, 3))
        );
        assert_eq!(uniform_price(&[rat(1, 2), rat(1, 2)]), Some(rat(1, 2)));
        assert_eq!(uniform_price(&[rat(1, 4), rat(1, 2)]), None);
        // uneven budgets: one voter is capped at 1/6
        assert_eq!(
            uniform_price(&[rat(1, 6), rat_int(1), rat_int(1)]),
            Some(rat(5, 12))
        );
    }

    #[test]
    fn payment_flow_and_completion() {
        let inst = overlap_instance();
        let net = network_representation(&inst);
        let base = flow_from_payments(&inst, &thirds_payment()).unwrap();
        assert_eq!(base.value(), rat_int(1));
        assert_eq!(base.sink_flow(0), &rat_int(1));

        let completed = complete_to_max_flow(&net, &base).unwrap();
        assert_eq!(completed.value(), rat_int(2));
        assert_eq!(completed.sink_flows(), &[rat_int(1), rat(1, 2), rat(1, 2)]);
        for c in 0..3 {
            assert!(completed.sink_flow(c) >= base.sink_flow(c));
        }

        let zero = flow_from_payments(&inst, &PaymentFunction::zero(4, 3)).unwrap();
        assert!(zero.value().is_zero());
    }

    #[test]
    fn payment_flow_rejects_partial_funding() {
        let inst = overlap_instance();
        let mut partial = PaymentFunction::zero(4, 3);
        partial.matrix[3][2] = rat(1, 2);
        assert!(matches!(
            flow_from_payments(&inst, &partial),
            Err(Error::UnaffordablePayments(_))
        ));
    }

    #[test]
    fn lottery_contains_affordable_committee() {
        let inst = overlap_instance();
        let (committee, payments) = mes(&inst);
        let lottery = bbw_lottery(&inst, &committee, &payments).unwrap();
        assert_eq!(
            lottery.entries(),
            &[
                (rat(1, 2), BTreeSet::from([0, 1])),
                (rat(1, 2), BTreeSet::from([0, 2])),
            ]
        );
        for (_, support) in lottery.entries() {
            assert!(committee.is_subset(support));
        }
        let marginals = lottery_marginals(&lottery, 3).unwrap();
        assert!(check_grp(&inst, &marginals).unwrap().satisfied);
    }

    #[test]
    fn full_committee_gives_single_entry() {
        let diag = Instance::from_ballots(2, 2, &[&[0], &[1]]).unwrap();
        let (committee, payments) = mes(&diag);
        let lottery = bbw_lottery(&diag, &committee, &payments).unwrap();
        assert_eq!(lottery.entries(), &[(rat_int(1), BTreeSet::from([0, 1]))]);
    }

    #[test]
    fn empty_committee_still_yields_proportional_lottery() {
        let inst = overlap_instance();
        let lottery = bbw_lottery(&inst, &BTreeSet::new(), &PaymentFunction::zero(4, 3)).unwrap();
        let marginals = lottery_marginals(&lottery, 3).unwrap();
        assert!(check_grp(&inst, &marginals).unwrap().satisfied);
    }
}
