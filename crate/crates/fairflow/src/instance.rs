//! Election instances, fractional committees, and lotteries.

use crate::rational::{rat_usize, sum, Rational};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// An approval-based committee voting instance: `m` candidates, one approval
/// set per voter, and a committee size `k`.
///
/// Candidates and voters are referred to by 0-based dense indices throughout;
/// display names are an I/O-layer concern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    m: usize,
    k: usize,
    approvals: Vec<BTreeSet<usize>>,
}

impl Instance {
    /// Builds an instance, validating `1 <= k <= m`, `n >= 1`, and that every
    /// approval set is a subset of `{0, …, m-1}`. Empty approval sets are
    /// legal: a voter may approve nothing.
    pub fn new(m: usize, k: usize, approvals: Vec<BTreeSet<usize>>) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::InvalidInstance(format!(
                "committee size must satisfy 1 <= k <= m, got k={k}, m={m}"
            )));
        }
        if approvals.is_empty() {
            return Err(Error::InvalidInstance("at least one voter required".into()));
        }
        for (i, ballot) in approvals.iter().enumerate() {
            if let Some(&c) = ballot.iter().next_back() {
                if c >= m {
                    return Err(Error::InvalidInstance(format!(
                        "voter {i} approves candidate {c} but m={m}"
                    )));
                }
            }
        }
        Ok(Self { m, k, approvals })
    }

    /// Convenience constructor from slices of candidate indices.
    pub fn from_ballots(m: usize, k: usize, ballots: &[&[usize]]) -> Result<Self> {
        Self::new(
            m,
            k,
            ballots
                .iter()
                .map(|b| b.iter().copied().collect())
                .collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.approvals.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn approvals(&self) -> &[BTreeSet<usize>] {
        &self.approvals
    }

    pub fn ballot(&self, voter: usize) -> &BTreeSet<usize> {
        &self.approvals[voter]
    }

    /// The uniform voter entitlement `k/n`.
    pub fn entitlement(&self) -> Rational {
        rat_usize(self.k) / rat_usize(self.n())
    }

    /// Voters approving candidate `c`, ascending.
    pub fn supporters(&self, c: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.approvals[i].contains(&c))
            .collect()
    }

    /// Approval score `|N_c|` for every candidate.
    pub fn approval_scores(&self) -> Vec<usize> {
        let mut scores = vec![0usize; self.m];
        for ballot in &self.approvals {
            for &c in ballot {
                scores[c] += 1;
            }
        }
        scores
    }

    /// Union of the ballots of the given voters.
    pub fn ballot_union(&self, voters: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut union = BTreeSet::new();
        for &i in voters {
            union.extend(self.approvals[i].iter().copied());
        }
        union
    }

    /// Returns a copy with voter `voter`'s ballot replaced, validating the
    /// new ballot. Used by manipulation experiments.
    pub fn with_ballot(&self, voter: usize, ballot: BTreeSet<usize>) -> Result<Self> {
        if voter >= self.n() {
            return Err(Error::IndexOutOfRange(format!(
                "voter {voter} out of range for n={}",
                self.n()
            )));
        }
        let mut approvals = self.approvals.clone();
        approvals[voter] = ballot;
        Self::new(self.m, self.k, approvals)
    }
}

/// A fractional committee: per-candidate selection probabilities in `[0, 1]`
/// summing exactly to the committee size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalCommittee {
    probs: Vec<Rational>,
}

impl FractionalCommittee {
    /// Validates entries in `[0, 1]` and an exact sum of `k`.
    pub fn new(probs: Vec<Rational>, k: usize) -> Result<Self> {
        for (c, p) in probs.iter().enumerate() {
            if p < &Rational::zero() || p > &Rational::one() {
                return Err(Error::InvalidCommittee(format!(
                    "probability of candidate {c} is outside [0, 1]"
                )));
            }
        }
        let total = sum(&probs);
        if total != rat_usize(k) {
            return Err(Error::InvalidCommittee(format!(
                "probabilities sum to {total}, expected {k}"
            )));
        }
        Ok(Self { probs })
    }

    /// The indicator vector of an integral committee.
    pub fn indicator(members: &BTreeSet<usize>, m: usize) -> Result<Self> {
        if let Some(&c) = members.iter().next_back() {
            if c >= m {
                return Err(Error::IndexOutOfRange(format!(
                    "candidate {c} out of range for m={m}"
                )));
            }
        }
        let probs = (0..m)
            .map(|c| {
                if members.contains(&c) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Self::new(probs, members.len())
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, c: usize) -> &Rational {
        &self.probs[c]
    }

    pub fn sum(&self) -> Rational {
        sum(&self.probs)
    }

    /// The integral committee this vector represents, if every entry is 0 or 1.
    pub fn as_integral(&self) -> Option<BTreeSet<usize>> {
        let mut members = BTreeSet::new();
        for (c, p) in self.probs.iter().enumerate() {
            if p.is_one() {
                members.insert(c);
            } else if !p.is_zero() {
                return None;
            }
        }
        Some(members)
    }
}

/// A lottery: a probability distribution over integral committees of a common
/// size, with strictly positive weights summing to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lottery {
    entries: Vec<(Rational, BTreeSet<usize>)>,
}

impl Lottery {
    pub fn new(entries: Vec<(Rational, BTreeSet<usize>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidLottery("lottery has no entries".into()));
        }
        let k = entries[0].1.len();
        let mut total = Rational::zero();
        for (weight, committee) in &entries {
            if weight <= &Rational::zero() {
                return Err(Error::InvalidLottery(
                    "lottery weights must be strictly positive".into(),
                ));
            }
            if committee.len() != k {
                return Err(Error::InvalidLottery(format!(
                    "committee sizes differ: {} vs {k}",
                    committee.len()
                )));
            }
            total += weight;
        }
        if !total.is_one() {
            return Err(Error::InvalidLottery(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(Rational, BTreeSet<usize>)] {
        &self.entries
    }

    /// Common size of the support committees.
    pub fn k(&self) -> usize {
        self.entries[0].1.len()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }
}

/// Per-voter utilities under a fractional committee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityProfile {
    values: Vec<Rational>,
}

impl UtilityProfile {
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, voter: usize) -> &Rational {
        &self.values[voter]
    }
}

/// Utility of one voter: the probability mass on their approved candidates.
pub fn utility(instance: &Instance, p: &FractionalCommittee, voter: usize) -> Result<Rational> {
    if voter >= instance.n() {
        return Err(Error::IndexOutOfRange(format!(
            "voter {voter} out of range for n={}",
            instance.n()
        )));
    }
    if p.m() != instance.m() {
        return Err(Error::DimensionMismatch(format!(
            "committee has {} entries, instance has m={}",
            p.m(),
            instance.m()
        )));
    }
    Ok(sum(instance.ballot(voter).iter().map(|&c| p.get(c))))
}

/// Utilities of all voters.
pub fn utility_profile(instance: &Instance, p: &FractionalCommittee) -> Result<UtilityProfile> {
    let values = (0..instance.n())
        .map(|i| utility(instance, p, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(UtilityProfile { values })
}

/// The unique fractional committee implemented by a lottery: the per-candidate
/// marginal selection probabilities.
pub fn lottery_marginals(lottery: &Lottery, m: usize) -> Result<FractionalCommittee> {
    let mut probs = vec![Rational::zero(); m];
    for (weight, committee) in lottery.entries() {
        for &c in committee {
            if c >= m {
                return Err(Error::InvalidLottery(format!(
                    "candidate {c} out of range for m={m}"
                )));
            }
            probs[c] += weight;
        }
    }
    FractionalCommittee::new(probs, lottery.k())
}
