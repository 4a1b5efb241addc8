//! Decomposition of fractional committees into lotteries over integral
//! committees with exact marginals, and seeded sampling from lotteries.
//!
//! The decomposition peels one committee at a time off the k-uniform base
//! polytope: take the k largest residual coordinates, give that committee the
//! largest weight that keeps the renormalized remainder feasible, and repeat.
//! Every step pins at least one coordinate to 0 or 1, so the support has at
//! most `m + 1` committees.

use crate::rational::Rational;
use crate::{Error, FractionalCommittee, Lottery, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// One peeling step: the committee emitted, its weight in the final lottery,
/// and the renormalized residual left behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionStep {
    pub weight: Rational,
    pub committee: BTreeSet<usize>,
    pub residual: Vec<Rational>,
}

fn is_integral(probs: &[Rational]) -> bool {
    probs.iter().all(|p| p.is_zero() || p.is_one())
}

/// Candidates ordered by descending residual value, ties by ascending index.
fn by_descending_value(probs: &[Rational]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].cmp(&probs[a]).then(a.cmp(&b)));
    order
}

/// Decomposes a fractional committee into a lottery with exactly matching
/// marginals. The support is deterministic: ties in the top-k selection break
/// by ascending candidate index.
pub fn decompose(p: &FractionalCommittee, k: usize) -> Result<Lottery> {
    Ok(decompose_with_steps(p, k)?.0)
}

/// Like [`decompose`], also returning the intermediate peeling steps.
pub fn decompose_with_steps(
    p: &FractionalCommittee,
    k: usize,
) -> Result<(Lottery, Vec<DecompositionStep>)> {
    let m = p.m();
    if p.sum() != Rational::from_integer(k.into()) {
        return Err(Error::InvalidCommittee(format!(
            "probabilities sum to {}, expected {k}",
            p.sum()
        )));
    }
    if k == 0 || k > m {
        return Err(Error::InvalidCommittee(format!(
            "need 1 <= k <= m, got k={k}, m={m}"
        )));
    }
    let mut residual: Vec<Rational> = p.probs().to_vec();
    let mut remaining = Rational::one();
    let mut entries: Vec<(Rational, BTreeSet<usize>)> = Vec::new();
    let mut steps: Vec<DecompositionStep> = Vec::new();
    let mut pinned = count_pinned(&residual);
    for _ in 0..=m {
        if is_integral(&residual) {
            let committee: BTreeSet<usize> = (0..m).filter(|&c| residual[c].is_one()).collect();
            assert_eq!(committee.len(), k, "integral residual must have k ones");
            entries.push((remaining, committee));
            let lottery = Lottery::new(entries)?;
            return Ok((lottery, steps));
        }
        let order = by_descending_value(&residual);
        let committee: BTreeSet<usize> = order[..k].iter().copied().collect();
        // A non-integral residual keeps the selection strictly interior.
        let kth = &residual[order[k - 1]];
        assert!(
            kth > &Rational::zero(),
            "k-th largest residual must be positive"
        );
        if m > k {
            assert!(
                residual[order[k]] < Rational::one(),
                "(k+1)-th largest residual must be below one"
            );
        }
        let min_selected = committee
            .iter()
            .map(|&c| residual[c].clone())
            .min()
            .expect("k >= 1");
        let max_outside = (0..m)
            .filter(|c| !committee.contains(c))
            .map(|c| residual[c].clone())
            .max();
        let mut lambda = min_selected;
        if let Some(max_outside) = max_outside {
            let headroom = Rational::one() - max_outside;
            if headroom < lambda {
                lambda = headroom;
            }
        }
        assert!(
            lambda > Rational::zero() && lambda < Rational::one(),
            "peeling weight must be strictly interior"
        );
        let weight = &remaining * &lambda;
        let scale = Rational::one() - &lambda;
        for (c, value) in residual.iter_mut().enumerate() {
            if committee.contains(&c) {
                *value = (&*value - &lambda) / &scale;
            } else {
                *value = &*value / &scale;
            }
        }
        remaining *= &scale;
        let now_pinned = count_pinned(&residual);
        assert!(now_pinned > pinned, "each step must pin a new coordinate");
        pinned = now_pinned;
        entries.push((weight.clone(), committee.clone()));
        steps.push(DecompositionStep {
            weight,
            committee,
            residual: residual.clone(),
        });
    }
    unreachable!("peeling pins a coordinate per step and must finish within m steps");
}

fn count_pinned(probs: &[Rational]) -> usize {
    probs.iter().filter(|p| p.is_zero() || p.is_one()).count()
}

/// Draws one committee from the lottery, deterministically in the seed.
pub fn sample(lottery: &Lottery, seed: u64) -> BTreeSet<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = Rational::new(BigInt::from(rng.next_u64()), BigInt::one() << 64);
    let mut cumulative = Rational::zero();
    for (weight, committee) in lottery.entries() {
        cumulative += weight;
        if draw < cumulative {
            return committee.clone();
        }
    }
    // weights sum to one, so only a draw of exactly one can fall through
    lottery
        .entries()
        .last()
        .expect("lottery is nonempty")
        .1
        .clone()
}
