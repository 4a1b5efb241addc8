#![allow(dead_code)]

//! Shared helpers for the integration suites: small worked instances and
//! seeded random generators.

use fairflow::gen::{generate_instance, GeneratorModel};
use fairflow::rational::{rat, Rational};
use fairflow::{FractionalCommittee, Instance};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn inst(m: usize, k: usize, ballots: &[&[usize]]) -> Instance {
    Instance::from_ballots(m, k, ballots).unwrap()
}

/// Four voters over {a, b, c}: one approves a alone, two approve {a, b}, one
/// approves c; committee size two.
pub fn overlap_instance() -> Instance {
    inst(3, 2, &[&[0], &[0, 1], &[0, 1], &[2]])
}

/// Like [`overlap_instance`] with a fourth candidate approved only by the
/// first voter.
pub fn nash_instance() -> Instance {
    inst(4, 2, &[&[0, 3], &[0, 1], &[0, 1], &[2]])
}

/// Three voters, four candidates, single winner; the pareto-improvement
/// trap instance.
pub fn footnote_instance() -> Instance {
    inst(4, 1, &[&[0, 1], &[1, 2], &[3]])
}

/// `n` voters all approving a shared candidate plus their own; `k = 2`.
pub fn star_instance(n: usize) -> Instance {
    let ballots: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([0, i + 1])).collect();
    Instance::new(n + 1, 2, ballots).unwrap()
}

/// Seeded impartial-culture instance with uniform dimensions.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, seed: u64) -> Instance {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_m);
    let k = rng.random_range(1..=m);
    let prob = [rat(1, 4), rat(1, 2), rat(3, 4)][rng.random_range(0..3)].clone();
    generate_instance(
        &GeneratorModel::ImpartialCulture {
            n,
            m,
            k,
            approval_prob: prob,
        },
        seed,
    )
    .unwrap()
}

/// Random valid fractional committee, independent of any flow machinery.
pub fn random_committee(m: usize, k: usize, seed: u64) -> FractionalCommittee {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probs = vec![Rational::zero(); m];
    let mut deficit = Rational::from_integer(k.into());
    let mut attempts = 0usize;
    while !deficit.is_zero() {
        let open: Vec<usize> = (0..m).filter(|&c| probs[c] < Rational::one()).collect();
        attempts += 1;
        if attempts > 64 {
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
        let add = headroom * rat(quarters as i64, 4);
        probs[c] += &add;
        deficit -= add;
    }
    FractionalCommittee::new(probs, k).unwrap()
}

/// Random ballot manipulation: a subset of the truth, a superset, or an
/// arbitrary set.
pub fn random_misreport(
    rng: &mut ChaCha8Rng,
    truth: &BTreeSet<usize>,
    m: usize,
) -> BTreeSet<usize> {
    match rng.random_range(0..3) {
        0 => truth
            .iter()
            .copied()
            .filter(|_| rng.random_range(0..2) == 0)
            .collect(),
        1 => {
            let mut report = truth.clone();
            for c in 0..m {
                if rng.random_range(0..3) == 0 {
                    report.insert(c);
                }
            }
            report
        }
        _ => (0..m).filter(|_| rng.random_range(0..2) == 0).collect(),
    }
}
