//! Seeded random instance generation for experiments and property suites.

use crate::rational::Rational;
use crate::{Error, Instance, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// A statistical model of approval profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorModel {
    /// Every (voter, candidate) pair approved independently with the given
    /// probability.
    ImpartialCulture {
        n: usize,
        m: usize,
        k: usize,
        approval_prob: Rational,
    },
    /// Fixed blocks of voters sharing identical ballots; deterministic in the
    /// model, independent of the seed.
    PartyList {
        m: usize,
        k: usize,
        /// `(voter count, shared ballot)` per party.
        groups: Vec<(usize, BTreeSet<usize>)>,
    },
    /// Each voter perturbs a central ballot: every candidate's membership is
    /// resampled with probability `phi` (approving with probability
    /// `resample_prob`, defaulting to `|base|/m`), otherwise copied.
    Resampling {
        n: usize,
        m: usize,
        k: usize,
        base: BTreeSet<usize>,
        phi: Rational,
        resample_prob: Option<Rational>,
    },
}

fn check_prob(label: &str, p: &Rational) -> Result<()> {
    if p < &Rational::zero() || p > &Rational::one() {
        return Err(Error::InvalidParameters(format!(
            "{label} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Draws `true` with the given probability, consuming one 64-bit word.
///
/// The draw compares a uniform `u/2^64` against the probability, so it is
/// exact up to the 2^-64 grid.
fn bernoulli(rng: &mut ChaCha8Rng, prob: &Rational) -> bool {
    let u = rng.next_u64();
    let draw = Rational::new(BigInt::from(u), BigInt::one() << 64);
    draw < *prob
}

/// Generates an instance from a model, deterministically in the seed.
pub fn generate_instance(model: &GeneratorModel, seed: u64) -> Result<Instance> {
    match model {
        GeneratorModel::ImpartialCulture {
            n,
            m,
            k,
            approval_prob,
        } => {
            check_prob("approval probability", approval_prob)?;
            if *n == 0 {
                return Err(Error::InvalidParameters("n must be at least 1".into()));
            }
            if *k == 0 || k > m {
                return Err(Error::InvalidParameters(format!(
                    "need 1 <= k <= m, got k={k}, m={m}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let approvals = (0..*n)
                .map(|_| {
                    (0..*m)
                        .filter(|_| bernoulli(&mut rng, approval_prob))
                        .collect()
                })
                .collect();
            Instance::new(*m, *k, approvals)
        }
        GeneratorModel::PartyList { m, k, groups } => {
            let mut approvals = Vec::new();
            for (count, ballot) in groups {
                for _ in 0..*count {
                    approvals.push(ballot.clone());
                }
            }
            Instance::new(*m, *k, approvals)
        }
        GeneratorModel::Resampling {
            n,
            m,
            k,
            base,
            phi,
            resample_prob,
        } => {
            check_prob("resampling probability", phi)?;
            if *n == 0 {
                return Err(Error::InvalidParameters("n must be at least 1".into()));
            }
            if *k == 0 || k > m || base.iter().any(|&c| c >= *m) {
                return Err(Error::InvalidParameters(
                    "base ballot or committee size out of range".into(),
                ));
            }
            let p = match resample_prob {
                Some(p) => {
                    check_prob("resample approval probability", p)?;
                    p.clone()
                }
                None => Rational::new(BigInt::from(base.len()), BigInt::from(*m)),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let approvals = (0..*n)
                .map(|_| {
                    (0..*m)
                        .filter(|c| {
                            if bernoulli(&mut rng, phi) {
                                bernoulli(&mut rng, &p)
                            } else {
                                base.contains(c)
                            }
                        })
                        .collect()
                })
                .collect();
            Instance::new(*m, *k, approvals)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn impartial_culture_is_valid_and_deterministic() {
        let model = GeneratorModel::ImpartialCulture {
            n: 4,
            m: 3,
            k: 2,
            approval_prob: rat(1, 2),
        };
        let a = generate_instance(&model, 7).unwrap();
        let b = generate_instance(&model, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 4);
        assert_eq!(a.m(), 3);
    }

    #[test]
    fn party_list_reproduces_exact_ballots() {
        let model = GeneratorModel::PartyList {
            m: 3,
            k: 2,
            groups: vec![(2, [0, 1].into()), (2, [2].into())],
        };
        let inst = generate_instance(&model, 0).unwrap();
        let other = generate_instance(&model, 99).unwrap();
        assert_eq!(inst, other);
        assert_eq!(inst.ballot(0), &BTreeSet::from([0, 1]));
        assert_eq!(inst.ballot(3), &BTreeSet::from([2]));
    }

    #[test]
    fn rejects_bad_parameters() {
        let model = GeneratorModel::ImpartialCulture {
            n: 2,
            m: 3,
            k: 2,
            approval_prob: rat(3, 2),
        };
        assert!(matches!(
            generate_instance(&model, 0),
            Err(Error::InvalidParameters(_))
        ));
        let model = GeneratorModel::ImpartialCulture {
            n: 2,
            m: 3,
            k: 4,
            approval_prob: rat(1, 2),
        };
        assert!(generate_instance(&model, 0).is_err());
    }

    #[test]
    fn resampling_extremes() {
        let base: BTreeSet<usize> = [0, 1].into();
        // phi = 0 copies the base ballot for everyone
        let model = GeneratorModel::Resampling {
            n: 3,
            m: 4,
            k: 2,
            base: base.clone(),
            phi: rat(0, 1),
            resample_prob: None,
        };
        let inst = generate_instance(&model, 5).unwrap();
        for i in 0..3 {
            assert_eq!(inst.ballot(i), &base);
        }
    }
}
