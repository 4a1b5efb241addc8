//! On-disk JSON schemas: instances, results, check inputs, bench configs.
//!
//! All rationals are serialized as exact `"num/den"` strings, never floats;
//! decimal columns are opt-in display extras. Output is canonical: compact
//! JSON, fields in fixed (alphabetical) order, approval lists sorted, so
//! files are diff-friendly and re-parsing reproduces values bit-exactly.

use crate::CliError;
use fairflow::rational::{format_rational, parse_rational, Rational};
use fairflow::{FractionalCommittee, Instance, Lottery};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// An election instance on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub k: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub voters: Vec<Vec<usize>>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, names: Option<Vec<String>>) -> Self {
        Self {
            k: instance.k(),
            m: instance.m(),
            names,
            voters: instance
                .approvals()
                .iter()
                .map(|b| b.iter().copied().collect())
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, CliError> {
        if let Some(names) = &self.names {
            if names.len() != self.m {
                return Err(CliError::Invariant(format!(
                    "{} names for {} candidates",
                    names.len(),
                    self.m
                )));
            }
        }
        let approvals: Vec<BTreeSet<usize>> = self
            .voters
            .iter()
            .map(|b| b.iter().copied().collect())
            .collect();
        Instance::new(self.m, self.k, approvals).map_err(CliError::from)
    }

    /// Canonical byte form: compact JSON, sorted keys, sorted ballots.
    pub fn to_canonical_string(&self) -> String {
        let mut norm = self.clone();
        for ballot in &mut norm.voters {
            ballot.sort_unstable();
            ballot.dedup();
        }
        serde_json::to_string(&norm).expect("instance files always serialize")
    }
}

/// One lottery entry on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LotteryEntryFile {
    pub committee: Vec<usize>,
    pub weight: String,
}

/// Axiom verdict on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohesion_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty_subset: Option<Vec<usize>>,
    pub satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl From<&fairflow::axioms::AxiomVerdict> for VerdictFile {
    fn from(v: &fairflow::axioms::AxiomVerdict) -> Self {
        Self {
            cohesion_level: v.cohesion_level,
            penalty_subset: v
                .penalty_subset
                .as_ref()
                .map(|s| s.iter().copied().collect()),
            satisfied: v.satisfied,
            witness: v.witness.as_ref().map(|s| s.iter().copied().collect()),
        }
    }
}

/// Verdict block of a result file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictsFile {
    pub grp: VerdictFile,
}

/// Output of `solve` and `decompose`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub committee: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub committee_decimal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lottery: Option<Vec<LotteryEntryFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mes_committee: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payments: Option<Vec<Vec<String>>>,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_committee: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub verdicts: VerdictsFile,
    pub welfare: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welfare_decimal: Option<String>,
}

impl ResultFile {
    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string(self).expect("result files always serialize")
    }
}

/// Committee-or-lottery input for `check` and `decompose`. Result files parse
/// directly as check inputs.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct CheckInput {
    #[serde(default)]
    pub committee: Option<Vec<String>>,
    #[serde(default)]
    pub lottery: Option<Vec<LotteryEntryFile>>,
    #[serde(default, alias = "mes_committee")]
    pub members: Option<Vec<usize>>,
    #[serde(default)]
    pub payments: Option<Vec<Vec<String>>>,
}

/// Bench configuration: explicit instance files and/or generator models with
/// seeds, evaluated under the listed rules.
#[derive(Debug, Clone, Deserialize)]
pub struct BenchConfig {
    #[serde(default)]
    pub instances: Vec<String>,
    #[serde(default)]
    pub models: Vec<ModelFile>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub rules: Vec<String>,
}

/// A generator model on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ModelFile {
    #[serde(rename = "impartial-culture")]
    ImpartialCulture {
        n: usize,
        m: usize,
        k: usize,
        approval_prob: String,
    },
    #[serde(rename = "party-list")]
    PartyList {
        m: usize,
        k: usize,
        groups: Vec<GroupFile>,
    },
    #[serde(rename = "resampling")]
    Resampling {
        n: usize,
        m: usize,
        k: usize,
        base: Vec<usize>,
        phi: String,
        #[serde(default)]
        resample_prob: Option<String>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub count: usize,
    pub ballot: Vec<usize>,
}

impl ModelFile {
    pub fn to_model(&self) -> Result<fairflow::gen::GeneratorModel, CliError> {
        use fairflow::gen::GeneratorModel;
        Ok(match self {
            ModelFile::ImpartialCulture {
                n,
                m,
                k,
                approval_prob,
            } => GeneratorModel::ImpartialCulture {
                n: *n,
                m: *m,
                k: *k,
                approval_prob: parse_rational_arg(approval_prob)?,
            },
            ModelFile::PartyList { m, k, groups } => GeneratorModel::PartyList {
                m: *m,
                k: *k,
                groups: groups
                    .iter()
                    .map(|g| (g.count, g.ballot.iter().copied().collect()))
                    .collect(),
            },
            ModelFile::Resampling {
                n,
                m,
                k,
                base,
                phi,
                resample_prob,
            } => GeneratorModel::Resampling {
                n: *n,
                m: *m,
                k: *k,
                base: base.iter().copied().collect(),
                phi: parse_rational_arg(phi)?,
                resample_prob: resample_prob
                    .as_deref()
                    .map(parse_rational_arg)
                    .transpose()?,
            },
        })
    }
}

/// Parses a rational from user input; failures are parse errors (exit 2).
pub fn parse_rational_arg(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Fraction strings for a committee.
pub fn committee_strings(p: &FractionalCommittee) -> Vec<String> {
    p.probs().iter().map(format_rational).collect()
}

/// Parses fraction strings into a fractional committee of the instance.
pub fn committee_from_strings(
    instance: &Instance,
    strings: &[String],
) -> Result<FractionalCommittee, CliError> {
    let probs = strings
        .iter()
        .map(|s| parse_rational_arg(s))
        .collect::<Result<Vec<_>, _>>()?;
    if probs.len() != instance.m() {
        return Err(CliError::Invariant(format!(
            "committee has {} entries, instance has m={}",
            probs.len(),
            instance.m()
        )));
    }
    FractionalCommittee::new(probs, instance.k()).map_err(CliError::from)
}

/// Serializes a lottery.
pub fn lottery_entries(lottery: &Lottery) -> Vec<LotteryEntryFile> {
    lottery
        .entries()
        .iter()
        .map(|(w, committee)| LotteryEntryFile {
            committee: committee.iter().copied().collect(),
            weight: format_rational(w),
        })
        .collect()
}

/// Parses a lottery.
pub fn lottery_from_entries(entries: &[LotteryEntryFile]) -> Result<Lottery, CliError> {
    let parsed = entries
        .iter()
        .map(|e| {
            Ok((
                parse_rational_arg(&e.weight)?,
                e.committee.iter().copied().collect::<BTreeSet<usize>>(),
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Lottery::new(parsed).map_err(CliError::from)
}
