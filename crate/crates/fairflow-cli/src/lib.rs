//! Command implementations behind the `fairflow` binary.
//!
//! Exit-code contract, shared by every command:
//! * 0 — success (for `check`: the axiom is satisfied)
//! * 1 — `check` only: the axiom is violated; the witness is printed
//! * 2 — unreadable input: I/O, JSON, or number parsing
//! * 3 — invariant violation: structurally valid input that breaks a contract
//!
//! All outputs are deterministic functions of (input file, flags, seed); the
//! `FAIRFLOW_SEED` environment variable overrides `--seed` everywhere.

pub mod files;

use fairflow::axioms::{check_gfs, check_grp, check_pjr, check_strong_ufs, utilitarian_welfare};
use fairflow::bbw::{bbw_lottery, mes, verify_affordability, PaymentFunction};
use fairflow::gcut::gcut;
use fairflow::lottery::{decompose, sample};
use fairflow::rational::{decimal_string, format_rational};
use fairflow::rut::rut;
use fairflow::{lottery_marginals, FractionalCommittee, Instance, Lottery};
use files::{
    committee_from_strings, committee_strings, lottery_entries, lottery_from_entries,
    parse_rational_arg, BenchConfig, CheckInput, InstanceFile, ResultFile, VerdictFile,
    VerdictsFile,
};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::time::Instant;

/// Errors with their exit-code class.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable input: exit code 2.
    Parse(String),
    /// Contract violation on readable input: exit code 3.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Invariant(_) => "invariant",
        }
    }

    /// Machine-readable diagnostic for stderr.
    pub fn to_json(&self) -> String {
        let message = match self {
            CliError::Parse(m) | CliError::Invariant(m) => m,
        };
        serde_json::to_string(&serde_json::json!({
            "error": { "kind": self.kind(), "message": message }
        }))
        .expect("diagnostics serialize")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl From<fairflow::Error> for CliError {
    fn from(e: fairflow::Error) -> Self {
        CliError::Invariant(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("bad JSON in {}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> Result<(Instance, InstanceFile), CliError> {
    let file: InstanceFile = read_json(path)?;
    let instance = file.to_instance()?;
    Ok((instance, file))
}

/// `--seed` with the `FAIRFLOW_SEED` environment override.
pub fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    match std::env::var("FAIRFLOW_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Parse(format!("FAIRFLOW_SEED is not a u64: {text:?}"))),
        Err(_) => Ok(flag),
    }
}

/// The voting rules the CLI can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Rut,
    Gcut,
    MesBbw,
    Utilitarian,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Rut => "rut",
            Rule::Gcut => "gcut",
            Rule::MesBbw => "mes-bbw",
            Rule::Utilitarian => "utilitarian",
        }
    }

    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "rut" => Ok(Rule::Rut),
            "gcut" => Ok(Rule::Gcut),
            "mes-bbw" => Ok(Rule::MesBbw),
            "utilitarian" => Ok(Rule::Utilitarian),
            other => Err(CliError::Parse(format!("unknown rule {other:?}"))),
        }
    }
}

/// Unconstrained score-greedy baseline: the top-k candidates by approval
/// score, ties by ascending index.
fn utilitarian_baseline(instance: &Instance) -> FractionalCommittee {
    let scores = instance.approval_scores();
    let mut order: Vec<usize> = (0..instance.m()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let members: BTreeSet<usize> = order[..instance.k()].iter().copied().collect();
    FractionalCommittee::indicator(&members, instance.m())
        .expect("top-k indicator is a fractional committee")
}

struct RuleOutcome {
    committee: FractionalCommittee,
    lottery: Option<Lottery>,
    mes_committee: Option<BTreeSet<usize>>,
    payments: Option<PaymentFunction>,
}

fn run_rule(instance: &Instance, rule: Rule, want_lottery: bool) -> Result<RuleOutcome, CliError> {
    let mut outcome = match rule {
        Rule::Rut => RuleOutcome {
            committee: rut(instance),
            lottery: None,
            mes_committee: None,
            payments: None,
        },
        Rule::Gcut => RuleOutcome {
            committee: gcut(instance),
            lottery: None,
            mes_committee: None,
            payments: None,
        },
        Rule::Utilitarian => RuleOutcome {
            committee: utilitarian_baseline(instance),
            lottery: None,
            mes_committee: None,
            payments: None,
        },
        Rule::MesBbw => {
            let (members, payments) = mes(instance);
            let lottery = bbw_lottery(instance, &members, &payments)?;
            let committee = lottery_marginals(&lottery, instance.m())?;
            RuleOutcome {
                committee,
                lottery: Some(lottery),
                mes_committee: Some(members),
                payments: Some(payments),
            }
        }
    };
    if want_lottery && outcome.lottery.is_none() {
        outcome.lottery = Some(decompose(&outcome.committee, instance.k())?);
    }
    Ok(outcome)
}

fn build_result(
    instance: &Instance,
    rule_name: &str,
    outcome: RuleOutcome,
    seed: Option<u64>,
    decimal: bool,
    include_lottery: bool,
) -> Result<ResultFile, CliError> {
    let committee = outcome.committee;
    let welfare = utilitarian_welfare(instance, &committee)?;
    let grp = check_grp(instance, &committee)?;
    let lottery_field = if include_lottery {
        outcome.lottery.as_ref().map(lottery_entries)
    } else {
        None
    };
    let sampled_committee = match (seed, &outcome.lottery) {
        (Some(seed), Some(lottery)) => Some(sample(lottery, seed).iter().copied().collect()),
        _ => None,
    };
    Ok(ResultFile {
        committee: committee_strings(&committee),
        committee_decimal: decimal.then(|| {
            committee
                .probs()
                .iter()
                .map(|p| decimal_string(p, 6))
                .collect()
        }),
        lottery: lottery_field,
        mes_committee: outcome.mes_committee.map(|w| w.iter().copied().collect()),
        payments: outcome.payments.map(|p| {
            p.matrix()
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect()
        }),
        rule: rule_name.to_string(),
        sampled_committee,
        seed,
        verdicts: VerdictsFile {
            grp: VerdictFile::from(&grp),
        },
        welfare: format_rational(&welfare),
        welfare_decimal: decimal.then(|| decimal_string(&welfare, 6)),
    })
}

/// `solve`: run a rule on an instance and emit a result file.
pub fn cmd_solve(
    instance_path: &Path,
    rule: Rule,
    want_lottery: bool,
    seed: Option<u64>,
    decimal: bool,
) -> Result<ResultFile, CliError> {
    let (instance, _) = load_instance(instance_path)?;
    let include_lottery = want_lottery || rule == Rule::MesBbw;
    let outcome = run_rule(&instance, rule, want_lottery)?;
    build_result(
        &instance,
        rule.name(),
        outcome,
        seed,
        decimal,
        include_lottery,
    )
}

/// The axioms the CLI can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Grp,
    Gfs,
    StrongUfs,
    Pjr,
    Affordable,
}

impl Axiom {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "grp" => Ok(Axiom::Grp),
            "gfs" => Ok(Axiom::Gfs),
            "strong-ufs" => Ok(Axiom::StrongUfs),
            "pjr" => Ok(Axiom::Pjr),
            "affordable" => Ok(Axiom::Affordable),
            other => Err(CliError::Parse(format!("unknown axiom {other:?}"))),
        }
    }
}

fn fractional_input(
    instance: &Instance,
    input: &CheckInput,
) -> Result<FractionalCommittee, CliError> {
    if let Some(strings) = &input.committee {
        return committee_from_strings(instance, strings);
    }
    if let Some(entries) = &input.lottery {
        let lottery = lottery_from_entries(entries)?;
        return lottery_marginals(&lottery, instance.m()).map_err(CliError::from);
    }
    if let Some(members) = &input.members {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        return FractionalCommittee::indicator(&set, instance.m()).map_err(CliError::from);
    }
    Err(CliError::Invariant(
        "input provides no committee, lottery, or members".into(),
    ))
}

fn integral_input(instance: &Instance, input: &CheckInput) -> Result<BTreeSet<usize>, CliError> {
    if let Some(members) = &input.members {
        return Ok(members.iter().copied().collect());
    }
    if let Some(strings) = &input.committee {
        let p = committee_from_strings(instance, strings)?;
        return p
            .as_integral()
            .ok_or_else(|| CliError::Invariant("this axiom needs an integral committee".into()));
    }
    Err(CliError::Invariant(
        "this axiom needs explicit committee members".into(),
    ))
}

/// `check`: verdict JSON plus the satisfied/violated exit class.
pub fn cmd_check(
    instance_path: &Path,
    input_path: &Path,
    axiom: Axiom,
) -> Result<(bool, String), CliError> {
    let (instance, _) = load_instance(instance_path)?;
    let input: CheckInput = read_json(input_path)?;
    let verdict = match axiom {
        Axiom::Grp => check_grp(&instance, &fractional_input(&instance, &input)?)?,
        Axiom::Gfs => check_gfs(&instance, &fractional_input(&instance, &input)?)?,
        Axiom::StrongUfs => check_strong_ufs(&instance, &fractional_input(&instance, &input)?)?,
        Axiom::Pjr => check_pjr(&instance, &integral_input(&instance, &input)?)?,
        Axiom::Affordable => {
            let members = integral_input(&instance, &input)?;
            let payment_rows = input.payments.as_ref().ok_or_else(|| {
                CliError::Invariant("affordability needs a payments block".into())
            })?;
            let matrix = payment_rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse_rational_arg(s))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let payments = PaymentFunction::new(matrix)?;
            let ok = verify_affordability(&instance, &members, &payments)?;
            fairflow::axioms::AxiomVerdict {
                satisfied: ok,
                witness: None,
                penalty_subset: None,
                cohesion_level: None,
            }
        }
    };
    let rendered = serde_json::to_string(&VerdictFile::from(&verdict)).expect("verdicts serialize");
    Ok((verdict.satisfied, rendered))
}

/// `decompose`: exact lottery implementation of a fractional committee.
pub fn cmd_decompose(
    instance_path: &Path,
    committee_path: &Path,
    seed: Option<u64>,
) -> Result<ResultFile, CliError> {
    let (instance, _) = load_instance(instance_path)?;
    let input: CheckInput = read_json(committee_path)?;
    let committee = fractional_input(&instance, &input)?;
    let lottery = decompose(&committee, instance.k())?;
    let outcome = RuleOutcome {
        committee,
        lottery: Some(lottery),
        mes_committee: None,
        payments: None,
    };
    build_result(&instance, "decompose", outcome, seed, false, true)
}

/// `bench`: one CSV row per (instance, rule).
pub fn cmd_bench(config_path: &Path, timings: bool) -> Result<String, CliError> {
    let config: BenchConfig = read_json(config_path)?;
    let rules = config
        .rules
        .iter()
        .map(|r| Rule::parse(r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cells: Vec<(String, Instance)> = Vec::new();
    for path in &config.instances {
        let resolved = config_path
            .parent()
            .map(|dir| dir.join(path))
            .filter(|p| p.exists())
            .unwrap_or_else(|| Path::new(path).to_path_buf());
        let (instance, _) = load_instance(&resolved)?;
        cells.push((path.clone(), instance));
    }
    for (idx, model) in config.models.iter().enumerate() {
        let model = model.to_model()?;
        for &seed in &config.seeds {
            let instance = fairflow::gen::generate_instance(&model, seed)?;
            cells.push((format!("model{idx}/seed{seed}"), instance));
        }
    }
    let mut csv = String::from("instance,rule,welfare,grp");
    if timings {
        csv.push_str(",runtime_ms");
    }
    csv.push('\n');
    for (label, instance) in &cells {
        for &rule in &rules {
            let started = Instant::now();
            let outcome = run_rule(instance, rule, false)?;
            let elapsed = started.elapsed().as_millis();
            let welfare = utilitarian_welfare(instance, &outcome.committee)?;
            let grp = check_grp(instance, &outcome.committee)?;
            let verdict = if grp.satisfied {
                "satisfied"
            } else {
                "violated"
            };
            csv.push_str(&format!(
                "{label},{},{},{verdict}",
                rule.name(),
                format_rational(&welfare)
            ));
            if timings {
                csv.push_str(&format!(",{elapsed}"));
            }
            csv.push('\n');
        }
    }
    Ok(csv)
}

/// `gen`: write an instance file for a generator model.
pub fn cmd_gen(model: &files::ModelFile, seed: Option<u64>) -> Result<String, CliError> {
    let instance = fairflow::gen::generate_instance(&model.to_model()?, seed.unwrap_or(0))?;
    let file = InstanceFile::from_instance(&instance, None);
    Ok(file.to_canonical_string())
}

/// Writes output to the path or returns it for stdout.
pub fn deliver(output: Option<&Path>, text: &str) -> Result<Option<String>, CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))
                .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}
