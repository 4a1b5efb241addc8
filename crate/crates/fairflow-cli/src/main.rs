use clap::{Parser, Subcommand, ValueEnum};
use fairflow_cli::files::{GroupFile, ModelFile};
use fairflow_cli::{
    cmd_bench, cmd_check, cmd_decompose, cmd_gen, cmd_solve, deliver, resolve_seed, Axiom,
    CliError, Rule,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Fair probabilistic committee voting: proportional fractional committees,
/// axiom checking, and lottery decomposition.
#[derive(Parser)]
#[command(name = "fairflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Rut,
    Gcut,
    #[value(name = "mes-bbw")]
    MesBbw,
    Utilitarian,
}

impl From<RuleArg> for Rule {
    fn from(arg: RuleArg) -> Self {
        match arg {
            RuleArg::Rut => Rule::Rut,
            RuleArg::Gcut => Rule::Gcut,
            RuleArg::MesBbw => Rule::MesBbw,
            RuleArg::Utilitarian => Rule::Utilitarian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxiomArg {
    Grp,
    Gfs,
    #[value(name = "strong-ufs")]
    StrongUfs,
    Pjr,
    Affordable,
}

impl From<AxiomArg> for Axiom {
    fn from(arg: AxiomArg) -> Self {
        match arg {
            AxiomArg::Grp => Axiom::Grp,
            AxiomArg::Gfs => Axiom::Gfs,
            AxiomArg::StrongUfs => Axiom::StrongUfs,
            AxiomArg::Pjr => Axiom::Pjr,
            AxiomArg::Affordable => Axiom::Affordable,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a voting rule on an instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        rule: RuleArg,
        /// Also decompose the committee into a lottery.
        #[arg(long)]
        lottery: bool,
        /// Seed for sampling a committee from the lottery.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Add decimal display columns next to the exact fractions.
        #[arg(long)]
        decimal: bool,
    },
    /// Check an axiom for a committee, lottery, or payment certificate.
    Check {
        instance: PathBuf,
        input: PathBuf,
        #[arg(long, value_enum)]
        axiom: AxiomArg,
    },
    /// Decompose a fractional committee into an exact lottery.
    Decompose {
        instance: PathBuf,
        committee: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Run a batch of (instance, rule) cells and print CSV.
    Bench {
        config: PathBuf,
        /// Append a runtime column (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Generate an instance file from a statistical model.
    Gen {
        #[command(subcommand)]
        model: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Independent approvals with a fixed probability.
    #[command(name = "impartial-culture")]
    ImpartialCulture {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Approval probability as an exact fraction, e.g. 1/2.
        #[arg(long)]
        prob: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Blocks of voters with identical ballots, e.g. --group 2:0,1 --group 2:2.
    #[command(name = "party-list")]
    PartyList {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "group")]
        groups: Vec<String>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Perturbations of a central ballot.
    Resampling {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Central ballot as comma-separated candidate indices, e.g. 0,1.
        #[arg(long)]
        base: String,
        /// Per-candidate resampling probability, e.g. 1/4.
        #[arg(long)]
        phi: String,
        /// Approval probability when resampled; defaults to |base|/m.
        #[arg(long)]
        prob: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

fn parse_group(text: &str) -> Result<GroupFile, CliError> {
    let (count, ballot) = text
        .split_once(':')
        .ok_or_else(|| CliError::Parse(format!("group must look like COUNT:c1,c2 got {text:?}")))?;
    let count = count
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad group count in {text:?}")))?;
    let ballot = parse_index_list(ballot)?;
    Ok(GroupFile { count, ballot })
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("bad candidate index {part:?}")))
        })
        .collect()
}

fn run() -> Result<Option<String>, (CliError, i32)> {
    let cli = Cli::parse();
    let fail = |e: CliError| {
        let code = e.exit_code();
        (e, code)
    };
    match cli.command {
        Command::Solve {
            instance,
            rule,
            lottery,
            seed,
            output,
            decimal,
        } => {
            let seed = resolve_seed(seed).map_err(fail)?;
            let result = cmd_solve(&instance, rule.into(), lottery, seed, decimal).map_err(fail)?;
            deliver(output.as_deref(), &result.to_canonical_string()).map_err(fail)
        }
        Command::Check {
            instance,
            input,
            axiom,
        } => {
            let (satisfied, rendered) = cmd_check(&instance, &input, axiom.into()).map_err(fail)?;
            println!("{rendered}");
            if satisfied {
                Ok(None)
            } else {
                Err((CliError::Invariant(String::new()), 1))
            }
        }
        Command::Decompose {
            instance,
            committee,
            seed,
            output,
        } => {
            let seed = resolve_seed(seed).map_err(fail)?;
            let result = cmd_decompose(&instance, &committee, seed).map_err(fail)?;
            deliver(output.as_deref(), &result.to_canonical_string()).map_err(fail)
        }
        Command::Bench { config, timings } => {
            let csv = cmd_bench(&config, timings).map_err(fail)?;
            print!("{csv}");
            Ok(None)
        }
        Command::Gen { model } => {
            let (model, seed, output) = match model {
                GenCommand::ImpartialCulture {
                    n,
                    m,
                    k,
                    prob,
                    seed,
                    output,
                } => (
                    ModelFile::ImpartialCulture {
                        n,
                        m,
                        k,
                        approval_prob: prob,
                    },
                    seed,
                    output,
                ),
                GenCommand::PartyList {
                    m,
                    k,
                    groups,
                    output,
                } => {
                    let groups = groups
                        .iter()
                        .map(|g| parse_group(g))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(fail)?;
                    (ModelFile::PartyList { m, k, groups }, None, output)
                }
                GenCommand::Resampling {
                    n,
                    m,
                    k,
                    base,
                    phi,
                    prob,
                    seed,
                    output,
                } => (
                    ModelFile::Resampling {
                        n,
                        m,
                        k,
                        base: parse_index_list(&base).map_err(fail)?,
                        phi,
                        resample_prob: prob,
                    },
                    seed,
                    output,
                ),
            };
            let seed = resolve_seed(seed).map_err(fail)?;
            let rendered = cmd_gen(&model, seed).map_err(fail)?;
            deliver(output.as_deref(), &rendered).map_err(fail)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(Some(text)) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err((err, 1)) => {
            // check violation: verdict already printed on stdout
            let _ = err;
            ExitCode::from(1)
        }
        Err((err, code)) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(code as u8)
        }
    }
}
