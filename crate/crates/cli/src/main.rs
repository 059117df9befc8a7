use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use formadp::dp::initial_problem;
use formadp::filters::{combine_rules, fr_base, fr_tcap, lhss, rhss, sr, ur, ur_tcap, RuleSetResult};
use formadp::framework::{prove, ProveConfig, Strategy, Verdict};
use formadp::orders::ArgumentFiltering;
use formadp::parser::{emit_proof, parse_with, ParseOptions, ProofFormat};
use formadp::rewriting::Rule;

#[derive(Parser)]
#[command(
    name = "formadp",
    version,
    about = "Termination prover for many-sorted rewrite systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Try to prove a rewrite system terminating.
    Prove(ProveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Default,
    UsableOnly,
    Formative,
    SplitFormative,
    Aprove,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleSet {
    Ur,
    UrTcap,
    Fr,
    FrTcap,
    Sr,
    Combined,
}

#[derive(clap::Args)]
struct ProveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "default")]
    strategy: StrategyArg,
    /// Largest coefficient tried in interpretations.
    #[arg(long, default_value_t = 3)]
    coef_bound: u32,
    /// Infer sorts for unsorted input.
    #[arg(long)]
    infer_sorts: bool,
    /// Prove innermost termination.
    #[arg(long)]
    innermost: bool,
    /// Start from formative chains (default: on, off for innermost).
    #[arg(long, value_enum)]
    formative_start: Option<Switch>,
    /// Time limit in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Print a rule set for the initial problem instead of proving.
    #[arg(long, value_enum)]
    emit_ruleset: Option<RuleSet>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let Command::Prove(args) = cli.command;
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let problem = parse_with(
        &text,
        ParseOptions {
            infer_sorts: args.infer_sorts,
        },
    )
    .with_context(|| format!("parsing {}", args.file.display()))?;
    let innermost = args.innermost || problem.innermost;
    let formative_start = args.formative_start.map(|s| matches!(s, Switch::On));
    if formative_start == Some(true) && innermost {
        bail!("--formative-start on cannot be combined with innermost termination");
    }

    if let Some(which) = args.emit_ruleset {
        print!("{}", ruleset(&problem.mtrs, which, innermost)?);
        return Ok(ExitCode::SUCCESS);
    }

    let config = ProveConfig {
        strategy: match args.strategy {
            StrategyArg::Default => Strategy::Default,
            StrategyArg::UsableOnly => Strategy::UsableOnly,
            StrategyArg::Formative => Strategy::Formative,
            StrategyArg::SplitFormative => Strategy::SplitFormative,
            StrategyArg::Aprove => Strategy::Aprove,
        },
        coef_bound: args.coef_bound,
        innermost,
        formative_start,
        timeout: Duration::from_secs(args.timeout),
        ..ProveConfig::default()
    };
    let proof = prove(&problem.mtrs, &config)?;
    println!("{}", proof.verdict);
    let format = match args.format {
        FormatArg::Text => ProofFormat::Text,
        FormatArg::Json => ProofFormat::Json,
    };
    print!("{}", emit_proof(&proof, format));
    if format == ProofFormat::Json {
        println!();
    }
    Ok(match proof.verdict {
        Verdict::Yes => ExitCode::SUCCESS,
        Verdict::Maybe => ExitCode::from(1),
    })
}

fn list(result: &RuleSetResult, rules: &[Rule]) -> String {
    let mut out = String::new();
    for r in result.rules(rules) {
        out.push_str(&format!("{:>3}: {r}\n", r.id));
    }
    out
}

fn ruleset(mtrs: &formadp::rewriting::Mtrs, which: RuleSet, innermost: bool) -> Result<String> {
    let p = initial_problem(mtrs, false, innermost)?;
    let sig = &p.signature;
    let pi = ArgumentFiltering::trivial();
    Ok(match which {
        RuleSet::Ur => list(&ur(&rhss(&p.pairs), &p.rules, &pi), &p.rules),
        RuleSet::UrTcap => list(&ur_tcap(sig, &rhss(&p.pairs), &p.rules, &pi), &p.rules),
        RuleSet::Fr => list(&fr_base(sig, &lhss(&p.pairs), &p.rules), &p.rules),
        RuleSet::FrTcap => list(&fr_tcap(sig, &lhss(&p.pairs), &p.rules, None), &p.rules),
        RuleSet::Sr | RuleSet::Combined => {
            let usable: Vec<Rule> = ur(&rhss(&p.pairs), &p.rules, &pi)
                .rules(&p.rules)
                .iter()
                .map(|r| r.map_terms(|t| t.collapse_sorts()))
                .collect();
            let a = combine_rules(&usable, p.next_id());
            if let RuleSet::Combined = which {
                let mut out = String::new();
                for (label, rules) in [("Cl", &a.cl), ("NC", &a.nc)] {
                    out.push_str(&format!("{label}:\n"));
                    for r in rules {
                        out.push_str(&format!("{:>3}: {r}\n", r.id));
                    }
                }
                out
            } else {
                let all = a.rules();
                let seeds: Vec<_> = p.pairs.iter().map(|r| r.lhs.collapse_sorts()).collect();
                list(
                    &sr(
                        &sig.collapse_sorts(),
                        &seeds.iter().collect::<Vec<_>>(),
                        &all,
                        None,
                        false,
                    ),
                    &all,
                )
            }
        }
    })
}
