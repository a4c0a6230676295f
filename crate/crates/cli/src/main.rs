mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use henkin_core::Structure;

use commands::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "henkin", version, about = "Henkin evaluation, choice witnesses and refuters over equality atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// sigma0, ksigma0:<k> or finite:<k>
    #[arg(long, default_value = "sigma0")]
    pub structure: Structure,
    /// Fresh atoms per sort admitted into predicate witnesses
    #[arg(long, env = "HENKIN_ATOMS_BUDGET", default_value_t = 2)]
    pub budget: usize,
    /// Cap on candidates tried by one predicate quantifier
    #[arg(long, default_value_t = henkin_core::eval::DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: usize,
    /// Values for free variables: `c=1:2` binds an atom, `A=1:3,1:5` a finite unary predicate
    #[arg(long = "bind", value_name = "NAME=ATOMS")]
    pub binds: Vec<String>,
    /// Write the JSON report here; the text summary then goes to stdout
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every formula of a corpus file
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        formula: PathBuf,
    },
    /// Build and verify a choice predicate for H(x, D)
    ChoiceWitness {
        #[command(flatten)]
        common: Common,
        #[arg(long = "H", alias = "h")]
        h: PathBuf,
    },
    /// Refute trichotomy for unary predicates in the k-sorted model
    RefuteTr {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        support_bound: usize,
        /// Maximum number of refutations listed in the report
        #[arg(long, default_value_t = 1000)]
        list_limit: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Refute well-ordering in the one-sorted model
    RefuteWo {
        #[arg(long, default_value_t = 2)]
        support_bound: usize,
        #[arg(long, default_value_t = 1000)]
        list_limit: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare evaluation with brute force and test equivariance
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Corpus file; the bundled sentences when absent
        #[arg(long)]
        formula: Option<PathBuf>,
        /// Random transpositions tried per formula
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    Ok(match cli.command {
        Command::Eval { common, formula } => (commands::eval(&common, &formula)?, common.json),
        Command::ChoiceWitness { common, h } => (commands::choice_witness(&common, &h)?, common.json),
        Command::RefuteTr { k, support_bound, list_limit, json } => {
            (commands::refute_tr(k, support_bound, list_limit)?, json)
        }
        Command::RefuteWo { support_bound, list_limit, json } => (commands::refute_wo(support_bound, list_limit)?, json),
        Command::OracleCheck { common, formula, trials, seed } => {
            (commands::oracle_check(&common, formula.as_deref(), trials, seed)?, common.json)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, json_path)) => {
            let json = serde_json::to_string_pretty(&outcome.json).expect("report serializes") + "\n";
            match json_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    print!("{}", outcome.summary);
                }
                None => {
                    print!("{json}");
                    eprint!("{}", outcome.summary);
                }
            }
            ExitCode::from(if outcome.confirmed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
