use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spantopos_cli::suites::criterion_name;
use spantopos_cli::{run, source_of, Command, Format, RunConfig, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "spantopos",
    version,
    about = "Checks for finite presheaf toposes, their allegories and Booleanization"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Topos description file, or a built-in name (finset, sierpinski).
    #[arg(long, global = true)]
    topos: Option<String>,
    /// Universe closure depth.
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Sub {
    /// Interpret a formula of the internal language.
    Eval {
        #[arg(long)]
        formula: String,
    },
    /// Compare hom-sets of T and T[x] for an indeterminate x : 1 -> A.
    Adjoin {
        /// Named object A (the first named object by default).
        #[arg(long)]
        object: Option<String>,
    },
    /// Law-by-law table for the allegory of relations.
    CheckAllegory,
    /// Compute B(T), the quotient view and the η and reflection reports.
    Booleanize {
        /// Functor description file for the reflection report.
        #[arg(long)]
        functor: Option<PathBuf>,
    },
    /// Run the acceptance suites.
    Selftest {
        /// Acceptance-scale sample sizes.
        #[arg(long)]
        full: bool,
        /// Run only these criteria (repeatable).
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match &cli.command {
        Sub::Eval { .. } => Command::Eval,
        Sub::Adjoin { .. } => Command::Adjoin,
        Sub::CheckAllegory => Command::CheckAllegory,
        Sub::Booleanize { .. } => Command::Booleanize,
        Sub::Selftest { .. } => Command::Selftest,
    };
    let mut cfg = RunConfig {
        topos: cli.common.topos.as_deref().map(source_of),
        depth: cli.common.depth,
        seed: cli.common.seed,
        format: cli.common.format,
        ..RunConfig::new(command)
    };
    match cli.command {
        Sub::Eval { formula } => cfg.formula = Some(formula),
        Sub::Adjoin { object } => cfg.object = object,
        Sub::CheckAllegory => {}
        Sub::Booleanize { functor } => cfg.functor = functor,
        Sub::Selftest { full, criteria } => {
            if let Some(bad) = criteria.iter().find(|n| criterion_name(**n).is_none()) {
                eprintln!("unknown criterion {bad}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
            cfg.full = full;
            cfg.criteria = criteria;
        }
    }
    let outcome = run(&cfg);
    print!("{}", outcome.report);
    ExitCode::from(outcome.code as u8)
}
