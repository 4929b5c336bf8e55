//! `autloop`: free loop space cohomology, the Poincaré-duality quotient and the ranks of
//! `π_*(Ω aut₁ M) ⊗ Q` for a Sullivan model read from a file.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse error, 3 mathematical mismatch,
//! 4 internal error.

mod commands;
mod report;

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{Corruption, Options};
use report::{Format, Parameters, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Structural checks and Poincaré duality.
    Validate,
    /// Betti numbers of the free loop space.
    Betti,
    /// Betti numbers split by word length.
    Hodge,
    /// The finite quotient A and its comparison with the model.
    Quotient,
    /// Ranks of the homotopy groups of Ω aut₁ M, with the derivation oracle.
    AutRanks,
    /// Every identity and comparison, end to end.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Betti => "betti",
            Command::Hodge => "hodge",
            Command::Quotient => "quotient",
            Command::AutRanks => "aut-ranks",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "autloop", version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Model file.
    model: PathBuf,
    /// Largest cohomological degree to compute (default: formal dimension + 8).
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Append a growth report of the loop Betti partial sums (betti only).
    #[arg(long)]
    growth: bool,
    /// Worker threads for degree-slice parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overwrite one structure constant of the quotient: I,J,K,VALUE.
    #[arg(long, hide = true)]
    corrupt_alpha: Option<Corruption>,
}

fn run(cli: &Cli) -> Report {
    let fallback_name = cli.model.file_stem().map_or_else(
        || cli.model.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    let parameters = Parameters {
        max_degree: cli.max_degree,
        format: cli.format,
        growth: cli.growth,
    };
    let model = match commands::load(&cli.model) {
        Ok(m) => m,
        Err(e) => {
            let mut report = Report::new(fallback_name, cli.command.name(), parameters);
            report.stage("parse");
            report.fail(&e);
            return report;
        }
    };
    let mut report = Report::new(model.name(), cli.command.name(), parameters);
    let opts = Options {
        max_degree: cli
            .max_degree
            .unwrap_or_else(|| commands::default_max_degree(&model)),
        growth: cli.growth,
        corrupt_alpha: cli.corrupt_alpha.clone(),
    };
    if cli.command != Command::Validate {
        report.parameters.max_degree = Some(opts.max_degree);
    }
    let result = match cli.command {
        Command::Validate => commands::validate(&model, &mut report),
        Command::Betti => commands::betti(&model, &opts, &mut report),
        Command::Hodge => commands::hodge(&model, &opts, &mut report),
        Command::Quotient => commands::quotient(&model, &opts, &mut report),
        Command::AutRanks => commands::aut_ranks(&model, &opts, &mut report),
        Command::Verify => commands::verify(&model, &opts, &mut report),
    };
    if let Err(e) = result {
        report.fail(&e);
    }
    report
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| match cli.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map(|pool| pool.install(|| run(&cli)))
            .map_err(|e| e.to_string()),
        None => Ok(run(&cli)),
    }));
    match outcome {
        Ok(Ok(report)) => {
            print!("{}", report.render());
            if report.exit_code != 0 {
                if let Some(note) = report.notes.iter().rev().find(|n| n.starts_with("error: ")) {
                    eprintln!("autloop: {}", &note["error: ".len()..]);
                }
            }
            ExitCode::from(report.exit_code as u8)
        }
        Ok(Err(e)) => {
            eprintln!("autloop: cannot start worker pool: {e}");
            ExitCode::from(4)
        }
        Err(_) => {
            eprintln!("autloop: internal error");
            ExitCode::from(4)
        }
    }
}
