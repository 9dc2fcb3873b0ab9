use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sd_cli::commands::{self, CommandResult};
use sd_cli::formats;

/// Exact differentiation of simplicial presentations into graded dual
/// algebras, with certified cross-checks.
///
/// Exit codes: 0 all checks pass, 1 bad input or usage, 2 a mathematical
/// check failed (the report carries a witness).
#[derive(Parser)]
#[command(name = "sd", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Differentiate a presentation: dual generators, differentials,
    /// bracket tables, and the built-in cross-checks.
    Differentiate {
        /// Presentation file (kind "framed" or "group_law").
        input: PathBuf,
        /// Top generator degree to differentiate.
        #[arg(long)]
        degree: usize,
        /// Lower the stored truncation before running.
        #[arg(long)]
        truncation: Option<u32>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare function cohomology against the dual algebra, weight slice
    /// by weight slice. Linear faces only.
    Vanest {
        /// Presentation file (kind "framed" or "group_law").
        input: PathBuf,
        /// Top comparison degree.
        #[arg(long, visible_alias = "max-degree", default_value_t = 2)]
        degree: usize,
        /// Top factor-count weight.
        #[arg(long = "max-weight", default_value_t = 4)]
        max_weight: u32,
        /// Lower the stored truncation before running.
        #[arg(long)]
        truncation: Option<u32>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Differentiate a cosimplicial level ring abstractly: infinitesimality,
    /// the ideal quotient, and the counit comparison.
    Abstract {
        /// Presentation file (kind "cosimplicial").
        input: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a stored presentation against its structural identities.
    Validate {
        /// Presentation file of any kind.
        input: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the release gates, one verdict line per criterion.
    Selftest {
        /// Only run criteria whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Directory holding the presentation fixtures.
        #[arg(long, default_value = "fixtures")]
        fixtures: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(res: CommandResult, out: Option<PathBuf>, lines_to_stdout: bool) -> ExitCode {
    let json = res.report.to_json();
    match out {
        Some(path) => {
            if let Err(e) = formats::save_json(&path, &json) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            for l in &res.lines {
                println!("{l}");
            }
        }
        None => {
            if lines_to_stdout {
                for l in &res.lines {
                    println!("{l}");
                }
            } else {
                print!("{json}");
                for l in &res.lines {
                    eprintln!("{l}");
                }
            }
        }
    }
    ExitCode::from(res.code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, out, lines_to_stdout) = match cli.cmd {
        Cmd::Differentiate {
            input,
            degree,
            truncation,
            out,
        } => (commands::differentiate(&input, degree, truncation), out, false),
        Cmd::Vanest {
            input,
            degree,
            max_weight,
            truncation,
            out,
        } => (
            commands::vanest(&input, degree, max_weight, truncation),
            out,
            false,
        ),
        Cmd::Abstract { input, out } => (commands::abstract_cmd(&input), out, false),
        Cmd::Validate { input, out } => (commands::validate(&input), out, false),
        Cmd::Selftest {
            filter,
            fixtures,
            out,
        } => (
            commands::selftest(&fixtures, filter.as_deref()),
            out,
            true,
        ),
    };
    match run {
        Ok(res) => emit(res, out, lines_to_stdout),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
