//! `ilm` — command-line front end for the lattice-mode laboratory.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (no competing
//! roots, broken sign pattern, inapplicable prediction), 3 numerical
//! failure (no convergence, singular operator, eigensolver breakdown).

mod args;
mod commands;
mod output;

use args::{Parsed, UsageError};
use ilm_core::Error as CoreError;

pub enum CliError {
    Usage(UsageError),
    Core(CoreError),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                CoreError::InvalidParams(_) => 1,
                CoreError::NoCompetingRoots { .. }
                | CoreError::SignPatternBroken
                | CoreError::NotApplicable(_) => 2,
                CoreError::NoConvergence { .. }
                | CoreError::WindowTooSmall
                | CoreError::SingularLplus
                | CoreError::InitialSolveFailed(_)
                | CoreError::NotGrowing
                | CoreError::Numerical(_) => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(e) => e.to_string(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

fn top_level_help() -> String {
    let mut out = String::from(
        "ilm — intrinsic localized modes of the competing-powers DNLS lattice\n\nusage: ilm <command> [options]\n\ncommands:\n",
    );
    for schema in commands::SCHEMAS {
        out.push_str(&format!("  {:<10} {}\n", schema.command, schema.about));
    }
    out.push_str("\nrun `ilm <command> --help` for the per-command options\n");
    out
}

fn run() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let command = match argv.first().map(String::as_str) {
        None | Some("--help") | Some("-h") | Some("help") => {
            print!("{}", top_level_help());
            return Ok(());
        }
        Some(c) => c,
    };
    let schema = commands::schema(command).ok_or_else(|| {
        CliError::Usage(UsageError(format!(
            "unknown command {command:?}; run `ilm --help`"
        )))
    })?;
    let values = match schema.parse(&argv[1..])? {
        Parsed::Done => return Ok(()),
        Parsed::Values(v) => v,
    };
    match command {
        "roots" => commands::cmd_roots(&values),
        "codes" => commands::cmd_codes(&values),
        "solve" => commands::cmd_solve(&values),
        "spectrum" => commands::cmd_spectrum(&values),
        "branch" => commands::cmd_branch(&values),
        "scan" => commands::cmd_scan(&values),
        "sweep" => commands::cmd_sweep(&values),
        "evolve" => commands::cmd_evolve(&values),
        _ => unreachable!("schema lookup covers every command"),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("ilm: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
