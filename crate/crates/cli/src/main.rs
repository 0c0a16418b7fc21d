//! `carnot`: reports on the de Rham multicomplex, the Rumin complex and the
//! weight spectral sequence of a Carnot group given by its structure
//! constants.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use carnot_core::derham::DerhamError;
use carnot_core::LieError;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Spec { path: PathBuf, source: LieError },
    #[error(transparent)]
    Guard(#[from] DerhamError),
    #[error("--weight {p} outside 0..={max}")]
    Weight { p: usize, max: usize },
    #[error("invalid CARNOT_THREADS value `{0}`")]
    Threads(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "carnot", version, about = "Exact Rumin complex and spectral sequence reports for Carnot groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Frame,
    E0,
    Dc,
    Pages,
    Verify,
    Cohomology,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Check => "check",
            Self::Frame => "frame",
            Self::E0 => "e0",
            Self::Dc => "dc",
            Self::Pages => "pages",
            Self::Verify => "verify",
            Self::Cohomology => "cohomology",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the stratification and the multicomplex identities.
    Check(Opts),
    /// Print the left-invariant frame in exponential coordinates.
    Frame(Opts),
    /// Print bases and dimensions of E0 by degree and weight.
    E0(Opts),
    /// Print the matrices of d_c on every slice.
    Dc(Opts),
    /// Print page dimensions and page differentials.
    Pages(Opts),
    /// Compare d_c with the page differentials and the two page computations.
    Verify(Opts),
    /// Compare E_infinity with the cohomology of each slice.
    Cohomology(Opts),
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, clap::Args)]
pub struct Opts {
    /// Group spec file, or the name of a bundled example.
    pub spec: PathBuf,
    /// Largest slice weight to compute.
    #[arg(long, default_value_t = 4)]
    pub tau: usize,
    /// Restrict to one page (pages, verify).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub page: Option<u64>,
    /// Restrict to one filtration weight (e0, pages, verify).
    #[arg(long)]
    pub weight: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Refuse slices with a (p, h) block larger than this.
    #[arg(long, default_value_t = 20000)]
    pub max_block_dim: usize,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CARNOT_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Threads(v.clone()))?;
    // a second initialization only happens in tests; the first one wins
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(report: &Report, opts: &Opts) -> Result<(), CliError> {
    let body = match opts.format {
        Format::Text => report.text.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &opts.out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Write { path: path.clone(), source }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for failed checks
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (kind, opts) = match cli.command {
        Command::Check(o) => (CommandKind::Check, o),
        Command::Frame(o) => (CommandKind::Frame, o),
        Command::E0(o) => (CommandKind::E0, o),
        Command::Dc(o) => (CommandKind::Dc, o),
        Command::Pages(o) => (CommandKind::Pages, o),
        Command::Verify(o) => (CommandKind::Verify, o),
        Command::Cohomology(o) => (CommandKind::Cohomology, o),
    };
    let result = configure_threads().and_then(|()| commands::run(kind, &opts)).and_then(|r| {
        emit(&r, &opts)?;
        Ok(r.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
