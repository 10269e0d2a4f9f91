use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rcalab_cli::config::{parse_checks, RunConfig, DEFAULT_BUDGET};
use rcalab_cli::{commands, pipeline, CliError};
use rcalab_core::{io, CtrlDescriptor, Perm, Word};
use serde::Serialize;

/// Finite-window checks for reversible cellular automata generated by a
/// shift and one controlled involution.
#[derive(Parser)]
#[command(name = "rcalab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Global {
    /// Control word length ℓ.
    #[arg(long, global = true, default_value_t = 9)]
    ell: usize,

    /// Width of the involution F.
    #[arg(long, global = true, default_value_t = 3)]
    n: u32,

    /// Free bits of the formula family; must satisfy k < (ℓ - 4)/2.
    #[arg(long, global = true, default_value_t = 2)]
    k: u32,

    /// Control word override, e.g. 000000011.
    #[arg(long, global = true)]
    word: Option<Word>,

    /// Gate set name: standard, or a comma list of not, cnot, toffoli, swap.
    #[arg(long, global = true, default_value = "standard")]
    gates: String,

    /// Largest lookup table built by exhaustive checks.
    #[arg(long, global = true, env = "RCALAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Write the JSON report here; `-` prints it on stdout instead of the summary.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Comma-separated subset of checks for `verify`.
    #[arg(long, global = true)]
    checks: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline (the default).
    Verify,
    /// Unbordered words of length ℓ and the available families.
    Words,
    /// Decompose an even permutation into placed gates.
    Decompose {
        /// Permutation JSON; a random even permutation of ℓ bits when absent.
        perm: Option<PathBuf>,
    },
    /// Search involutions whose translates are universal on a test window.
    SearchInvolution {
        #[arg(long)]
        test_width: Option<u32>,
        /// Involutions examined.
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        #[arg(long, default_value_t = 1)]
        max_results: usize,
    },
    /// Build and verify a generator-word certificate for a ctrl target.
    Certify {
        target: PathBuf,
        /// Involution JSON; searched when absent.
        #[arg(long)]
        involution: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rcalab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let g = &cli.global;
    match cli.command.unwrap_or(Command::Verify) {
        Command::Verify => verify(g),
        Command::Words => emit(g, &commands::words(g.ell, g.k, g.budget)?).map(|_| true),
        Command::Decompose { perm } => {
            let target = perm.as_deref().map(io::load::<Perm>).transpose()?;
            let out = commands::decompose(target, g.ell as u32, &g.gates, g.seed)?;
            emit(g, &out)?;
            Ok(out.replay_verified)
        }
        Command::SearchInvolution {
            test_width,
            limit,
            max_results,
        } => {
            let found = commands::search_involution(g.n, test_width.unwrap_or(g.n + 3), limit, max_results)?;
            emit(g, &found)?;
            Ok(!found.is_empty())
        }
        Command::Certify { target, involution } => {
            let target: CtrlDescriptor = io::load(&target)?;
            let f = involution.as_deref().map(io::load::<Perm>).transpose()?;
            let cert = commands::certify(&target, f, g.n, g.seed)?;
            emit(g, &cert)?;
            Ok(cert.verified)
        }
    }
}

fn verify(g: &Global) -> Result<bool, CliError> {
    let mut cfg = RunConfig {
        ell: g.ell,
        n: g.n,
        k: g.k,
        word: g.word.clone(),
        gates: g.gates.clone(),
        budget: g.budget,
        seed: g.seed,
        ..RunConfig::default()
    };
    if let Some(list) = &g.checks {
        cfg.checks = parse_checks(list)?;
    }
    let cfg = cfg.validate()?;
    let report = pipeline::run(&cfg)?;
    match g.report.as_deref() {
        Some(p) if p == Path::new("-") => stdout(&io::to_json(&report)?),
        Some(p) => {
            write(p, &io::to_json(&report)?)?;
            stdout(report.summary().trim_end());
        }
        None => stdout(report.summary().trim_end()),
    }
    Ok(report.passed)
}

/// JSON to stdout, or to `--report` when given.
fn emit<T: Serialize>(g: &Global, value: &T) -> Result<(), CliError> {
    let text = io::to_json(value)?;
    match g.report.as_deref() {
        Some(p) if p != Path::new("-") => write(p, &text),
        _ => {
            stdout(&text);
            Ok(())
        }
    }
}

/// Prints a line, exiting quietly when the reader has gone away.
fn stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(0);
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, format!("{text}\n")).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
