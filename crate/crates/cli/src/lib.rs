//! `sbt`: check, simulate, enumerate, verify and emit stateful behavior
//! tree models.
//!
//! Exit codes: 0 success, 1 a spec is violated or an encoding diverges,
//! 2 usage, read or validation error, 3 a resource limit was hit.

mod commands;
mod report;
mod trace;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sbt_core::smv::OptLevel;

pub use commands::CliError;
pub use report::RunReport;
pub use trace::{EnvSource, TraceRecord};

#[derive(Parser, Debug)]
#[command(name = "sbt", version, about = "Stateful behavior tree toolkit")]
struct Cli {
    /// Write a JSON run report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Include wall-clock milliseconds in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct LimitArgs {
    /// Give up after discovering this many states.
    #[arg(long, env = "SBT_MAX_STATES", default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a model.
    Check { file: PathBuf },
    /// Run against a seeded random environment; one JSON record per tick.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        ticks: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Engine::Big)]
        engine: Engine,
    },
    /// Build the reachable transition system.
    Enumerate {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        /// Write the graph export to this file.
        #[arg(long, value_name = "FILE")]
        dump: Option<PathBuf>,
    },
    /// Model-check the specs declared in the model.
    Verify {
        file: PathBuf,
        /// Only check these specs (repeatable).
        #[arg(long = "spec", value_name = "NAME")]
        specs: Vec<String>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Write the SMV encoding.
    Emit {
        file: PathBuf,
        #[arg(long, default_value_t = OptLevel::FullOpt)]
        level: OptLevel,
        /// Output file; standard output when absent.
        #[arg(long, short, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also check the encoding against explicit enumeration.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Whole ticks at once.
    Big,
    /// Node by node.
    Small,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Big => "big",
            Engine::Small => "small",
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Simulate { .. } => "simulate",
            Command::Enumerate { .. } => "enumerate",
            Command::Verify { .. } => "verify",
            Command::Emit { .. } => "emit",
        }
    }

    fn file(&self) -> &PathBuf {
        match self {
            Command::Check { file }
            | Command::Simulate { file, .. }
            | Command::Enumerate { file, .. }
            | Command::Verify { file, .. }
            | Command::Emit { file, .. } => file,
        }
    }
}

/// Runs one command line, writing to `out` and `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let (code, outcome) = match commands::dispatch(&cli.command, out, err) {
        Ok(o) => (o.code, o.payload),
        Err(e) => {
            let _ = writeln!(err, "{e}");
            (e.code(), serde_json::json!({ "error": e.to_string() }))
        }
    };
    let _ = out.flush();
    if let Some(path) = &cli.report {
        let report = RunReport {
            command: cli.command.name().into(),
            model: cli.command.file().display().to_string(),
            outcome,
            wall_time: cli.timing.then(|| start.elapsed().as_millis() as u64),
            exit_code: code,
        };
        let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
        if let Err(e) = fs::write(path, text) {
            let _ = writeln!(err, "{}: error: cannot write: {e}", path.display());
            return 2;
        }
    }
    code
}
