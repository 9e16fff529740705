//! Argument parsing for the `fmzv` binary. Parsing produces a [`JobSpec`];
//! everything else lives in [`crate::job`].

use crate::job::{self, Command, Format, JobSpec, Params};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "fmzv",
    version,
    about = "Finite multiple zeta values of level N modulo primes"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Check a congruence or catalogue identity at every prime of a range.
    Verify(JobArgs),
    /// Search for primes with a property (Wieferich, irregular, witnesses).
    Search(JobArgs),
    /// Tabulate a per-prime statistic and check its bounds.
    Stats(JobArgs),
    /// Evaluate a quantity per prime, or expand a symbolic transform.
    Compute(JobArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct JobArgs {
    /// Identity, statistic or quantity name.
    target: String,
    /// Level N.
    #[arg(long = "N", value_name = "n")]
    n: Option<u64>,
    /// Second level M (lifts, log additivity, intersections).
    #[arg(long = "M", value_name = "m")]
    m: Option<u64>,
    /// Comma-separated list of weights.
    #[arg(long, value_delimiter = ',', value_name = "list")]
    k: Vec<u32>,
    /// Index such as 1,2,3; repeat for binary operations.
    #[arg(long, value_name = "a,b,c")]
    index: Vec<String>,
    /// Color: plain, bracket:j, uniform:a.b or table:file; repeat per index.
    #[arg(long, value_name = "spec")]
    color: Vec<String>,
    #[arg(long, value_name = "n")]
    base: Option<u64>,
    #[arg(long, value_name = "P")]
    pmin: Option<u64>,
    #[arg(long, value_name = "Q")]
    pmax: Option<u64>,
    /// Worker threads; defaults to FMZV_THREADS, then the processor count.
    #[arg(long, value_name = "t")]
    threads: Option<usize>,
    #[arg(long, value_name = "path")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Resumable checkpoint file.
    #[arg(long, value_name = "path")]
    checkpoint: Option<PathBuf>,
    /// Primes between checkpoint writes.
    #[arg(long, value_name = "n", default_value_t = 10_000)]
    every: u64,
    /// Treat skips outside an identity's declared preconditions as failures.
    #[arg(long)]
    strict_skips: bool,
    /// Record wall-clock time in reports (makes them non-reproducible).
    #[arg(long)]
    timings: bool,
    /// Identity catalogue in JSON; defaults to the built-in one.
    #[arg(long, value_name = "path")]
    catalogue: Option<PathBuf>,
    /// Primes per scheduling chunk.
    #[arg(long, value_name = "n")]
    chunk: Option<u64>,
    /// Largest prime for the power-series Bernoulli route.
    #[arg(long, value_name = "p", default_value_t = crate::bernoulli::SERIES_CAP)]
    series_cap: u64,
    /// Stop after this many checkpoint writes (exercises resumption).
    #[arg(long, hide = true, value_name = "n")]
    halt_after: Option<usize>,
}

fn env_threads() -> Result<Option<usize>, String> {
    match std::env::var("FMZV_THREADS") {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "FMZV_THREADS must be a positive integer, got {s:?}"
            )),
        },
    }
}

impl Cli {
    /// The job described by the arguments.
    pub fn into_job(self) -> Result<JobSpec, String> {
        let (command, a) = match self.command {
            Sub::Verify(a) => (Command::Verify, a),
            Sub::Search(a) => (Command::Search, a),
            Sub::Stats(a) => (Command::Stats, a),
            Sub::Compute(a) => (Command::Compute, a),
        };
        let threads = match a.threads {
            Some(t) => Some(t),
            None => env_threads()?,
        };
        Ok(JobSpec {
            command,
            target: a.target,
            params: Params {
                n: a.n,
                m: a.m,
                k: a.k,
                index: a.index,
                color: a.color,
                base: a.base,
            },
            pmin: a.pmin,
            pmax: a.pmax,
            chunk: a.chunk,
            series_cap: a.series_cap,
            catalogue: a.catalogue,
            threads,
            out: a.out,
            format: match a.format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            },
            checkpoint: a.checkpoint,
            every: a.every,
            strict_skips: a.strict_skips,
            timings: a.timings,
            halt_after: a.halt_after,
        })
    }
}

/// Parses `args` (including the program name), runs the job and returns
/// the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match cli.into_job() {
        Ok(job) => job::run(&job),
        Err(m) => {
            eprintln!("fmzv: usage error: {m}");
            2
        }
    }
}
