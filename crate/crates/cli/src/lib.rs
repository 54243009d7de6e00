//! `wipt` command-line front end.
//!
//! Each subcommand writes one CSV table. Lines starting with `#` carry the
//! resolved configuration and seed so that any output file can be
//! regenerated. The rayon worker count is deliberately left out of that
//! header: results do not depend on it.

// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod validate;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{FileConfig, DEFAULT_SEED};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] wipt_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    ValidationFailed(String),
}

impl CliError {
    /// 2 for solver non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_convergence() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wipt",
    version,
    about = "Wireless information and power transfer toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Master seed for all random draws.
    #[arg(long, global = true, env = "WIPT_SEED")]
    pub seed: Option<u64>,
    /// Monte Carlo realizations (network only).
    #[arg(long, global = true)]
    pub realizations: Option<usize>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Also write a gnuplot script for the produced table.
    #[arg(long, global = true)]
    pub plot_script: Option<PathBuf>,
    /// Progress and timing on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// RF-to-DC transfer curves of the configured rectenna models.
    Models,
    /// Worst-case CDFs inside KL balls around the nominal distribution.
    Robust,
    /// Capacity-energy boundary of a noiseless channel.
    Capacity {
        /// Energy-rate grid `start:stop:step`.
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated symbol energies.
        #[arg(long, value_delimiter = ',')]
        energies: Option<Vec<f64>>,
    },
    /// Rate-energy regions of time-switching, power-splitting and
    /// antenna-switching receivers.
    Receivers,
    /// Harvested energy versus transmit power with and without SIC.
    Network {
        /// Transmit-power sweep `start:stop:step` in dBW.
        #[arg(long = "p-dbw")]
        p_dbw: Option<String>,
        /// Comma-separated baseline splitting fractions.
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<f64>>,
    },
    /// PAPR, harvested power and information integrity versus tone count.
    Waveform,
    /// Run the built-in oracle suite and print PASS/FAIL lines.
    Validate,
}

/// A CSV table with its `#` header lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for c in &self.comments {
            for line in c.lines() {
                writeln!(out, "# {line}")?;
            }
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for r in &self.rows {
            writeln!(out, "{}", r.join(","))?;
        }
        Ok(())
    }
}

/// Settings shared by all subcommands after merging file and flags.
#[derive(Debug, Clone)]
pub struct Context {
    pub file: FileConfig,
    pub seed: u64,
    /// Seed given on the command line or in the file, if any.
    pub explicit_seed: Option<u64>,
    pub realizations: Option<usize>,
    pub verbose: u8,
}

impl Context {
    pub fn from_opts(opts: &GlobalOpts) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let explicit_seed = opts.seed.or(file.seed);
        Ok(Context {
            file,
            seed: explicit_seed.unwrap_or(DEFAULT_SEED),
            explicit_seed,
            realizations: opts.realizations,
            verbose: opts.verbose,
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(stderr, "wipt: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::from_opts(&cli.global)?;
    let started = Instant::now();
    let table = match cli.global.workers {
        Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(|| commands::dispatch(&cli.command, &ctx)),
        None => commands::dispatch(&cli.command, &ctx),
    };
    if ctx.verbose > 0 {
        let _ = writeln!(
            stderr,
            "wipt: {} finished in {:.3} s",
            commands::name(&cli.command),
            started.elapsed().as_secs_f64()
        );
    }
    let table = table?;
    let failure = validate::failure_message(&cli.command, &table);
    match &cli.global.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::Config(format!("cannot create output file {}: {e}", path.display()))
            })?;
            let mut w = BufWriter::new(file);
            table.write_to(&mut w)?;
            w.flush()?;
        }
        None => table.write_to(stdout)?,
    }
    if let Some(path) = &cli.global.plot_script {
        let data = cli
            .global
            .output
            .as_deref()
            .unwrap_or(Path::new("wipt.csv"));
        std::fs::write(path, commands::plot_script(&cli.command, data)).map_err(|e| {
            CliError::Config(format!("cannot write plot script {}: {e}", path.display()))
        })?;
    }
    match failure {
        Some(msg) => Err(CliError::ValidationFailed(msg)),
        None => Ok(()),
    }
}
