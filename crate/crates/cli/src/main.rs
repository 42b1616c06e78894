//! `iotier`: analyze and predict I/O performance of distributed training
//! on a two-tier (global + local) storage system.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error.
//! Diagnostics go to stderr; report data goes to files or stdout only.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod io_util;

use commands::CmdError;

#[derive(Parser)]
#[command(name = "iotier", version, about = "Two-tier storage I/O analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analytic storage simulator over the configured cache-rate
    /// sweep, writing one native trace file per (cache rate, epoch)
    Simulate {
        /// Run configuration (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Directory for trace_r{rate}_e{epoch}.jsonl files
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Convert darshan-parser text output into a native trace file
    Ingest {
        /// darshan-parser text dump, or '-' for stdin
        #[arg(long)]
        input: String,
        /// Epoch to stamp on every record (one profile file per epoch)
        #[arg(long)]
        epoch: u64,
        /// GFS mount prefix (repeatable)
        #[arg(long = "gfs-prefix")]
        gfs_prefixes: Vec<String>,
        /// LFS mount prefix (repeatable)
        #[arg(long = "lfs-prefix")]
        lfs_prefixes: Vec<String>,
        /// Run configuration supplying mount prefixes instead of flags
        #[arg(long)]
        config: Option<PathBuf>,
        /// Fail on shared (rank -1) records and unmatched mounts instead of
        /// skipping them
        #[arg(long)]
        strict: bool,
        /// Output path, or '-' for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Break down traces into the four I/O classes and report the slowest
    /// rank per (cache rate, epoch)
    Analyze {
        /// Trace files or directories containing trace_r{rate}_e{epoch}.jsonl
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Summary CSV path, or '-' for stdout
        #[arg(long, default_value = "-")]
        summary: String,
        /// Per-rank breakdown lines path (input format of estimate/explore)
        #[arg(long)]
        breakdowns: Option<PathBuf>,
    },
    /// Estimate the slowest I/O time under hypothetical class improvements
    Estimate {
        /// Breakdown lines file produced by analyze
        #[arg(long)]
        breakdowns: PathBuf,
        /// Epoch to estimate from
        #[arg(long, default_value_t = 2)]
        epoch: u64,
        /// Class improvement as NAME=PERCENT, e.g. GFS-META=50 (repeatable)
        #[arg(long = "improve")]
        improvements: Vec<String>,
    },
    /// Search the two-class improvement grid for combinations meeting an
    /// I/O-time goal
    Explore {
        /// Breakdown lines file produced by analyze
        #[arg(long)]
        breakdowns: PathBuf,
        /// Epoch to estimate from
        #[arg(long, default_value_t = 2)]
        epoch: u64,
        /// First improved class (grid rows)
        #[arg(long)]
        class_a: String,
        /// Second improved class (grid columns)
        #[arg(long)]
        class_b: String,
        /// Largest improvement percentage on both axes
        #[arg(long, default_value_t = 200.0)]
        max_percent: f64,
        /// Grid step in percent
        #[arg(long, default_value_t = 10.0)]
        step: f64,
        /// I/O-time goal in seconds
        #[arg(long)]
        goal_s: f64,
        /// Grid CSV path, or '-' for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out_dir } => commands::simulate(&config, &out_dir),
        Command::Ingest { input, epoch, gfs_prefixes, lfs_prefixes, config, strict, out } => {
            commands::ingest(&input, epoch, gfs_prefixes, lfs_prefixes, config.as_deref(), strict, &out)
        }
        Command::Analyze { traces, summary, breakdowns } => {
            commands::analyze(&traces, &summary, breakdowns.as_deref())
        }
        Command::Estimate { breakdowns, epoch, improvements } => {
            commands::estimate(&breakdowns, epoch, &improvements)
        }
        Command::Explore {
            breakdowns,
            epoch,
            class_a,
            class_b,
            max_percent,
            step,
            goal_s,
            out,
        } => commands::explore(
            &breakdowns,
            epoch,
            &class_a,
            &class_b,
            max_percent,
            step,
            goal_s,
            &out,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iotier: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CmdError {
    fn exit_code(&self) -> u8 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Data(_) => 3,
            CmdError::Io(_) => 1,
        }
    }
}
