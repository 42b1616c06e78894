//! Subcommand implementations. Every command is deterministic given its
//! inputs and flags: repeated runs produce byte-identical files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use iotier_core::report::{
    breakdown_lines, estimate_csv, fmt_pct, grid_csv, parse_breakdown_lines, summary_csv,
};
use iotier_core::{
    best_cache_rate, explore_grid, parse_darshan_text, parse_native_trace, sweep_analysis,
    sweep_cells, write_native_trace, ImprovementSpec, IoClass, IoRecord, MountMap, RunConfig,
    TraceCell,
};

use crate::io_util;

/// Command failure with its exit-code category.
#[derive(Debug)]
pub enum CmdError {
    /// Bad flags or configuration -> exit 2.
    Usage(String),
    /// Unreadable or inconsistent input data -> exit 3.
    Data(String),
    /// Filesystem trouble -> exit 1.
    Io(String),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(m) | CmdError::Data(m) | CmdError::Io(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> CmdError {
    CmdError::Usage(e.to_string())
}

fn data(e: impl fmt::Display) -> CmdError {
    CmdError::Data(e.to_string())
}

fn load_config(path: &Path) -> Result<RunConfig, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(usage)
}

// ── simulate ─────────────────────────────────────────────────────────────────

pub fn simulate(config_path: &Path, out_dir: &Path) -> Result<(), CmdError> {
    let config = load_config(config_path)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CmdError::Io(format!("cannot create {}: {e}", out_dir.display())))?;

    let fractions = config.sweep_fractions();
    let mut written = 0usize;
    let mut rate_index = 0usize;
    let mut last_rate = f64::NAN;
    sweep_cells(
        &config.dataset,
        &config.cluster,
        &config.storage,
        &config.sim,
        &fractions,
        |cell| {
            if cell.cache_rate != last_rate {
                if !last_rate.is_nan() {
                    rate_index += 1;
                }
                last_rate = cell.cache_rate;
            }
            // name files by the configured percent, not the fraction
            let rate_pct = config.sweep[rate_index];
            let name = format!("trace_r{}_e{}.jsonl", fmt_pct(rate_pct), cell.epoch);
            let path = out_dir.join(name);
            let file = fs::File::create(&path).map_err(iotier_core::Error::Io)?;
            let mut writer = std::io::BufWriter::new(file);
            write_native_trace(&cell.sim.records, &mut writer)?;
            use std::io::Write;
            writer.flush().map_err(iotier_core::Error::Io)?;
            written += 1;
            Ok(())
        },
    )
    .map_err(|e| match e {
        iotier_core::Error::Io(io) => CmdError::Io(io.to_string()),
        other => usage(other),
    })?;
    eprintln!("wrote {written} trace files to {}", out_dir.display());
    Ok(())
}

// ── ingest ───────────────────────────────────────────────────────────────────

pub fn ingest(
    input: &str,
    epoch: u64,
    gfs_prefixes: Vec<String>,
    lfs_prefixes: Vec<String>,
    config: Option<&Path>,
    strict: bool,
    out: &str,
) -> Result<(), CmdError> {
    let mounts = if !gfs_prefixes.is_empty() || !lfs_prefixes.is_empty() {
        MountMap::new(gfs_prefixes, lfs_prefixes).map_err(usage)?
    } else if let Some(config_path) = config {
        let config = load_config(config_path)?;
        let m = config.mounts.ok_or_else(|| {
            CmdError::Usage(format!(
                "config {} has no \"mounts\" section",
                config_path.display()
            ))
        })?;
        MountMap::new(m.gfs_prefixes, m.lfs_prefixes).map_err(usage)?
    } else {
        return Err(CmdError::Usage(
            "mount prefixes required: pass --gfs-prefix/--lfs-prefix or --config".into(),
        ));
    };

    let reader = io_util::open_input(input)?;
    let parsed = parse_darshan_text(reader, &mounts, epoch, strict).map_err(data)?;
    if !strict {
        eprintln!("skipped {} record(s)", parsed.skipped);
    }

    let mut writer = io_util::open_output(out)?;
    write_native_trace(&parsed.records, &mut writer)
        .map_err(|e| CmdError::Io(e.to_string()))?;
    use std::io::Write;
    writer.flush().map_err(|e| CmdError::Io(e.to_string()))?;
    Ok(())
}

// ── analyze ──────────────────────────────────────────────────────────────────

/// Extract the cache-rate percent from a `trace_r{rate}_e{epoch}.jsonl` name.
fn rate_from_trace_name(path: &Path) -> Result<f64, CmdError> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CmdError::Data(format!("bad trace path {}", path.display())))?;
    let invalid = || {
        CmdError::Data(format!(
            "trace file name {name:?} does not match trace_r{{rate}}_e{{epoch}}.jsonl"
        ))
    };
    let rest = name.strip_prefix("trace_r").ok_or_else(invalid)?;
    let (rate_str, _) = rest.split_once("_e").ok_or_else(invalid)?;
    let pct: f64 = rate_str.parse().map_err(|_| invalid())?;
    if !(0.0..=100.0).contains(&pct) {
        return Err(CmdError::Data(format!(
            "cache rate {pct} in {name:?} outside [0, 100]"
        )));
    }
    // normalize a literal "-0" so the bit-pattern grouping key stays ordered
    Ok(pct + 0.0)
}

fn expand_trace_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CmdError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut in_dir: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| CmdError::Io(format!("cannot list {}: {e}", input.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("trace_") && n.ends_with(".jsonl"))
                })
                .collect();
            in_dir.sort();
            files.extend(in_dir);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(CmdError::Usage("empty input set: no trace files to analyze".into()));
    }
    Ok(files)
}

pub fn analyze(
    inputs: &[PathBuf],
    summary_out: &str,
    breakdowns_out: Option<&Path>,
) -> Result<(), CmdError> {
    let files = expand_trace_inputs(inputs)?;

    // group records by (rate, epoch); positive-float bit order == numeric order
    let mut cells: std::collections::BTreeMap<(u64, u64), Vec<IoRecord>> =
        std::collections::BTreeMap::new();
    for file in &files {
        let pct = rate_from_trace_name(file)?;
        let reader = io_util::open_input(&file.to_string_lossy())?;
        let records = parse_native_trace(reader)
            .map_err(|e| CmdError::Data(format!("{}: {e}", file.display())))?;
        for r in records {
            cells.entry((pct.to_bits(), r.epoch)).or_default().push(r);
        }
    }
    if cells.is_empty() {
        return Err(CmdError::Data("trace files hold no records".into()));
    }

    let trace_cells: Vec<TraceCell> = cells
        .into_iter()
        .map(|((bits, epoch), records)| TraceCell {
            cache_rate_pct: f64::from_bits(bits),
            epoch,
            records,
        })
        .collect();
    let sweep = sweep_analysis(trace_cells).map_err(data)?;

    io_util::write_string(summary_out, &summary_csv(&sweep))?;
    if let Some(path) = breakdowns_out {
        io_util::write_string(&path.to_string_lossy(), &breakdown_lines(&sweep))?;
    }
    Ok(())
}

// ── estimate / explore ───────────────────────────────────────────────────────

fn parse_class(token: &str) -> Result<IoClass, CmdError> {
    IoClass::parse_name(token).ok_or_else(|| {
        CmdError::Usage(format!(
            "unknown I/O class {token:?}; valid names are GFS-READ, GFS-META, LFS-READ, LFS-META"
        ))
    })
}

fn parse_improvements(flags: &[String]) -> Result<ImprovementSpec, CmdError> {
    let mut entries = Vec::with_capacity(flags.len());
    for flag in flags {
        let (class_token, pct_token) = flag.split_once('=').ok_or_else(|| {
            CmdError::Usage(format!("improvement {flag:?} must look like GFS-META=50"))
        })?;
        let class = parse_class(class_token)?;
        let pct: f64 = pct_token.parse().map_err(|_| {
            CmdError::Usage(format!("improvement rate {pct_token:?} is not a number"))
        })?;
        entries.push((class, pct));
    }
    ImprovementSpec::new(entries).map_err(usage)
}

fn load_breakdowns(path: &Path) -> Result<iotier_core::SweepResult, CmdError> {
    let text = io_util::read_to_string(path)?;
    parse_breakdown_lines(&text).map_err(data)
}

pub fn estimate(breakdowns: &Path, epoch: u64, improvements: &[String]) -> Result<(), CmdError> {
    let imp = parse_improvements(improvements)?;
    let sweep = load_breakdowns(breakdowns)?;
    if !sweep.has_epoch(epoch) {
        return Err(CmdError::Data(format!(
            "{} has no records for epoch {epoch}",
            breakdowns.display()
        )));
    }
    let (base_rate, base) =
        best_cache_rate(&sweep, epoch, &ImprovementSpec::identity()).map_err(data)?;
    let (improved_rate, improved) = best_cache_rate(&sweep, epoch, &imp).map_err(data)?;
    print!("{}", estimate_csv(base_rate, &base, improved_rate, &improved));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn explore(
    breakdowns: &Path,
    epoch: u64,
    class_a: &str,
    class_b: &str,
    max_percent: f64,
    step: f64,
    goal_s: f64,
    out: &str,
) -> Result<(), CmdError> {
    let class_a = parse_class(class_a)?;
    let class_b = parse_class(class_b)?;
    if class_a == class_b {
        return Err(CmdError::Usage(format!("grid classes must differ, both are {class_a}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(CmdError::Usage(format!("--step must be > 0, got {step}")));
    }
    if !(max_percent.is_finite() && max_percent >= 0.0) {
        return Err(CmdError::Usage(format!("--max-percent must be >= 0, got {max_percent}")));
    }
    if !(goal_s.is_finite() && goal_s > 0.0) {
        return Err(CmdError::Usage(format!("--goal-s must be > 0, got {goal_s}")));
    }
    let sweep = load_breakdowns(breakdowns)?;
    if !sweep.has_epoch(epoch) {
        return Err(CmdError::Data(format!(
            "{} has no records for epoch {epoch}",
            breakdowns.display()
        )));
    }
    let grid =
        explore_grid(&sweep, epoch, class_a, class_b, max_percent, step, goal_s).map_err(data)?;
    io_util::write_string(out, &grid_csv(&grid))?;
    Ok(())
}
