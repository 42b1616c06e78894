//! Report emission with a fixed number format so golden-file comparisons are
//! byte-exact: seconds always carry nine digits after the decimal point,
//! cache/improvement percentages print as integers when whole and with at
//! most three decimals otherwise.

use serde::Deserialize;

use crate::breakdown::{ClassBreakdown, IoClass, SweepCell, SweepResult};
use crate::error::{Error, Result};
use crate::estimate::{EstimateResult, FeasibilityGrid};

pub const SUMMARY_CSV_HEADER: &str =
    "cache_rate_pct,epoch,slowest_rank,gfs_read_s,gfs_meta_s,lfs_read_s,lfs_meta_s,total_s";
pub const GRID_CSV_HEADER: &str = "imp_a_pct,imp_b_pct,feasible,min_cache_rate_pct,best_time_s";
pub const ESTIMATE_CSV_HEADER: &str =
    "baseline_cache_rate_pct,baseline_time_s,improved_cache_rate_pct,improved_time_s,reduction_pct";

/// Seconds with nine digits after the decimal point.
pub fn fmt_seconds(s: f64) -> String {
    format!("{s:.9}")
}

/// Percentages: integer when whole, else up to three decimals with trailing
/// zeros trimmed.
pub fn fmt_pct(p: f64) -> String {
    if (p - p.round()).abs() < 1e-9 {
        format!("{}", p.round() as i64)
    } else {
        let s = format!("{p:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Summary CSV: one row per sweep cell, sorted by (cache rate, epoch).
pub fn summary_csv(sweep: &SweepResult) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for cell in &sweep.cells {
        let b = &cell.analysis.breakdown;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_pct(cell.cache_rate_pct),
            cell.epoch,
            cell.analysis.slowest_rank,
            fmt_seconds(b.class_s(IoClass::GfsRead)),
            fmt_seconds(b.class_s(IoClass::GfsMeta)),
            fmt_seconds(b.class_s(IoClass::LfsRead)),
            fmt_seconds(b.class_s(IoClass::LfsMeta)),
            fmt_seconds(cell.analysis.total_s),
        ));
    }
    out
}

/// Breakdown lines: one JSON object per (cache rate, epoch, rank), in that
/// sort order. This is the interchange format the estimator commands read.
pub fn breakdown_lines(sweep: &SweepResult) -> String {
    let mut out = String::new();
    for cell in &sweep.cells {
        for b in cell.per_rank.values() {
            out.push_str(&breakdown_line(cell.cache_rate_pct, b));
            out.push('\n');
        }
    }
    out
}

fn breakdown_line(cache_rate_pct: f64, b: &ClassBreakdown) -> String {
    format!(
        "{{\"cache_rate_pct\":{},\"epoch\":{},\"rank\":{},\"gfs_read_s\":{:.9},\"gfs_meta_s\":{:.9},\"lfs_read_s\":{:.9},\"lfs_meta_s\":{:.9}}}",
        fmt_pct(cache_rate_pct),
        b.epoch,
        b.rank,
        b.class_s(IoClass::GfsRead),
        b.class_s(IoClass::GfsMeta),
        b.class_s(IoClass::LfsRead),
        b.class_s(IoClass::LfsMeta),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BreakdownLine {
    cache_rate_pct: f64,
    epoch: u64,
    rank: u64,
    gfs_read_s: f64,
    gfs_meta_s: f64,
    lfs_read_s: f64,
    lfs_meta_s: f64,
}

/// Parse a breakdown-lines document back into a sweep result, recomputing
/// each cell's slowest rank.
pub fn parse_breakdown_lines(text: &str) -> Result<SweepResult> {
    let mut cells: Vec<SweepCell> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: BreakdownLine =
            serde_json::from_str(line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        for (name, v) in [
            ("gfs_read_s", parsed.gfs_read_s),
            ("gfs_meta_s", parsed.gfs_meta_s),
            ("lfs_read_s", parsed.lfs_read_s),
            ("lfs_meta_s", parsed.lfs_meta_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::parse(lineno, format!("{name} must be >= 0, got {v}")));
            }
        }
        if !parsed.cache_rate_pct.is_finite() {
            return Err(Error::parse(lineno, "cache_rate_pct must be finite"));
        }
        let b = ClassBreakdown::with_seconds(
            parsed.rank,
            parsed.epoch,
            [parsed.gfs_read_s, parsed.gfs_meta_s, parsed.lfs_read_s, parsed.lfs_meta_s],
        );
        let cell = cells.iter_mut().find(|c| {
            c.cache_rate_pct == parsed.cache_rate_pct && c.epoch == parsed.epoch
        });
        match cell {
            Some(c) => {
                if c.per_rank.insert(parsed.rank, b).is_some() {
                    return Err(Error::parse(
                        lineno,
                        format!(
                            "duplicate rank {} for cache rate {} epoch {}",
                            parsed.rank, parsed.cache_rate_pct, parsed.epoch
                        ),
                    ));
                }
            }
            None => {
                let mut per_rank = std::collections::BTreeMap::new();
                per_rank.insert(parsed.rank, b);
                cells.push(SweepCell {
                    cache_rate_pct: parsed.cache_rate_pct,
                    epoch: parsed.epoch,
                    // placeholder; recomputed below once the cell is complete
                    analysis: crate::breakdown::EpochAnalysis {
                        epoch: parsed.epoch,
                        slowest_rank: parsed.rank,
                        breakdown: ClassBreakdown::new(parsed.rank, parsed.epoch),
                        total_s: 0.0,
                    },
                    per_rank,
                });
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::NoData("breakdown input holds no records".into()));
    }
    for cell in &mut cells {
        cell.analysis = crate::breakdown::slowest(&cell.per_rank)?;
    }
    let mut result = SweepResult { cells };
    result.sort();
    Ok(result)
}

/// Feasibility grid CSV in row-major (imp_a, then imp_b) order.
/// `min_cache_rate_pct` is empty for infeasible cells.
pub fn grid_csv(grid: &FeasibilityGrid) -> String {
    let mut out = String::from(GRID_CSV_HEADER);
    out.push('\n');
    for cell in &grid.cells {
        let min_rate = cell.min_cache_rate_pct.map(fmt_pct).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_pct(cell.imp_a_pct),
            fmt_pct(cell.imp_b_pct),
            cell.feasible,
            min_rate,
            fmt_seconds(cell.best_time_s),
        ));
    }
    out
}

/// Estimate report: baseline vs. improved best (rate, time) and the
/// percentage reduction 100 * (1 - improved/baseline).
pub fn estimate_csv(
    baseline_rate_pct: f64,
    baseline: &EstimateResult,
    improved_rate_pct: f64,
    improved: &EstimateResult,
) -> String {
    let reduction = 100.0 * (1.0 - improved.est_total_s / baseline.est_total_s);
    format!(
        "{}\n{},{},{},{},{}\n",
        ESTIMATE_CSV_HEADER,
        fmt_pct(baseline_rate_pct),
        fmt_seconds(baseline.est_total_s),
        fmt_pct(improved_rate_pct),
        fmt_seconds(improved.est_total_s),
        fmt_seconds(reduction),
    )
}
