//! Four-class I/O time decomposition and slowest-process aggregation.
//!
//! Every profile record contributes its read seconds to the READ class and
//! its metadata seconds to the META class of the tier it was served from.
//! The epoch's I/O time is the total of the slowest rank, since that is what
//! bounds synchronized training progress.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::trace::{FsTier, IoRecord};

/// The four I/O classes: read vs. metadata time per storage tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IoClass {
    GfsRead,
    GfsMeta,
    LfsRead,
    LfsMeta,
}

impl IoClass {
    pub const ALL: [IoClass; 4] =
        [IoClass::GfsRead, IoClass::GfsMeta, IoClass::LfsRead, IoClass::LfsMeta];

    pub fn index(self) -> usize {
        match self {
            IoClass::GfsRead => 0,
            IoClass::GfsMeta => 1,
            IoClass::LfsRead => 2,
            IoClass::LfsMeta => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IoClass::GfsRead => "GFS-READ",
            IoClass::GfsMeta => "GFS-META",
            IoClass::LfsRead => "LFS-READ",
            IoClass::LfsMeta => "LFS-META",
        }
    }

    /// Parse the canonical class name. Matching is exact; `gfs_meta` or
    /// `GFS_META` are rejected so typos never silently select a class.
    pub fn parse_name(s: &str) -> Option<IoClass> {
        IoClass::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for IoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind of file operation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Read,
    Meta,
}

/// Map (tier, operation kind) to its I/O class.
pub fn classify(fs: FsTier, op: OpKind) -> IoClass {
    match (fs, op) {
        (FsTier::Gfs, OpKind::Read) => IoClass::GfsRead,
        (FsTier::Gfs, OpKind::Meta) => IoClass::GfsMeta,
        (FsTier::Lfs, OpKind::Read) => IoClass::LfsRead,
        (FsTier::Lfs, OpKind::Meta) => IoClass::LfsMeta,
    }
}

/// Per-rank, per-epoch seconds in each of the four I/O classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassBreakdown {
    pub rank: u64,
    pub epoch: u64,
    seconds: [f64; 4],
}

impl ClassBreakdown {
    pub fn new(rank: u64, epoch: u64) -> Self {
        Self { rank, epoch, seconds: [0.0; 4] }
    }

    pub fn with_seconds(rank: u64, epoch: u64, seconds: [f64; 4]) -> Self {
        Self { rank, epoch, seconds }
    }

    pub fn class_s(&self, class: IoClass) -> f64 {
        self.seconds[class.index()]
    }

    pub fn set_class_s(&mut self, class: IoClass, s: f64) {
        self.seconds[class.index()] = s;
    }

    pub fn add(&mut self, class: IoClass, s: f64) {
        self.seconds[class.index()] += s;
    }

    pub fn total(&self) -> f64 {
        self.seconds.iter().sum()
    }

    /// The class holding the most time; ties resolve to the first in
    /// `IoClass::ALL` order.
    pub fn dominant_class(&self) -> IoClass {
        let mut best = IoClass::GfsRead;
        for c in IoClass::ALL {
            if self.class_s(c) > self.class_s(best) {
                best = c;
            }
        }
        best
    }
}

/// The slowest rank of one epoch with its breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochAnalysis {
    pub epoch: u64,
    pub slowest_rank: u64,
    pub breakdown: ClassBreakdown,
    pub total_s: f64,
}

/// Sum each rank's record times into its four classes for one epoch.
/// Ranks without records for the epoch are absent from the result.
pub fn breakdown_epoch(records: &[IoRecord], epoch: u64) -> Result<BTreeMap<u64, ClassBreakdown>> {
    let mut per_rank: BTreeMap<u64, ClassBreakdown> = BTreeMap::new();
    for r in records.iter().filter(|r| r.epoch == epoch) {
        let b = per_rank
            .entry(r.rank)
            .or_insert_with(|| ClassBreakdown::new(r.rank, epoch));
        b.add(classify(r.fs, OpKind::Read), r.read_s);
        b.add(classify(r.fs, OpKind::Meta), r.meta_s);
    }
    if per_rank.is_empty() {
        return Err(Error::NoData(format!("no records for epoch {epoch}")));
    }
    Ok(per_rank)
}

/// Pick the rank with the largest total; ties go to the lowest rank id.
pub fn slowest(breakdowns: &BTreeMap<u64, ClassBreakdown>) -> Result<EpochAnalysis> {
    let mut best: Option<&ClassBreakdown> = None;
    for b in breakdowns.values() {
        if best.is_none_or(|cur| b.total() > cur.total()) {
            best = Some(b);
        }
    }
    let best = best.ok_or_else(|| Error::invalid("empty breakdown map"))?;
    Ok(EpochAnalysis {
        epoch: best.epoch,
        slowest_rank: best.rank,
        breakdown: best.clone(),
        total_s: best.total(),
    })
}

/// Records of one sweep cell, tagged with its cache rate (percent) and epoch.
#[derive(Debug, Clone)]
pub struct TraceCell {
    pub cache_rate_pct: f64,
    pub epoch: u64,
    pub records: Vec<IoRecord>,
}

/// Analyzed sweep cell: the slowest-rank summary plus every rank's
/// breakdown. Per-rank breakdowns are retained because a what-if improvement
/// can move the bottleneck to a different rank.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub cache_rate_pct: f64,
    pub epoch: u64,
    pub analysis: EpochAnalysis,
    pub per_rank: BTreeMap<u64, ClassBreakdown>,
}

/// Sweep cells ordered by (cache rate, epoch).
#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn sort(&mut self) {
        self.cells.sort_by(|a, b| {
            a.cache_rate_pct
                .partial_cmp(&b.cache_rate_pct)
                .expect("finite cache rates")
                .then(a.epoch.cmp(&b.epoch))
        });
    }

    pub fn cells_for_epoch(&self, epoch: u64) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(move |c| c.epoch == epoch)
    }

    pub fn has_epoch(&self, epoch: u64) -> bool {
        self.cells.iter().any(|c| c.epoch == epoch)
    }

    pub fn epochs(&self) -> Vec<u64> {
        let mut e: Vec<u64> = self.cells.iter().map(|c| c.epoch).collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// Analyze every sweep cell, retaining all per-rank breakdowns.
pub fn sweep_analysis(cells: Vec<TraceCell>) -> Result<SweepResult> {
    let mut out = SweepResult::default();
    for cell in cells {
        let context = |e: Error| {
            Error::NoData(format!(
                "cache rate {}% epoch {}: {e}",
                cell.cache_rate_pct, cell.epoch
            ))
        };
        if !cell.cache_rate_pct.is_finite() {
            return Err(Error::invalid("cache rate must be finite"));
        }
        let per_rank = breakdown_epoch(&cell.records, cell.epoch).map_err(context)?;
        let analysis = slowest(&per_rank).map_err(context)?;
        out.cells.push(SweepCell {
            cache_rate_pct: cell.cache_rate_pct,
            epoch: cell.epoch,
            analysis,
            per_rank,
        });
    }
    out.sort();
    Ok(out)
}
