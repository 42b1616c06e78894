//! Per-rank I/O profile records and the two on-disk formats that carry them:
//! darshan-parser text dumps (ingest only) and the toolkit's native
//! line-delimited JSON trace.
//!
//! A record's filesystem tier is resolved by longest-prefix matching of the
//! file path against configured mount prefixes, not by trusting whatever
//! fs-type column the profiler emitted.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Storage tier a file operation was served from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FsTier {
    #[serde(rename = "GFS")]
    Gfs,
    #[serde(rename = "LFS")]
    Lfs,
}

impl fmt::Display for FsTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FsTier::Gfs => "GFS",
            FsTier::Lfs => "LFS",
        })
    }
}

/// Opaque file identifier: a plain index for simulated traces, a darshan
/// record id (numeric or not) for ingested ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FileId {
    Num(u64),
    Name(String),
}

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileId::Num(n) => write!(f, "{n}"),
            FileId::Name(s) => f.write_str(s),
        }
    }
}

/// One per-rank per-file profile entry: cumulative read seconds and metadata
/// (open/close) seconds on one tier.
#[derive(Debug, Clone, PartialEq)]
pub struct IoRecord {
    pub rank: u64,
    pub epoch: u64,
    pub file_id: FileId,
    pub fs: FsTier,
    pub bytes: u64,
    pub read_s: f64,
    pub meta_s: f64,
}

// ── Mount resolution ─────────────────────────────────────────────────────────

/// Maps absolute path prefixes to storage tiers; longest match wins.
#[derive(Debug, Clone)]
pub struct MountMap {
    gfs_prefixes: Vec<String>,
    lfs_prefixes: Vec<String>,
}

fn normalize_prefix(p: &str) -> Result<String> {
    if !p.starts_with('/') {
        return Err(Error::invalid(format!(
            "mount prefix must be an absolute path, got {p:?}"
        )));
    }
    let trimmed = p.trim_end_matches('/');
    Ok(if trimmed.is_empty() { "/".to_string() } else { trimmed.to_string() })
}

fn prefix_matches(prefix: &str, path: &str) -> bool {
    if prefix == "/" {
        return path.starts_with('/');
    }
    // Match only at a path-component boundary: /gfs matches /gfs/x but not /gfsx.
    path == prefix
        || (path.starts_with(prefix) && path.as_bytes().get(prefix.len()) == Some(&b'/'))
}

impl MountMap {
    pub fn new(gfs_prefixes: Vec<String>, lfs_prefixes: Vec<String>) -> Result<Self> {
        if gfs_prefixes.is_empty() || lfs_prefixes.is_empty() {
            return Err(Error::invalid("mount prefix lists must be non-empty"));
        }
        let gfs: Vec<String> =
            gfs_prefixes.iter().map(|p| normalize_prefix(p)).collect::<Result<_>>()?;
        let lfs: Vec<String> =
            lfs_prefixes.iter().map(|p| normalize_prefix(p)).collect::<Result<_>>()?;
        for g in &gfs {
            if lfs.contains(g) {
                return Err(Error::invalid(format!(
                    "mount prefix {g:?} appears in both the GFS and LFS lists"
                )));
            }
        }
        Ok(Self { gfs_prefixes: gfs, lfs_prefixes: lfs })
    }

    /// Resolve a path to its tier by longest prefix match, or `None` if no
    /// configured prefix matches.
    pub fn resolve(&self, path: &str) -> Option<FsTier> {
        let mut best: Option<(usize, FsTier)> = None;
        for (list, tier) in
            [(&self.gfs_prefixes, FsTier::Gfs), (&self.lfs_prefixes, FsTier::Lfs)]
        {
            for p in list {
                if prefix_matches(p, path) {
                    let len = p.len();
                    if best.is_none_or(|(l, _)| len > l) {
                        best = Some((len, tier));
                    }
                }
            }
        }
        best.map(|(_, t)| t)
    }
}

// ── darshan-parser text ingest ────────────────────────────────────────────────

const COUNTER_READ: &str = "POSIX_F_READ_TIME";
const COUNTER_META: &str = "POSIX_F_META_TIME";

/// Result of one darshan-text parse: merged records plus how many records
/// lenient mode dropped (shared rank −1 or unmatched mount).
#[derive(Debug)]
pub struct DarshanParse {
    pub records: Vec<IoRecord>,
    pub skipped: usize,
}

struct PendingRecord {
    rank: i64,
    record_id: String,
    file_name: String,
    read_s: f64,
    meta_s: f64,
    first_line: usize,
}

/// Parse darshan-parser text output. Data lines carry eight whitespace
/// separated fields: module, rank, record id, counter, value, file name,
/// mount point, fs type. Only POSIX read/meta time counters are consumed;
/// the two counters of one (rank, record id) merge into one record, stamped
/// with the supplied epoch.
pub fn parse_darshan_text(
    reader: impl BufRead,
    mounts: &MountMap,
    epoch: u64,
    strict: bool,
) -> Result<DarshanParse> {
    let mut pending: Vec<PendingRecord> = Vec::new();
    let mut index: HashMap<(i64, String), usize> = HashMap::new();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(Error::parse(
                lineno,
                format!("expected 8 fields, found {}", fields.len()),
            ));
        }
        let (module, rank_s, record_id, counter, value_s, file_name, _mount_pt, _fs_type) = (
            fields[0], fields[1], fields[2], fields[3], fields[4], fields[5], fields[6], fields[7],
        );
        if module != "POSIX" || (counter != COUNTER_READ && counter != COUNTER_META) {
            continue;
        }
        let rank: i64 = rank_s
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid rank {rank_s:?}")))?;
        if rank < -1 {
            return Err(Error::parse(lineno, format!("invalid rank {rank}")));
        }
        let value: f64 = value_s
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid counter value {value_s:?}")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::parse(lineno, format!("invalid counter value {value}")));
        }

        let key = (rank, record_id.to_string());
        let idx = *index.entry(key).or_insert_with(|| {
            pending.push(PendingRecord {
                rank,
                record_id: record_id.to_string(),
                file_name: file_name.to_string(),
                read_s: 0.0,
                meta_s: 0.0,
                first_line: lineno,
            });
            pending.len() - 1
        });
        match counter {
            COUNTER_READ => pending[idx].read_s += value,
            _ => pending[idx].meta_s += value,
        }
    }

    let mut records = Vec::with_capacity(pending.len());
    let mut skipped = 0usize;
    for rec in pending {
        if rec.rank == -1 {
            if strict {
                return Err(Error::parse(
                    rec.first_line,
                    format!("unattributable shared record {}", rec.record_id),
                ));
            }
            skipped += 1;
            continue;
        }
        let fs = match mounts.resolve(&rec.file_name) {
            Some(fs) => fs,
            None => {
                if strict {
                    return Err(Error::parse(
                        rec.first_line,
                        format!("no mount prefix matches {:?}", rec.file_name),
                    ));
                }
                skipped += 1;
                continue;
            }
        };
        let file_id = match rec.record_id.parse::<u64>() {
            Ok(n) => FileId::Num(n),
            Err(_) => FileId::Name(rec.record_id),
        };
        records.push(IoRecord {
            rank: rec.rank as u64,
            epoch,
            file_id,
            fs,
            bytes: 0,
            read_s: rec.read_s,
            meta_s: rec.meta_s,
        });
    }
    Ok(DarshanParse { records, skipped })
}

// ── Native trace format ──────────────────────────────────────────────────────

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeLine {
    rank: u64,
    epoch: u64,
    file_id: FileId,
    fs: FsTier,
    bytes: u64,
    read_s: f64,
    meta_s: f64,
}

/// Parse the native trace format: one JSON object per line with exactly the
/// fields rank, epoch, file_id, fs, bytes, read_s, meta_s.
pub fn parse_native_trace(reader: impl BufRead) -> Result<Vec<IoRecord>> {
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: NativeLine = serde_json::from_str(&line)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        if parsed.read_s < 0.0 || parsed.meta_s < 0.0 {
            return Err(Error::parse(lineno, "negative time value"));
        }
        records.push(IoRecord {
            rank: parsed.rank,
            epoch: parsed.epoch,
            file_id: parsed.file_id,
            fs: parsed.fs,
            bytes: parsed.bytes,
            read_s: parsed.read_s,
            meta_s: parsed.meta_s,
        });
    }
    Ok(records)
}

/// Serialize one record as a native trace line (no trailing newline).
/// Field order is fixed and times carry nine significant digits, so the
/// round-trip error stays relative no matter how small per-file times get.
pub fn native_trace_line(r: &IoRecord) -> String {
    let file_id = match &r.file_id {
        FileId::Num(n) => n.to_string(),
        // serde_json handles escaping for non-numeric ids
        FileId::Name(s) => serde_json::to_string(s).expect("string serialization"),
    };
    format!(
        "{{\"rank\":{},\"epoch\":{},\"file_id\":{},\"fs\":\"{}\",\"bytes\":{},\"read_s\":{:.8e},\"meta_s\":{:.8e}}}",
        r.rank, r.epoch, file_id, r.fs, r.bytes, r.read_s, r.meta_s
    )
}

/// Write records in the native trace format, one line per record.
pub fn write_native_trace(records: &[IoRecord], mut writer: impl Write) -> Result<()> {
    for r in records {
        writer.write_all(native_trace_line(r).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
