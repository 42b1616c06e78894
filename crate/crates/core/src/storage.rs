//! Analytic storage simulator: a closed-form stand-in for cluster-scale
//! measurement. Read bandwidth is split fair-share across the processes
//! contending for each tier; global-filesystem metadata latency comes from a
//! fixed point that couples metadata-server load to per-file cycle time, so
//! a slower global tier relieves metadata pressure the way a real shared
//! metadata server does.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{keyed_rng, standard_normal};
use crate::trace::{FileId, FsTier, IoRecord};
use crate::workload::{assign_cache, build_shuffle_plan, CacheAssignment, CacheConfig,
                      ClusterSpec, DatasetSpec, ShufflePlan};

/// Performance knobs of the two storage tiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageProfile {
    /// Read bandwidth of one GFS object storage target, bytes/s.
    pub ost_read_bw: f64,
    /// Read bandwidth of one local SSD, bytes/s.
    pub ssd_read_bw: f64,
    /// Uncontended GFS open+close latency, seconds.
    pub gfs_meta_base_s: f64,
    /// GFS metadata server capacity, operations/s.
    pub gfs_meta_capacity: f64,
    /// LFS open+close latency, seconds (node-local, no shared server).
    pub lfs_meta_s: f64,
}

impl StorageProfile {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("storage.ost_read_bw", self.ost_read_bw),
            ("storage.ssd_read_bw", self.ssd_read_bw),
            ("storage.gfs_meta_base_s", self.gfs_meta_base_s),
            ("storage.gfs_meta_capacity", self.gfs_meta_capacity),
            ("storage.lfs_meta_s", self.lfs_meta_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Simulation controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOptions {
    pub seed: u64,
    /// Log-normal sigma of the per-rank multiplicative time factor.
    /// Zero makes every rank factor exactly 1.
    pub jitter_sigma: f64,
    pub epochs: u64,
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return Err(Error::invalid(format!(
                "sim.jitter_sigma must be >= 0, got {}",
                self.jitter_sigma
            )));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("sim.epochs must be >= 1"));
        }
        Ok(())
    }
}

/// Solved GFS metadata latency under load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaSolution {
    pub meta_time_s: f64,
    /// Congestion multiplier over the uncontended latency, >= 1.
    pub load_factor: f64,
    pub iterations: u32,
}

const META_RESIDUAL_TOL: f64 = 1e-12;
const META_MAX_ITERATIONS: u32 = 200;

/// Solve the metadata fixed point `m = L0 * max(1, P / (C * (m + r)))`.
///
/// `active_gfs_procs` is the effective number of processes issuing GFS
/// metadata ops and `per_file_gfs_read_s` the per-file read time, so
/// `P / (m + r)` is the aggregate metadata arrival rate. The residual
/// `f(m) = m - L0 * max(1, P / (C * (m + r)))` is strictly increasing, so
/// bisection on `[L0, L0 * max(1, P / (C * (L0 + r)))]` converges to the
/// unique root.
pub fn solve_meta_latency(
    profile: &StorageProfile,
    active_gfs_procs: f64,
    per_file_gfs_read_s: f64,
) -> Result<MetaSolution> {
    profile.validate()?;
    let p = active_gfs_procs;
    let r = per_file_gfs_read_s;
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::invalid(format!("active_gfs_procs must be >= 0, got {p}")));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(format!("per_file_gfs_read_s must be > 0, got {r}")));
    }
    let l0 = profile.gfs_meta_base_s;
    let c = profile.gfs_meta_capacity;

    let load = |m: f64| (p / (c * (m + r))).max(1.0);
    let residual = |m: f64| m - l0 * load(m);

    // Below capacity the max clamps at 1 and the root is the base latency.
    if p / (c * (l0 + r)) <= 1.0 {
        return Ok(MetaSolution { meta_time_s: l0, load_factor: 1.0, iterations: 0 });
    }

    let mut lo = l0;
    let mut hi = l0 * load(l0);
    if residual(lo) > 0.0 || residual(hi) < 0.0 {
        return Err(Error::Internal(format!(
            "metadata fixed point bracket failed (lo={lo}, hi={hi})"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    let mut iterations = 0;
    while iterations < META_MAX_ITERATIONS {
        iterations += 1;
        mid = 0.5 * (lo + hi);
        let f = residual(mid);
        if f.abs() <= META_RESIDUAL_TOL {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MetaSolution { meta_time_s: mid, load_factor: load(mid), iterations })
}

/// One simulated epoch: per-file records plus per-rank totals. The reported
/// total of a rank is the exact sum of its record times.
#[derive(Debug, Clone)]
pub struct EpochSim {
    pub records: Vec<IoRecord>,
    pub rank_totals: Vec<f64>,
}

/// Per-rank multiplicative jitter factor, keyed by (seed, epoch, rank).
fn jitter_factor(seed: u64, epoch: u64, rank: u64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let mut rng = keyed_rng(seed, epoch, rank, b"jitter\0\0");
    (sigma * standard_normal(&mut rng)).exp()
}

/// Simulate one epoch of the workload against the storage profile.
pub fn simulate_epoch(
    dataset: &DatasetSpec,
    cluster: &ClusterSpec,
    cache: &CacheAssignment,
    plan: &ShufflePlan,
    profile: &StorageProfile,
    opts: &SimOptions,
) -> Result<EpochSim> {
    dataset.validate()?;
    cluster.validate()?;
    profile.validate()?;
    opts.validate()?;
    let total_procs = cluster.total_procs();
    if plan.n_procs() as u64 != total_procs {
        return Err(Error::invalid(format!(
            "shuffle plan has {} ranks but the cluster runs {}",
            plan.n_procs(),
            total_procs
        )));
    }
    if cache.k > dataset.file_count {
        return Err(Error::invalid("cache assignment exceeds dataset file count"));
    }
    let assigned: u64 = plan.assignment.iter().map(|l| l.len() as u64).sum();
    if assigned != dataset.file_count {
        return Err(Error::invalid(format!(
            "shuffle plan covers {assigned} files but the dataset has {}",
            dataset.file_count
        )));
    }

    let procs_f = total_procs as f64;
    let bw_gfs = cluster.gfs_ost_count as f64 * profile.ost_read_bw / procs_f;
    let bw_lfs = profile.ssd_read_bw / cluster.procs_per_ssd() as f64;
    let read_gfs = dataset.file_size_bytes as f64 / bw_gfs;
    let read_lfs = dataset.file_size_bytes as f64 / bw_lfs;

    // Effective metadata load: the share of processes whose reads hit GFS.
    let gfs_files = dataset.file_count - cache.k;
    let active_gfs_procs = procs_f * gfs_files as f64 / dataset.file_count as f64;
    let meta_gfs = if gfs_files == 0 {
        profile.gfs_meta_base_s
    } else {
        solve_meta_latency(profile, active_gfs_procs, read_gfs)?.meta_time_s
    };
    let meta_lfs = profile.lfs_meta_s;

    let mut records = Vec::with_capacity(dataset.file_count as usize);
    let mut rank_totals = Vec::with_capacity(plan.n_procs());
    for (rank, files) in plan.assignment.iter().enumerate() {
        let rank = rank as u64;
        let jitter = jitter_factor(opts.seed, plan.epoch, rank, opts.jitter_sigma);
        let mut total = 0.0f64;
        for &file_id in files {
            let (fs, read_s, meta_s) = if cache.contains(file_id) {
                (FsTier::Lfs, jitter * read_lfs, jitter * meta_lfs)
            } else {
                (FsTier::Gfs, jitter * read_gfs, jitter * meta_gfs)
            };
            total += read_s + meta_s;
            records.push(IoRecord {
                rank,
                epoch: plan.epoch,
                file_id: FileId::Num(file_id),
                fs,
                bytes: dataset.file_size_bytes,
                read_s,
                meta_s,
            });
        }
        rank_totals.push(total);
    }
    Ok(EpochSim { records, rank_totals })
}

/// One (cache rate, epoch) cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepCellTrace {
    /// Cache rate as a fraction in [0, 1].
    pub cache_rate: f64,
    pub epoch: u64,
    pub sim: EpochSim,
}

fn validate_rates(cache_rates: &[f64]) -> Result<()> {
    if cache_rates.is_empty() {
        return Err(Error::invalid("cache rate list must be non-empty"));
    }
    for &r in cache_rates {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::invalid(format!("cache rate {r} outside [0, 1]")));
        }
    }
    if cache_rates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("cache rate list must be strictly increasing"));
    }
    Ok(())
}

/// Run the cache-rate sweep, invoking `visit` once per (rate, epoch) cell in
/// ascending (rate, epoch) order. Cells are independent and identically
/// seeded, so results do not depend on evaluation order.
pub fn sweep_cells(
    dataset: &DatasetSpec,
    cluster: &ClusterSpec,
    profile: &StorageProfile,
    opts: &SimOptions,
    cache_rates: &[f64],
    mut visit: impl FnMut(SweepCellTrace) -> Result<()>,
) -> Result<()> {
    validate_rates(cache_rates)?;
    opts.validate()?;
    for &rate in cache_rates {
        let cache = assign_cache(dataset, &CacheConfig::new(rate)?)?;
        for epoch in 0..opts.epochs {
            let plan = build_shuffle_plan(dataset, cluster.total_procs(), epoch, opts.seed)?;
            let sim = simulate_epoch(dataset, cluster, &cache, &plan, profile, opts)?;
            visit(SweepCellTrace { cache_rate: rate, epoch, sim })?;
        }
    }
    Ok(())
}

/// Run the sweep and collect every cell's traces.
pub fn simulate_sweep(
    dataset: &DatasetSpec,
    cluster: &ClusterSpec,
    profile: &StorageProfile,
    opts: &SimOptions,
    cache_rates: &[f64],
) -> Result<Vec<SweepCellTrace>> {
    let mut cells = Vec::with_capacity(cache_rates.len() * opts.epochs.max(1) as usize);
    sweep_cells(dataset, cluster, profile, opts, cache_rates, |cell| {
        cells.push(cell);
        Ok(())
    })?;
    Ok(cells)
}
