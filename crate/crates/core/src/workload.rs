//! Training-side I/O demand: dataset geometry, process layout, per-epoch
//! global shuffle, and pinned-cache placement of files on the local tier.
//!
//! A training epoch reads every file of the dataset exactly once, in a
//! freshly shuffled order that is split evenly across all ranks. A fixed
//! subset of files is pinned to the local filesystem for the whole run, so
//! the cache hit rate equals the cached fraction of the dataset.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rng::{keyed_rng, uniform_below};

/// Geometry of the training dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    /// Number of files in the dataset.
    pub file_count: u64,
    /// Size of each file in bytes.
    pub file_size_bytes: u64,
    /// Samples per file; accepted for fidelity, does not change I/O totals.
    #[serde(default = "default_samples_per_file")]
    pub samples_per_file: u64,
}

fn default_samples_per_file() -> u64 {
    1
}

impl DatasetSpec {
    pub fn new(file_count: u64, file_size_bytes: u64) -> Self {
        Self { file_count, file_size_bytes, samples_per_file: 1 }
    }

    pub fn total_bytes(&self) -> u64 {
        self.file_count * self.file_size_bytes
    }

    pub fn validate(&self) -> Result<()> {
        if self.file_count == 0 {
            return Err(Error::invalid("dataset.file_count must be >= 1"));
        }
        if self.file_size_bytes == 0 {
            return Err(Error::invalid("dataset.file_size_bytes must be >= 1"));
        }
        if self.samples_per_file == 0 {
            return Err(Error::invalid("dataset.samples_per_file must be >= 1"));
        }
        Ok(())
    }
}

/// Machine geometry: compute nodes, process layout, and storage sharing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    /// Compute node count.
    pub nodes: u64,
    /// Processes per compute node.
    pub procs_per_node: u64,
    /// Compute nodes sharing one local SSD.
    pub nodes_per_ssd: u64,
    /// Object storage targets backing the global filesystem.
    pub gfs_ost_count: u64,
}

impl ClusterSpec {
    pub fn total_procs(&self) -> u64 {
        self.nodes * self.procs_per_node
    }

    /// Processes sharing one local SSD.
    pub fn procs_per_ssd(&self) -> u64 {
        self.procs_per_node * self.nodes_per_ssd
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::invalid("cluster.nodes must be >= 1"));
        }
        if self.procs_per_node == 0 {
            return Err(Error::invalid("cluster.procs_per_node must be >= 1"));
        }
        if self.nodes_per_ssd == 0 {
            return Err(Error::invalid("cluster.nodes_per_ssd must be >= 1"));
        }
        if self.gfs_ost_count == 0 {
            return Err(Error::invalid("cluster.gfs_ost_count must be >= 1"));
        }
        Ok(())
    }
}

/// Cache eviction policy. Only pinning exists: the cached set is fixed for
/// the whole run, so cache hit rate equals the cached fraction of the
/// dataset (every file is read the same number of times per epoch).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CachePolicy {
    #[default]
    Pinning,
}

/// Pinned-cache configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheConfig {
    /// Fraction of the dataset resident on the local tier, in [0, 1].
    pub cache_rate: f64,
    pub policy: CachePolicy,
}

impl CacheConfig {
    pub fn new(cache_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&cache_rate) {
            return Err(Error::invalid(format!(
                "cache_rate must be in [0, 1], got {cache_rate}"
            )));
        }
        Ok(Self { cache_rate, policy: CachePolicy::Pinning })
    }

    pub fn from_percent(pct: f64) -> Result<Self> {
        if !(0.0..=100.0).contains(&pct) {
            return Err(Error::invalid(format!(
                "cache rate percent must be in [0, 100], got {pct}"
            )));
        }
        Self::new(pct / 100.0)
    }
}

/// Per-epoch assignment of shuffled file ids to ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShufflePlan {
    pub epoch: u64,
    pub seed: u64,
    /// `assignment[rank]` is that rank's ordered file-id list for the epoch.
    pub assignment: Vec<Vec<u64>>,
}

impl ShufflePlan {
    pub fn n_procs(&self) -> usize {
        self.assignment.len()
    }
}

/// The pinned set of file ids resident on the local tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheAssignment {
    /// Cached file ids; always the `k` lowest ids.
    pub cached_file_ids: BTreeSet<u64>,
    pub k: u64,
}

impl CacheAssignment {
    pub fn contains(&self, file_id: u64) -> bool {
        // Cached set is always {0..k}, so membership is a range check.
        file_id < self.k
    }
}

/// Round half away from zero for non-negative inputs.
pub(crate) fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Build the per-epoch shuffle plan: a seeded Fisher-Yates permutation of all
/// file ids, split into `n_procs` contiguous chunks with sizes balanced
/// within one file.
pub fn build_shuffle_plan(
    dataset: &DatasetSpec,
    n_procs: u64,
    epoch: u64,
    seed: u64,
) -> Result<ShufflePlan> {
    dataset.validate()?;
    if n_procs == 0 {
        return Err(Error::invalid("n_procs must be >= 1"));
    }
    if dataset.file_count < n_procs {
        return Err(Error::invalid(format!(
            "file_count ({}) must be >= n_procs ({})",
            dataset.file_count, n_procs
        )));
    }

    let n = dataset.file_count;
    let mut perm: Vec<u64> = (0..n).collect();
    let mut rng = keyed_rng(seed, epoch, 0, b"shuffle\0");
    // Fisher-Yates, descending, one bounded draw per position.
    for i in (1..n as usize).rev() {
        let j = uniform_below(&mut rng, (i + 1) as u64) as usize;
        perm.swap(i, j);
    }

    let p = n_procs as usize;
    let base = (n / n_procs) as usize;
    let extra = (n % n_procs) as usize;
    let mut assignment = Vec::with_capacity(p);
    let mut offset = 0usize;
    for rank in 0..p {
        let len = base + usize::from(rank < extra);
        assignment.push(perm[offset..offset + len].to_vec());
        offset += len;
    }

    Ok(ShufflePlan { epoch, seed, assignment })
}

/// Pin the `k` lowest file ids, with `k = round_half_up(cache_rate * file_count)`.
pub fn assign_cache(dataset: &DatasetSpec, cache: &CacheConfig) -> Result<CacheAssignment> {
    dataset.validate()?;
    if !(0.0..=1.0).contains(&cache.cache_rate) {
        return Err(Error::invalid(format!(
            "cache_rate must be in [0, 1], got {}",
            cache.cache_rate
        )));
    }
    let k = round_half_up(cache.cache_rate * dataset.file_count as f64).min(dataset.file_count);
    let cached_file_ids: BTreeSet<u64> = (0..k).collect();
    Ok(CacheAssignment { cached_file_ids, k })
}
