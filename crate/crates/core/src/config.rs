//! Run configuration: a single JSON document with exact key names, unknown
//! keys rejected. Presets mirror the two dataset geometries (128 KiB small
//! files, 12 MiB large files) and the two global-filesystem speeds (all
//! OSTs vs. a single OST).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::storage::{SimOptions, StorageProfile};
use crate::workload::{ClusterSpec, DatasetSpec};

const GIB: f64 = 1073741824.0;

/// Mount prefixes for trace ingest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountConfig {
    pub gfs_prefixes: Vec<String>,
    pub lfs_prefixes: Vec<String>,
}

/// Full toolkit configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSpec,
    pub cluster: ClusterSpec,
    pub storage: StorageProfile,
    pub sim: SimOptions,
    /// Cache rates to sweep, in percent, strictly increasing.
    pub sweep: Vec<f64>,
    /// Recorded for experiment fidelity; does not change modeled I/O totals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<u64>,
    /// Recorded for experiment fidelity; does not change modeled I/O totals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefetch: Option<bool>,
    /// Mount prefixes, used by ingest only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mounts: Option<MountConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization")
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset.validate()?;
        self.cluster.validate()?;
        self.storage.validate()?;
        self.sim.validate()?;
        if self.sweep.is_empty() {
            return Err(Error::invalid("sweep must list at least one cache rate"));
        }
        for &pct in &self.sweep {
            if !(0.0..=100.0).contains(&pct) {
                return Err(Error::invalid(format!("sweep rate {pct} outside [0, 100]")));
            }
        }
        if self.sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep rates must be strictly increasing"));
        }
        if self.dataset.file_count < self.cluster.total_procs() {
            return Err(Error::invalid(format!(
                "dataset.file_count ({}) must be >= total processes ({})",
                self.dataset.file_count,
                self.cluster.total_procs()
            )));
        }
        if let Some(m) = &self.mounts {
            crate::trace::MountMap::new(m.gfs_prefixes.clone(), m.lfs_prefixes.clone())?;
        }
        Ok(())
    }

    /// Sweep rates converted to fractions in [0, 1].
    pub fn sweep_fractions(&self) -> Vec<f64> {
        self.sweep.iter().map(|p| p / 100.0).collect()
    }

    /// 589824 x 128 KiB files on 3072 processes with all 60 OSTs. The
    /// GFS metadata server congests at low cache rates, the shared SSDs
    /// saturate at high ones, so the best cache rate is interior.
    pub fn preset_small_fast() -> Self {
        RunConfig {
            dataset: DatasetSpec::new(589_824, 131_072),
            cluster: ClusterSpec {
                nodes: 768,
                procs_per_node: 4,
                nodes_per_ssd: 16,
                gfs_ost_count: 60,
            },
            storage: StorageProfile {
                ost_read_bw: 4.0 * GIB,
                ssd_read_bw: 1.0 * GIB,
                gfs_meta_base_s: 0.0003,
                gfs_meta_capacity: 15_000.0,
                lfs_meta_s: 0.00025,
            },
            sim: SimOptions { seed: 42, jitter_sigma: 0.02, epochs: 3 },
            sweep: (0..=20).map(|i| (i * 5) as f64).collect(),
            batch_size: Some(12),
            prefetch: Some(true),
            mounts: None,
        }
    }

    /// Same workload with the GFS limited to a single OST: reads starve long
    /// before the metadata server does.
    pub fn preset_small_slow() -> Self {
        let mut config = Self::preset_small_fast();
        config.cluster.gfs_ost_count = 1;
        config
    }

    /// 6144 x 12 MiB files: few metadata operations, so the GFS delivers its
    /// full bandwidth and the local tier rarely helps.
    pub fn preset_large_fast() -> Self {
        let mut config = Self::preset_small_fast();
        config.dataset = DatasetSpec::new(6144, 12 * 1024 * 1024);
        config.batch_size = Some(2);
        config
    }
}
