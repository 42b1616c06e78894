//! Analysis toolkit for distributed-training I/O on a two-tier storage
//! system (a large global filesystem fronted by node-near SSD caches).
//!
//! The pipeline has three stages:
//!
//! 1. **Measure or simulate.** [`storage`] provides an analytic simulator
//!    that plays a training epoch (every dataset file read exactly once,
//!    globally shuffled across ranks, a pinned subset served from the local
//!    tier) against a storage profile, and emits per-file traces. Real
//!    measurements enter through [`trace`], which ingests darshan-parser
//!    text dumps.
//! 2. **Break down.** [`breakdown`] classifies each record's time into the
//!    four I/O classes (GFS-READ, GFS-META, LFS-READ, LFS-META), sums them
//!    per rank, and finds the slowest process of each epoch, the quantity
//!    that bounds synchronized training.
//! 3. **Estimate.** [`estimate`] scales chosen classes by 100/(100+N) to
//!    model an N% throughput improvement, re-picks the slowest rank, finds
//!    the best cache rate, and maps which two-class improvement pairs meet
//!    an I/O-time goal.

pub mod breakdown;
pub mod config;
pub mod error;
pub mod estimate;
pub mod report;
mod rng;
pub mod storage;
pub mod trace;
pub mod workload;

pub use breakdown::{
    breakdown_epoch, classify, slowest, sweep_analysis, ClassBreakdown, EpochAnalysis, IoClass,
    OpKind, SweepCell, SweepResult, TraceCell,
};
pub use config::{MountConfig, RunConfig};
pub use error::{Error, Result};
pub use estimate::{
    apply_improvement, best_cache_rate, estimate_slowest, explore_grid, EstimateResult,
    FeasibilityGrid, GridCell, ImprovementSpec,
};
pub use storage::{
    simulate_epoch, simulate_sweep, solve_meta_latency, sweep_cells, EpochSim, MetaSolution,
    SimOptions, StorageProfile, SweepCellTrace,
};
pub use trace::{
    parse_darshan_text, parse_native_trace, write_native_trace, DarshanParse, FileId, FsTier,
    IoRecord, MountMap,
};
pub use workload::{
    assign_cache, build_shuffle_plan, CacheAssignment, CacheConfig, CachePolicy, ClusterSpec,
    DatasetSpec, ShufflePlan,
};
