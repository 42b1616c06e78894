//! Browser bindings for the analysis toolkit. Three operations drive the
//! demo page: run a cache-rate sweep on the simulator, re-estimate it under
//! hypothetical class improvements, and evaluate the two-class feasibility
//! grid against an I/O-time goal. All exchange is JSON strings so the page
//! needs no framework.
//!
//! The bundled presets are the full-scale workloads shrunk 12x (256 ranks
//! instead of 3072) with per-process bandwidth shares and metadata load per
//! capacity preserved, so the regime behavior matches the full presets while
//! staying interactive in the browser.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use wasm_bindgen::prelude::*;

use iotier_core::{
    best_cache_rate, breakdown_epoch, explore_grid, slowest, sweep_cells, ClassBreakdown,
    ClusterSpec, DatasetSpec, ImprovementSpec, IoClass, RunConfig, SimOptions, StorageProfile,
    SweepCell, SweepResult,
};

// JsValue cannot be constructed off-wasm, so the implementations return
// plain strings and the #[wasm_bindgen] wrappers convert at the boundary.
fn err_str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// ── exchange documents ───────────────────────────────────────────────────────

#[derive(Serialize, Deserialize)]
struct RankDoc {
    rank: u64,
    /// seconds per class in GFS-READ, GFS-META, LFS-READ, LFS-META order
    s: [f64; 4],
}

#[derive(Serialize, Deserialize)]
struct CellDoc {
    rate_pct: f64,
    epoch: u64,
    slowest_rank: u64,
    classes: [f64; 4],
    total_s: f64,
    ranks: Vec<RankDoc>,
}

#[derive(Serialize, Deserialize)]
struct SweepDoc {
    rates_pct: Vec<f64>,
    epochs: Vec<u64>,
    cells: Vec<CellDoc>,
}

fn classes_of(b: &ClassBreakdown) -> [f64; 4] {
    [
        b.class_s(IoClass::GfsRead),
        b.class_s(IoClass::GfsMeta),
        b.class_s(IoClass::LfsRead),
        b.class_s(IoClass::LfsMeta),
    ]
}

fn to_doc(sweep: &SweepResult) -> SweepDoc {
    let mut rates_pct: Vec<f64> = sweep.cells.iter().map(|c| c.cache_rate_pct).collect();
    rates_pct.dedup();
    SweepDoc {
        rates_pct,
        epochs: sweep.epochs(),
        cells: sweep
            .cells
            .iter()
            .map(|cell| CellDoc {
                rate_pct: cell.cache_rate_pct,
                epoch: cell.epoch,
                slowest_rank: cell.analysis.slowest_rank,
                classes: classes_of(&cell.analysis.breakdown),
                total_s: cell.analysis.total_s,
                ranks: cell
                    .per_rank
                    .values()
                    .map(|b| RankDoc { rank: b.rank, s: classes_of(b) })
                    .collect(),
            })
            .collect(),
    }
}

fn from_doc(doc: &SweepDoc) -> Result<SweepResult, iotier_core::Error> {
    let mut result = SweepResult::default();
    for cell in &doc.cells {
        let per_rank: BTreeMap<u64, ClassBreakdown> = cell
            .ranks
            .iter()
            .map(|r| (r.rank, ClassBreakdown::with_seconds(r.rank, cell.epoch, r.s)))
            .collect();
        let analysis = slowest(&per_rank)?;
        result.cells.push(SweepCell {
            cache_rate_pct: cell.rate_pct,
            epoch: cell.epoch,
            analysis,
            per_rank,
        });
    }
    result.sort();
    Ok(result)
}

// ── presets ──────────────────────────────────────────────────────────────────

const GIB: f64 = 1073741824.0;

fn demo_cluster(gfs_ost_count: u64) -> ClusterSpec {
    ClusterSpec { nodes: 64, procs_per_node: 4, nodes_per_ssd: 16, gfs_ost_count }
}

fn demo_storage(ost_read_bw: f64) -> StorageProfile {
    StorageProfile {
        ost_read_bw,
        ssd_read_bw: 1.0 * GIB,
        gfs_meta_base_s: 0.0003,
        // full-scale capacity divided by the 12x rank shrink keeps the
        // metadata fixed point at the same operating point
        gfs_meta_capacity: 1250.0,
        lfs_meta_s: 0.00025,
    }
}

fn demo_config(dataset: DatasetSpec, cluster: ClusterSpec, storage: StorageProfile) -> RunConfig {
    RunConfig {
        dataset,
        cluster,
        storage,
        sim: SimOptions { seed: 42, jitter_sigma: 0.02, epochs: 1 },
        sweep: (0..=20).map(|i| (i * 5) as f64).collect(),
        batch_size: None,
        prefetch: None,
        mounts: None,
    }
}

#[derive(Serialize)]
struct PresetDoc {
    name: String,
    label: String,
    config: RunConfig,
}

/// Demo preset configurations as JSON.
#[wasm_bindgen]
pub fn presets() -> String {
    let small = DatasetSpec::new(49_152, 131_072);
    let large = DatasetSpec::new(512, 12 * 1024 * 1024);
    let list = vec![
        PresetDoc {
            name: "small_fast".into(),
            label: "128 KiB files, fast GFS (5 OSTs)".into(),
            config: demo_config(small.clone(), demo_cluster(5), demo_storage(4.0 * GIB)),
        },
        PresetDoc {
            name: "small_slow".into(),
            label: "128 KiB files, slow GFS (1 OST)".into(),
            config: demo_config(small, demo_cluster(1), demo_storage(4.0 * GIB / 12.0)),
        },
        PresetDoc {
            name: "large_fast".into(),
            label: "12 MiB files, fast GFS (5 OSTs)".into(),
            config: demo_config(large, demo_cluster(5), demo_storage(4.0 * GIB)),
        },
    ];
    serde_json::to_string(&list).expect("preset serialization")
}

// ── operations ───────────────────────────────────────────────────────────────

fn run_sweep_impl(config_json: &str) -> Result<String, String> {
    let config = RunConfig::from_json(config_json).map_err(err_str)?;
    let mut result = SweepResult::default();
    // cells arrive rates-outer in sweep order; label them with the
    // configured percent rather than fraction * 100
    let epochs = config.sim.epochs as usize;
    let mut cell_index = 0usize;
    sweep_cells(
        &config.dataset,
        &config.cluster,
        &config.storage,
        &config.sim,
        &config.sweep_fractions(),
        |cell| {
            let rate_pct = config.sweep[cell_index / epochs];
            cell_index += 1;
            let per_rank = breakdown_epoch(&cell.sim.records, cell.epoch)?;
            let analysis = slowest(&per_rank)?;
            result.cells.push(SweepCell {
                cache_rate_pct: rate_pct,
                epoch: cell.epoch,
                analysis,
                per_rank,
            });
            Ok(())
        },
    )
    .map_err(err_str)?;
    result.sort();
    Ok(serde_json::to_string(&to_doc(&result)).expect("sweep serialization"))
}

/// Simulate the configured cache-rate sweep and analyze every cell.
/// Input: a run configuration document. Output: a sweep document holding the
/// slowest-rank summary and all per-rank breakdowns per (rate, epoch).
#[wasm_bindgen]
pub fn run_sweep(config_json: &str) -> Result<String, JsValue> {
    run_sweep_impl(config_json).map_err(|e| JsValue::from_str(&e))
}

#[derive(Deserialize)]
struct ImprovementDoc {
    class: String,
    pct: f64,
}

fn parse_improvements(json: &str) -> Result<ImprovementSpec, String> {
    let docs: Vec<ImprovementDoc> = serde_json::from_str(json).map_err(err_str)?;
    let mut entries = Vec::with_capacity(docs.len());
    for doc in docs {
        let class = IoClass::parse_name(&doc.class).ok_or_else(|| {
            format!(
                "unknown I/O class {:?}; valid names are GFS-READ, GFS-META, LFS-READ, LFS-META",
                doc.class
            )
        })?;
        entries.push((class, doc.pct));
    }
    ImprovementSpec::new(entries).map_err(err_str)
}

#[derive(Serialize)]
struct EstimatePointDoc {
    rate_pct: f64,
    slowest_rank: u64,
    classes: [f64; 4],
    total_s: f64,
}

#[derive(Serialize)]
struct EstimateDoc {
    series: Vec<EstimatePointDoc>,
    baseline_best_rate_pct: f64,
    baseline_best_total_s: f64,
    best_rate_pct: f64,
    best_total_s: f64,
    reduction_pct: f64,
}

fn estimate_sweep_impl(
    sweep_json: &str,
    epoch: u64,
    improvements_json: &str,
) -> Result<String, String> {
    let doc: SweepDoc = serde_json::from_str(sweep_json).map_err(err_str)?;
    let sweep = from_doc(&doc).map_err(err_str)?;
    let imp = parse_improvements(improvements_json)?;

    let mut series = Vec::new();
    for cell in sweep.cells_for_epoch(epoch) {
        let est = iotier_core::estimate_slowest(&cell.per_rank, &imp).map_err(err_str)?;
        series.push(EstimatePointDoc {
            rate_pct: cell.cache_rate_pct,
            slowest_rank: est.slowest_rank,
            classes: classes_of(&est.est_breakdown),
            total_s: est.est_total_s,
        });
    }
    if series.is_empty() {
        return Err(format!("sweep has no cells for epoch {epoch}"));
    }
    let (baseline_rate, baseline) =
        best_cache_rate(&sweep, epoch, &ImprovementSpec::identity()).map_err(err_str)?;
    let (best_rate, best) = best_cache_rate(&sweep, epoch, &imp).map_err(err_str)?;
    let out = EstimateDoc {
        series,
        baseline_best_rate_pct: baseline_rate,
        baseline_best_total_s: baseline.est_total_s,
        best_rate_pct: best_rate,
        best_total_s: best.est_total_s,
        reduction_pct: 100.0 * (1.0 - best.est_total_s / baseline.est_total_s),
    };
    Ok(serde_json::to_string(&out).expect("estimate serialization"))
}

/// Re-estimate a sweep under class improvements given as
/// `[{"class":"GFS-META","pct":50}, ...]`, returning the per-rate estimated
/// slowest breakdowns plus baseline and improved best points.
#[wasm_bindgen]
pub fn estimate_sweep(
    sweep_json: &str,
    epoch: u32,
    improvements_json: &str,
) -> Result<String, JsValue> {
    estimate_sweep_impl(sweep_json, epoch as u64, improvements_json)
        .map_err(|e| JsValue::from_str(&e))
}

#[derive(Serialize)]
struct GridCellDoc {
    feasible: bool,
    min_cache_rate_pct: Option<f64>,
    best_time_s: f64,
}

#[derive(Serialize)]
struct GridDoc {
    class_a: String,
    class_b: String,
    rates_pct: Vec<f64>,
    goal_s: f64,
    /// row-major: cells[ia][ib]
    cells: Vec<Vec<GridCellDoc>>,
}

fn feasibility_grid_impl(
    sweep_json: &str,
    epoch: u64,
    class_a: &str,
    class_b: &str,
    max_percent: f64,
    step: f64,
    goal_s: f64,
) -> Result<String, String> {
    let doc: SweepDoc = serde_json::from_str(sweep_json).map_err(err_str)?;
    let sweep = from_doc(&doc).map_err(err_str)?;
    let a = IoClass::parse_name(class_a)
        .ok_or_else(|| format!("unknown I/O class {class_a:?}"))?;
    let b = IoClass::parse_name(class_b)
        .ok_or_else(|| format!("unknown I/O class {class_b:?}"))?;
    let grid = explore_grid(&sweep, epoch, a, b, max_percent, step, goal_s).map_err(err_str)?;

    let n = grid.rates_pct.len();
    let mut cells = Vec::with_capacity(n);
    for ia in 0..n {
        let mut row = Vec::with_capacity(n);
        for ib in 0..n {
            let cell = grid.cell(ia, ib);
            row.push(GridCellDoc {
                feasible: cell.feasible,
                min_cache_rate_pct: cell.min_cache_rate_pct,
                best_time_s: cell.best_time_s,
            });
        }
        cells.push(row);
    }
    let out = GridDoc {
        class_a: a.name().to_string(),
        class_b: b.name().to_string(),
        rates_pct: grid.rates_pct.clone(),
        goal_s,
        cells,
    };
    Ok(serde_json::to_string(&out).expect("grid serialization"))
}

/// Evaluate the two-class feasibility grid against a goal.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn feasibility_grid(
    sweep_json: &str,
    epoch: u32,
    class_a: &str,
    class_b: &str,
    max_percent: f64,
    step: f64,
    goal_s: f64,
) -> Result<String, JsValue> {
    feasibility_grid_impl(sweep_json, epoch as u64, class_a, class_b, max_percent, step, goal_s)
        .map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config_json() -> String {
        let config = demo_config(
            DatasetSpec::new(512, 131_072),
            ClusterSpec { nodes: 8, procs_per_node: 2, nodes_per_ssd: 4, gfs_ost_count: 2 },
            demo_storage(0.5 * GIB),
        );
        let mut config = config;
        config.sweep = vec![0.0, 50.0, 100.0];
        config.to_json_pretty()
    }

    #[test]
    fn presets_are_valid_configs() {
        let list: Vec<serde_json::Value> = serde_json::from_str(&presets()).unwrap();
        assert_eq!(list.len(), 3);
        for preset in &list {
            let config = RunConfig::from_json(&preset["config"].to_string()).unwrap();
            assert_eq!(config.cluster.total_procs(), 256);
        }
    }

    #[test]
    fn sweep_estimate_grid_flow() {
        let sweep_json = run_sweep_impl(&tiny_config_json()).unwrap();
        let doc: SweepDoc = serde_json::from_str(&sweep_json).unwrap();
        assert_eq!(doc.cells.len(), 3);
        assert_eq!(doc.cells[0].ranks.len(), 16);

        let est_json =
            estimate_sweep_impl(&sweep_json, 0, r#"[{"class":"GFS-META","pct":50}]"#).unwrap();
        let est: serde_json::Value = serde_json::from_str(&est_json).unwrap();
        assert_eq!(est["series"].as_array().unwrap().len(), 3);
        assert!(est["best_total_s"].as_f64().unwrap() <= est["baseline_best_total_s"].as_f64().unwrap());

        let goal = est["baseline_best_total_s"].as_f64().unwrap() * 0.9;
        let grid_json =
            feasibility_grid_impl(&sweep_json, 0, "GFS-META", "LFS-READ", 100.0, 25.0, goal)
                .unwrap();
        let grid: serde_json::Value = serde_json::from_str(&grid_json).unwrap();
        assert_eq!(grid["rates_pct"].as_array().unwrap().len(), 5);
        assert_eq!(grid["cells"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn errors_surface_as_strings() {
        assert!(run_sweep_impl("{}").is_err());
        let sweep_json = run_sweep_impl(&tiny_config_json()).unwrap();
        assert!(estimate_sweep_impl(&sweep_json, 9, "[]").is_err());
        assert!(estimate_sweep_impl(&sweep_json, 0, r#"[{"class":"gfs_meta","pct":1}]"#).is_err());
        assert!(
            feasibility_grid_impl(&sweep_json, 0, "GFS-META", "GFS-META", 10.0, 5.0, 1.0)
                .is_err()
        );
    }
}
