//! What-if estimation of storage improvements. An N% throughput improvement
//! of an I/O class scales that class's measured time by 100/(100+N). Every
//! rank's total is recomputed and the slowest rank re-picked, because an
//! improvement can migrate the bottleneck to another rank or class. On top
//! of that sit the best-cache-rate search and the two-class feasibility grid
//! against an I/O-time goal.

use std::collections::BTreeMap;

use crate::breakdown::{ClassBreakdown, IoClass, SweepResult};
use crate::error::{Error, Result};

/// Hypothetical per-class improvement rates, at most one entry per class.
/// An empty spec is the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImprovementSpec {
    entries: Vec<(IoClass, f64)>,
}

impl ImprovementSpec {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(entries: Vec<(IoClass, f64)>) -> Result<Self> {
        for (i, &(class, pct)) in entries.iter().enumerate() {
            if !(pct.is_finite() && pct >= 0.0) {
                return Err(Error::invalid(format!(
                    "improvement rate for {class} must be >= 0, got {pct}"
                )));
            }
            if entries[..i].iter().any(|&(c, _)| c == class) {
                return Err(Error::invalid(format!("duplicate improvement class {class}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn single(class: IoClass, pct: f64) -> Result<Self> {
        Self::new(vec![(class, pct)])
    }

    pub fn pair(class_a: IoClass, pct_a: f64, class_b: IoClass, pct_b: f64) -> Result<Self> {
        Self::new(vec![(class_a, pct_a), (class_b, pct_b)])
    }

    pub fn entries(&self) -> &[(IoClass, f64)] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|&(_, pct)| pct == 0.0)
    }

    /// Scaling factor 100/(100+N) for a class, 1 if the class is untargeted.
    pub fn factor(&self, class: IoClass) -> f64 {
        self.entries
            .iter()
            .find(|&&(c, _)| c == class)
            .map_or(1.0, |&(_, pct)| 100.0 / (100.0 + pct))
    }
}

/// Scale each targeted class of a breakdown by its improvement factor.
pub fn apply_improvement(b: &ClassBreakdown, imp: &ImprovementSpec) -> ClassBreakdown {
    let mut out = b.clone();
    for &(class, _) in imp.entries() {
        out.set_class_s(class, b.class_s(class) * imp.factor(class));
    }
    out
}

/// Estimated slowest process after an improvement.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub slowest_rank: u64,
    pub est_total_s: f64,
    pub est_breakdown: ClassBreakdown,
    pub improvements: ImprovementSpec,
}

/// Apply the improvement to every rank and re-pick the slowest; ties go to
/// the lowest rank id.
pub fn estimate_slowest(
    all_ranks: &BTreeMap<u64, ClassBreakdown>,
    imp: &ImprovementSpec,
) -> Result<EstimateResult> {
    let mut best: Option<(f64, ClassBreakdown)> = None;
    for b in all_ranks.values() {
        let improved = apply_improvement(b, imp);
        let total = improved.total();
        if best.as_ref().is_none_or(|(t, _)| total > *t) {
            best = Some((total, improved));
        }
    }
    let (est_total_s, est_breakdown) =
        best.ok_or_else(|| Error::invalid("empty breakdown map"))?;
    Ok(EstimateResult {
        slowest_rank: est_breakdown.rank,
        est_total_s,
        est_breakdown,
        improvements: imp.clone(),
    })
}

/// Find the swept cache rate (percent) minimizing the estimated slowest
/// time for one epoch; ties go to the lowest rate.
pub fn best_cache_rate(
    sweep: &SweepResult,
    epoch: u64,
    imp: &ImprovementSpec,
) -> Result<(f64, EstimateResult)> {
    let mut best: Option<(f64, EstimateResult)> = None;
    for cell in sweep.cells_for_epoch(epoch) {
        let est = estimate_slowest(&cell.per_rank, imp)?;
        if best.as_ref().is_none_or(|(_, b)| est.est_total_s < b.est_total_s) {
            best = Some((cell.cache_rate_pct, est));
        }
    }
    best.ok_or_else(|| Error::invalid(format!("sweep has no cells for epoch {epoch}")))
}

/// One cell of the feasibility grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub imp_a_pct: f64,
    pub imp_b_pct: f64,
    pub feasible: bool,
    /// Smallest swept cache rate meeting the goal; present iff feasible.
    pub min_cache_rate_pct: Option<f64>,
    pub best_time_s: f64,
}

/// Two-class improvement grid evaluated against an I/O-time goal.
#[derive(Debug, Clone)]
pub struct FeasibilityGrid {
    pub class_a: IoClass,
    pub class_b: IoClass,
    /// Improvement percentages on both axes: 0, step, ..., <= max.
    pub rates_pct: Vec<f64>,
    pub goal_s: f64,
    /// Row-major: index = ia * rates_pct.len() + ib.
    pub cells: Vec<GridCell>,
}

impl FeasibilityGrid {
    pub fn cell(&self, ia: usize, ib: usize) -> &GridCell {
        &self.cells[ia * self.rates_pct.len() + ib]
    }
}

fn grid_rates(max_percent: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(format!("grid step must be > 0, got {step}")));
    }
    if !(max_percent.is_finite() && max_percent >= 0.0) {
        return Err(Error::invalid(format!("grid max must be >= 0, got {max_percent}")));
    }
    let mut rates = Vec::new();
    let mut i = 0u32;
    loop {
        let r = i as f64 * step;
        if r > max_percent + 1e-9 {
            break;
        }
        rates.push(r);
        i += 1;
    }
    Ok(rates)
}

/// Evaluate every (Na, Nb) improvement pair of the grid: its best achievable
/// slowest time over the sweep, whether that meets the goal, and the
/// smallest swept cache rate that meets it (which may differ from the
/// best-time rate).
pub fn explore_grid(
    sweep: &SweepResult,
    epoch: u64,
    class_a: IoClass,
    class_b: IoClass,
    max_percent: f64,
    step: f64,
    goal_s: f64,
) -> Result<FeasibilityGrid> {
    if class_a == class_b {
        return Err(Error::invalid(format!("grid classes must differ, both are {class_a}")));
    }
    if !(goal_s.is_finite() && goal_s > 0.0) {
        return Err(Error::invalid(format!("goal must be > 0 seconds, got {goal_s}")));
    }
    if !sweep.has_epoch(epoch) {
        return Err(Error::invalid(format!("sweep has no cells for epoch {epoch}")));
    }
    let rates_pct = grid_rates(max_percent, step)?;
    let mut cells = Vec::with_capacity(rates_pct.len() * rates_pct.len());
    for &na in &rates_pct {
        for &nb in &rates_pct {
            let imp = ImprovementSpec::pair(class_a, na, class_b, nb)?;
            let mut best_time = f64::INFINITY;
            let mut min_rate: Option<f64> = None;
            // cells_for_epoch iterates in ascending cache-rate order, so the
            // first rate meeting the goal is the minimum one
            for cell in sweep.cells_for_epoch(epoch) {
                let est = estimate_slowest(&cell.per_rank, &imp)?;
                if est.est_total_s < best_time {
                    best_time = est.est_total_s;
                }
                if min_rate.is_none() && est.est_total_s <= goal_s {
                    min_rate = Some(cell.cache_rate_pct);
                }
            }
            let feasible = best_time <= goal_s;
            cells.push(GridCell {
                imp_a_pct: na,
                imp_b_pct: nb,
                feasible,
                min_cache_rate_pct: if feasible { min_rate } else { None },
                best_time_s: best_time,
            });
        }
    }
    Ok(FeasibilityGrid { class_a, class_b, rates_pct, goal_s, cells })
}
