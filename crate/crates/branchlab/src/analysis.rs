//! Bounds computation, per-iteration statistics assembly, and correlation
//! analysis over instrumented runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bfs::BfsRunResult;
use crate::cc::CcRunResult;
use crate::graph::Graph;
use crate::tracer::TraceSnapshot;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("need at least 3 usable samples, got {found}")]
    NotEnoughSamples { found: usize },
    #[error("iteration counts differ: branch-based has {based}, branch-avoiding has {avoiding}")]
    IterationCountMismatch { based: usize, avoiding: usize },
}

/// Per-iteration (or per-BFS-level) record of the measured quantities:
/// time, an instruction proxy, branches, mispredictions, loads, stores.
///
/// `ops` is the instruction proxy: loads + stores + branch evaluations +
/// conditional moves + arithmetic updates. No real instruction counter
/// exists in simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub index: usize,
    pub wall_time_s: f64,
    pub ops: u64,
    pub branches: u64,
    pub mispredictions: u64,
    pub loads: u64,
    pub stores: u64,
    pub edges_traversed: u64,
}

impl IterationStats {
    /// Assembles one row from a counter delta plus externally measured time
    /// and traversed-edge count.
    pub fn from_delta(
        index: usize,
        wall_time_s: f64,
        delta: &TraceSnapshot,
        edges_traversed: u64,
    ) -> Self {
        let branches = delta.total_evaluations();
        IterationStats {
            index,
            wall_time_s,
            ops: delta.loads
                + delta.stores
                + branches
                + delta.conditional_moves
                + delta.arithmetic_updates,
            branches,
            mispredictions: delta.total_mispredictions(),
            loads: delta.loads,
            stores: delta.stores,
            edges_traversed,
        }
    }
}

/// Measured mispredictions of one run against the model's analytic bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub algorithm: String,
    pub measured_mispredictions: u64,
    pub lower_bound: u64,
    pub upper_bound: Option<u64>,
    pub ratio_to_lower: f64,
}

/// Slack covering the O(1) terms of the loop lemmas: up to 3 misses each for
/// the while and vertex loops.
const SV_LOWER_CONSTANT: u64 = 6;

/// Slack covering the O(1) terms in the BFS bound (3 + 3 + 2).
pub const BFS_BOUND_SLACK: u64 = 8;

/// Misprediction lower bound for label propagation: the inner neighbor loop
/// is a repeated loop executed `iterations * |V|` times, costing about one
/// miss per execution, plus a constant for the two outer loop sites. No
/// analytic upper bound exists: the label-improvement branch is
/// graph-dependent.
pub fn sv_bounds(run: &CcRunResult, graph: &Graph, algorithm: &str) -> BoundsReport {
    let measured = run.totals.total_mispredictions();
    let lower = run.iterations as u64 * graph.num_vertices() as u64 + SV_LOWER_CONSTANT;
    BoundsReport {
        algorithm: algorithm.to_string(),
        measured_mispredictions: measured,
        lower_bound: lower,
        upper_bound: None,
        ratio_to_lower: measured as f64 / lower as f64,
    }
}

/// Misprediction bounds for top-down BFS reaching `|V̂|` vertices: about
/// `|V̂|` misses from the adjacency loop on the low end, `3|V̂| + O(1)` on
/// the high end (adjacency loop + doubled discovery-branch misses + loop
/// constants).
pub fn bfs_bounds(run: &BfsRunResult, algorithm: &str) -> BoundsReport {
    let measured = run.totals.total_mispredictions();
    let reached = run.queue.len() as u64;
    let lower = reached;
    let upper = 3 * reached + BFS_BOUND_SLACK;
    BoundsReport {
        algorithm: algorithm.to_string(),
        measured_mispredictions: measured,
        lower_bound: lower,
        upper_bound: Some(upper),
        ratio_to_lower: if lower == 0 {
            f64::NAN
        } else {
            measured as f64 / lower as f64
        },
    }
}

/// Labels of the six correlated quantities, in matrix order:
/// time, instruction proxy, branches, mispredictions, loads, stores.
pub const METRIC_LABELS: [&str; 6] = ["T", "I", "B", "M", "L", "S"];

/// Symmetric 6x6 Pearson matrix over the per-edge-normalized quantities.
/// Entries paired with a zero-variance column are `None` (undefined) rather
/// than NaN; the diagonal is 1 by convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub entries: [[Option<f64>; 6]; 6],
}

impl CorrelationMatrix {
    pub fn get(&self, row: usize, column: usize) -> Option<f64> {
        self.entries[row][column]
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// Pairwise Pearson correlations among {T, I, B, M, L, S}, each sample
/// normalized per traversed edge first. Samples with zero traversed edges
/// are dropped; at least 3 usable samples are required.
pub fn correlate(samples: &[IterationStats]) -> Result<CorrelationMatrix, AnalysisError> {
    let usable: Vec<&IterationStats> = samples
        .iter()
        .filter(|s| s.edges_traversed > 0)
        .collect();
    if usable.len() < 3 {
        return Err(AnalysisError::NotEnoughSamples {
            found: usable.len(),
        });
    }

    let columns: Vec<Vec<f64>> = (0..6)
        .map(|metric| {
            usable
                .iter()
                .map(|s| {
                    let per_edge = 1.0 / s.edges_traversed as f64;
                    match metric {
                        0 => s.wall_time_s * per_edge,
                        1 => s.ops as f64 * per_edge,
                        2 => s.branches as f64 * per_edge,
                        3 => s.mispredictions as f64 * per_edge,
                        4 => s.loads as f64 * per_edge,
                        _ => s.stores as f64 * per_edge,
                    }
                })
                .collect()
        })
        .collect();

    let mut entries = [[None; 6]; 6];
    for i in 0..6 {
        entries[i][i] = Some(1.0);
        for j in (i + 1)..6 {
            let value = pearson(&columns[i], &columns[j]);
            entries[i][j] = value;
            entries[j][i] = value;
        }
    }
    Ok(CorrelationMatrix { entries })
}

/// One row of the per-iteration comparison table. Time ratios are relative
/// to the fastest branch-based iteration; count ratios compare the two
/// variants directly and are `None` when the denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub iteration: usize,
    pub time_ratio_based: f64,
    pub time_ratio_avoiding: f64,
    /// based / avoiding
    pub branch_ratio: Option<f64>,
    /// based / avoiding
    pub misprediction_ratio: Option<f64>,
    /// avoiding / based (the store blow-up direction)
    pub store_ratio: Option<f64>,
}

/// Column sums over the compared runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariantTotals {
    pub wall_time_s: f64,
    pub ops: u64,
    pub branches: u64,
    pub mispredictions: u64,
    pub loads: u64,
    pub stores: u64,
}

impl VariantTotals {
    fn accumulate(samples: &[IterationStats]) -> Self {
        let mut totals = VariantTotals::default();
        for s in samples {
            totals.wall_time_s += s.wall_time_s;
            totals.ops += s.ops;
            totals.branches += s.branches;
            totals.mispredictions += s.mispredictions;
            totals.loads += s.loads;
            totals.stores += s.stores;
        }
        totals
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
    pub totals_based: VariantTotals,
    pub totals_avoiding: VariantTotals,
    /// Total branch-based time over total branch-avoiding time.
    pub speedup: f64,
}

fn ratio(numerator: u64, denominator: u64) -> Option<f64> {
    (denominator != 0).then(|| numerator as f64 / denominator as f64)
}

/// Builds the per-iteration comparison between a branch-based and a
/// branch-avoiding run of the same algorithm on the same graph. Iteration
/// (or level) counts must match; the equivalence invariant guarantees this
/// for runs on the same input.
pub fn iteration_ratio_table(
    based: &[IterationStats],
    avoiding: &[IterationStats],
) -> Result<RatioTable, AnalysisError> {
    if based.len() != avoiding.len() {
        return Err(AnalysisError::IterationCountMismatch {
            based: based.len(),
            avoiding: avoiding.len(),
        });
    }
    let fastest_based = based
        .iter()
        .map(|s| s.wall_time_s)
        .fold(f64::INFINITY, f64::min);
    let rows = based
        .iter()
        .zip(avoiding)
        .map(|(b, a)| RatioRow {
            iteration: b.index,
            time_ratio_based: b.wall_time_s / fastest_based,
            time_ratio_avoiding: a.wall_time_s / fastest_based,
            branch_ratio: ratio(b.branches, a.branches),
            misprediction_ratio: ratio(b.mispredictions, a.mispredictions),
            store_ratio: ratio(a.stores, b.stores),
        })
        .collect();
    let totals_based = VariantTotals::accumulate(based);
    let totals_avoiding = VariantTotals::accumulate(avoiding);
    let speedup = totals_based.wall_time_s / totals_avoiding.wall_time_s;
    Ok(RatioTable {
        rows,
        totals_based,
        totals_avoiding,
        speedup,
    })
}
