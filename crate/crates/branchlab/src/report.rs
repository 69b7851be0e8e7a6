//! Run-report documents: the structured result of a `run` command, its CSV
//! and JSON encodings, and the parser that reads per-iteration samples back
//! for correlation.
//!
//! The CSV layout is versioned by the first header line. Every data row
//! starts with a record tag so mixed sections stay machine-readable:
//!
//! ```text
//! iter,<algorithm>,<variant>,<iteration>,<wall_time_s>,<ops>,<branches>,<mispredictions>,<loads>,<stores>,<edges_traversed>
//! site,<algorithm>,<variant>,<label>,<evaluations>,<taken>,<mispredictions>
//! bound,<algorithm>,<variant>,<measured>,<lower>,<upper|->,<ratio_to_lower>
//! total,<algorithm>,<variant>,<iterations>,<ops>,<branches>,<mispredictions>,<loads>,<stores>
//! ratio,<algorithm>,<iteration>,<time_ratio_based>,<time_ratio_avoiding>,<branch_ratio>,<misprediction_ratio>,<store_ratio>
//! summary,<algorithm>,<key>,<value>
//! ```
//!
//! Wall-clock data appears only in the `wall_time_s` column of `iter` rows,
//! the two `time_ratio_*` columns of `ratio` rows, and `summary` rows whose
//! key starts with `speedup` or `total_time`; everything else is
//! deterministic for a fixed configuration and seed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{BoundsReport, CorrelationMatrix, IterationStats, RatioTable, METRIC_LABELS};
use crate::tracer::SiteSnapshot;

pub const CSV_SCHEMA: &str = "branchlab run report v1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: bad report row: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("unrecognized report format (expected the v1 CSV header or a JSON document)")]
    UnknownFormat,
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Settings echoed into the report header.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportConfig {
    pub algo: String,
    pub variant: String,
    pub source: String,
    pub root: Option<usize>,
    pub init_state: String,
}

/// Aggregate counters of one run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunTotals {
    pub branches: u64,
    pub taken: u64,
    pub mispredictions: u64,
    pub loads: u64,
    pub stores: u64,
    pub conditional_moves: u64,
    pub arithmetic_updates: u64,
    pub ops: u64,
    pub wall_time_s: f64,
}

/// One algorithm/variant result block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmRun {
    pub algorithm: String,
    pub variant: String,
    pub iterations: usize,
    pub per_iteration: Vec<IterationStats>,
    pub sites: Vec<SiteSnapshot>,
    pub totals: RunTotals,
    pub bounds: BoundsReport,
    /// Connected-component count (cc runs).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub components: Option<usize>,
    /// Reached vertex count |V̂| (bfs runs).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reached: Option<usize>,
    /// Traversed edge count |Ê| (bfs runs).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edges_traversed: Option<u64>,
}

/// Cross-variant comparison, present when both variants ran.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Labels (cc) or distances and discovery order (bfs) are identical.
    pub equivalent: bool,
    pub ratio_table: RatioTable,
}

/// The complete result document of one `run` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub config: ReportConfig,
    pub runs: Vec<AlgorithmRun>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<ComparisonReport>,
}

fn opt_f64(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "-".to_string(),
    }
}

impl RunReport {
    pub fn new(config: ReportConfig) -> Self {
        RunReport {
            schema: CSV_SCHEMA.to_string(),
            config,
            runs: Vec::new(),
            comparison: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "# {CSV_SCHEMA}");
        let _ = writeln!(
            out,
            "# config: algo={} variant={} source={} root={} init-state={}",
            c.algo,
            c.variant,
            c.source,
            c.root.map_or("-".to_string(), |r| r.to_string()),
            c.init_state
        );
        let _ = writeln!(out, "# columns iter: record,algorithm,variant,iteration,wall_time_s,ops,branches,mispredictions,loads,stores,edges_traversed");
        let _ = writeln!(
            out,
            "# columns site: record,algorithm,variant,site,evaluations,taken,mispredictions"
        );
        let _ = writeln!(
            out,
            "# columns bound: record,algorithm,variant,measured,lower,upper,ratio_to_lower"
        );
        let _ = writeln!(out, "# columns total: record,algorithm,variant,iterations,ops,branches,mispredictions,loads,stores");
        let _ = writeln!(out, "# columns ratio: record,algorithm,iteration,time_ratio_based,time_ratio_avoiding,branch_ratio,misprediction_ratio,store_ratio");
        let _ = writeln!(out, "# columns summary: record,algorithm,key,value");

        for run in &self.runs {
            for s in &run.per_iteration {
                let _ = writeln!(
                    out,
                    "iter,{},{},{},{},{},{},{},{},{},{}",
                    run.algorithm,
                    run.variant,
                    s.index,
                    s.wall_time_s,
                    s.ops,
                    s.branches,
                    s.mispredictions,
                    s.loads,
                    s.stores,
                    s.edges_traversed
                );
            }
            for site in &run.sites {
                let _ = writeln!(
                    out,
                    "site,{},{},{},{},{},{}",
                    run.algorithm,
                    run.variant,
                    site.label,
                    site.evaluations,
                    site.taken,
                    site.mispredictions
                );
            }
            let b = &run.bounds;
            let _ = writeln!(
                out,
                "bound,{},{},{},{},{},{}",
                run.algorithm,
                run.variant,
                b.measured_mispredictions,
                b.lower_bound,
                b.upper_bound.map_or("-".to_string(), |u| u.to_string()),
                b.ratio_to_lower
            );
            let t = &run.totals;
            let _ = writeln!(
                out,
                "total,{},{},{},{},{},{},{},{}",
                run.algorithm,
                run.variant,
                run.iterations,
                t.ops,
                t.branches,
                t.mispredictions,
                t.loads,
                t.stores
            );
            let _ = writeln!(
                out,
                "summary,{},total_time_s_{},{}",
                run.algorithm, run.variant, t.wall_time_s
            );
            if let Some(components) = run.components {
                let _ = writeln!(
                    out,
                    "summary,{},components_{},{components}",
                    run.algorithm, run.variant
                );
            }
            if let Some(reached) = run.reached {
                let _ = writeln!(
                    out,
                    "summary,{},reached_{},{reached}",
                    run.algorithm, run.variant
                );
            }
            if let Some(edges) = run.edges_traversed {
                let _ = writeln!(
                    out,
                    "summary,{},edges_traversed_{},{edges}",
                    run.algorithm, run.variant
                );
            }
        }

        if let Some(comparison) = &self.comparison {
            let algorithm = &self.config.algo;
            for row in &comparison.ratio_table.rows {
                let _ = writeln!(
                    out,
                    "ratio,{},{},{},{},{},{},{}",
                    algorithm,
                    row.iteration,
                    row.time_ratio_based,
                    row.time_ratio_avoiding,
                    opt_f64(row.branch_ratio),
                    opt_f64(row.misprediction_ratio),
                    opt_f64(row.store_ratio)
                );
            }
            let _ = writeln!(
                out,
                "summary,{},equivalent,{}",
                algorithm, comparison.equivalent
            );
            let _ = writeln!(
                out,
                "summary,{},speedup,{}",
                algorithm, comparison.ratio_table.speedup
            );
        }
        out
    }
}

fn parse_field<T: std::str::FromStr>(
    fields: &[&str],
    index: usize,
    line: usize,
) -> Result<T, ReportError> {
    fields
        .get(index)
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| ReportError::BadRow {
            line,
            reason: format!("field {index} missing or unparsable"),
        })
}

/// Extracts per-iteration samples from report text, accepting either the v1
/// CSV layout or the JSON document.
pub fn parse_samples(text: &str) -> Result<Vec<IterationStats>, ReportError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let report: RunReport = serde_json::from_str(trimmed)?;
        return Ok(report
            .runs
            .iter()
            .flat_map(|r| r.per_iteration.iter().copied())
            .collect());
    }
    if !trimmed.starts_with(&format!("# {CSV_SCHEMA}")) {
        return Err(ReportError::UnknownFormat);
    }
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.first() != Some(&"iter") {
            continue;
        }
        samples.push(IterationStats {
            index: parse_field(&fields, 3, line_no)?,
            wall_time_s: parse_field(&fields, 4, line_no)?,
            ops: parse_field(&fields, 5, line_no)?,
            branches: parse_field(&fields, 6, line_no)?,
            mispredictions: parse_field(&fields, 7, line_no)?,
            loads: parse_field(&fields, 8, line_no)?,
            stores: parse_field(&fields, 9, line_no)?,
            edges_traversed: parse_field(&fields, 10, line_no)?,
        });
    }
    Ok(samples)
}

/// Renders a correlation matrix as CSV: one row per metric, `-` marking
/// undefined entries.
pub fn correlation_to_csv(matrix: &CorrelationMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# branchlab correlation matrix v1");
    let _ = writeln!(out, "# columns: metric,{}", METRIC_LABELS.join(","));
    for (i, label) in METRIC_LABELS.iter().enumerate() {
        let row: Vec<String> = (0..6).map(|j| opt_f64(matrix.get(i, j))).collect();
        let _ = writeln!(out, "{label},{}", row.join(","));
    }
    out
}

pub fn correlation_to_json(matrix: &CorrelationMatrix) -> String {
    #[derive(Serialize)]
    struct View<'a> {
        metrics: [&'a str; 6],
        entries: &'a [[Option<f64>; 6]; 6],
    }
    serde_json::to_string_pretty(&View {
        metrics: METRIC_LABELS,
        entries: &matrix.entries,
    })
    .expect("matrix serialization cannot fail")
}
