//! Command implementations behind the `branchlab` binary: graph generation,
//! instrumented runs, lemma verification, and correlation.
//!
//! Runs separate simulation from timing: counters come from a single pass
//! with a tracing recorder, wall-clock times from repeated passes with the
//! null recorder (per-iteration median), so reported times exclude
//! instrumentation cost.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{
    bfs_bounds, correlate, iteration_ratio_table, sv_bounds, AnalysisError, IterationStats,
};
use crate::bfs::{bfs_branch_avoiding, bfs_branch_based, BfsRunResult};
use crate::cc::{count_components, sv_branch_avoiding, sv_branch_based, CcRunResult};
use crate::graph::{generate_random, load_metis, Graph, GraphError};
use crate::lemmas::{all_passed, run_lemma_checks, LemmaCheck};
use crate::predictor::PredictorState;
use crate::report::{
    correlation_to_csv, correlation_to_json, parse_samples, AlgorithmRun, ComparisonReport,
    ReportConfig, ReportError, RunReport, RunTotals,
};
use crate::tracer::{NullRecorder, TraceRecorder, TraceSnapshot};

/// Fallback seed when neither a flag nor `BRANCHLAB_SEED` provides one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("--root is required when --algo bfs")]
    RootRequired,
    #[error("bad --gen spec {spec:?}: expected N,M[,SEED]")]
    BadGenSpec { spec: String },
    #[error("bad init-state {value:?}: expected one of snt, wnt, wt, st")]
    BadInitState { value: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Cc,
    Bfs,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Cc => "cc",
            Algo::Bfs => "bfs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantSelection {
    Based,
    Avoiding,
    Both,
}

impl VariantSelection {
    pub fn name(self) -> &'static str {
        match self {
            VariantSelection::Based => "based",
            VariantSelection::Avoiding => "avoiding",
            VariantSelection::Both => "both",
        }
    }

    fn variants(self) -> &'static [VariantKind] {
        match self {
            VariantSelection::Based => &[VariantKind::Based],
            VariantSelection::Avoiding => &[VariantKind::Avoiding],
            VariantSelection::Both => &[VariantKind::Based, VariantKind::Avoiding],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VariantKind {
    Based,
    Avoiding,
}

impl VariantKind {
    fn name(self) -> &'static str {
        match self {
            VariantKind::Based => "based",
            VariantKind::Avoiding => "avoiding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum GraphSource {
    File(PathBuf),
    Generated { n: usize, m: usize, seed: u64 },
}

impl GraphSource {
    /// Parses an `N,M[,SEED]` generator spec.
    pub fn parse_gen_spec(spec: &str, default_seed: u64) -> Result<Self, CliError> {
        let bad = || CliError::BadGenSpec {
            spec: spec.to_string(),
        };
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let n = parts[0].trim().parse().map_err(|_| bad())?;
        let m = parts[1].trim().parse().map_err(|_| bad())?;
        let seed = match parts.get(2) {
            Some(s) => s.trim().parse().map_err(|_| bad())?,
            None => default_seed,
        };
        Ok(GraphSource::Generated { n, m, seed })
    }

    fn describe(&self) -> String {
        match self {
            GraphSource::File(path) => format!("file:{}", path.display()),
            GraphSource::Generated { n, m, seed } => format!("gen:{n},{m},{seed}"),
        }
    }

    fn load(&self) -> Result<Graph, CliError> {
        match self {
            GraphSource::File(path) => {
                let file = fs::File::open(path).map_err(|source| CliError::File {
                    path: path.clone(),
                    source,
                })?;
                let graph = load_metis(BufReader::new(file))?;
                Ok(graph)
            }
            GraphSource::Generated { n, m, seed } => Ok(generate_random(*n, *m, *seed)?),
        }
    }
}

pub fn parse_init_state(value: &str) -> Result<PredictorState, CliError> {
    match value {
        "snt" => Ok(PredictorState::StronglyNotTaken),
        "wnt" => Ok(PredictorState::WeaklyNotTaken),
        "wt" => Ok(PredictorState::WeaklyTaken),
        "st" => Ok(PredictorState::StronglyTaken),
        other => Err(CliError::BadInitState {
            value: other.to_string(),
        }),
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: GraphSource,
    pub algo: Algo,
    pub variant: VariantSelection,
    pub root: Option<usize>,
    pub init_state: PredictorState,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Repetitions of the untraced timing pass; the reported time per
    /// iteration is the median across repetitions.
    pub timing_reps: usize,
}

/// Result of `cmd_run`: the report plus whether every requested equivalence
/// check passed.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub checks_passed: bool,
}

/// Generates a G(n, m) graph and writes it as a METIS file.
pub fn cmd_gen(n: usize, m: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let graph = generate_random(n, m, seed)?;
    let mut file = fs::File::create(out).map_err(|source| CliError::File {
        path: out.to_path_buf(),
        source,
    })?;
    graph.write_metis(&mut file).map_err(|source| CliError::File {
        path: out.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Element-wise median over per-iteration times of repeated runs.
fn median_times(mut repetitions: Vec<Vec<f64>>) -> Vec<f64> {
    let len = repetitions.first().map_or(0, Vec::len);
    debug_assert!(repetitions.iter().all(|r| r.len() == len));
    (0..len)
        .map(|i| {
            let mut column: Vec<f64> = repetitions.iter_mut().map(|r| r[i]).collect();
            median(&mut column)
        })
        .collect()
}

fn totals_from_snapshot(snapshot: &TraceSnapshot, wall_time_s: f64) -> RunTotals {
    let branches = snapshot.total_evaluations();
    RunTotals {
        branches,
        taken: snapshot.total_taken(),
        mispredictions: snapshot.total_mispredictions(),
        loads: snapshot.loads,
        stores: snapshot.stores,
        conditional_moves: snapshot.conditional_moves,
        arithmetic_updates: snapshot.arithmetic_updates,
        ops: snapshot.loads
            + snapshot.stores
            + branches
            + snapshot.conditional_moves
            + snapshot.arithmetic_updates,
        wall_time_s,
    }
}

fn apply_timing(per_iteration: &mut [IterationStats], times: &[f64]) -> f64 {
    debug_assert_eq!(per_iteration.len(), times.len());
    let mut total = 0.0;
    for (stats, &t) in per_iteration.iter_mut().zip(times) {
        stats.wall_time_s = t;
        total += t;
    }
    total
}

fn run_cc_variant(graph: &Graph, kind: VariantKind, init_state: PredictorState) -> CcRunResult {
    let mut recorder = TraceRecorder::new(init_state);
    match kind {
        VariantKind::Based => sv_branch_based(graph, &mut recorder),
        VariantKind::Avoiding => sv_branch_avoiding(graph, &mut recorder),
    }
}

fn run_bfs_variant(
    graph: &Graph,
    root: usize,
    kind: VariantKind,
    init_state: PredictorState,
) -> Result<BfsRunResult, CliError> {
    let mut recorder = TraceRecorder::new(init_state);
    Ok(match kind {
        VariantKind::Based => bfs_branch_based(graph, root, &mut recorder)?,
        VariantKind::Avoiding => bfs_branch_avoiding(graph, root, &mut recorder)?,
    })
}

/// Runs the configured algorithm(s), assembles the report, and writes it.
pub fn cmd_run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let graph = config.source.load()?;
    let report_config = ReportConfig {
        algo: config.algo.name().to_string(),
        variant: config.variant.name().to_string(),
        source: config.source.describe(),
        root: config.root,
        init_state: config.init_state.short_name().to_string(),
    };
    let mut report = RunReport::new(report_config);
    let mut checks_passed = true;

    match config.algo {
        Algo::Cc => {
            let mut results = Vec::new();
            for &kind in config.variant.variants() {
                let result = run_cc_variant(&graph, kind, config.init_state);
                let timing: Vec<Vec<f64>> = (0..config.timing_reps.max(1))
                    .map(|_| {
                        let timed = match kind {
                            VariantKind::Based => sv_branch_based(&graph, &mut NullRecorder),
                            VariantKind::Avoiding => sv_branch_avoiding(&graph, &mut NullRecorder),
                        };
                        timed.per_iteration.iter().map(|s| s.wall_time_s).collect()
                    })
                    .collect();
                let times = median_times(timing);
                let mut per_iteration = result.per_iteration.clone();
                let total_time = apply_timing(&mut per_iteration, &times);
                let bounds = sv_bounds(
                    &result,
                    &graph,
                    &format!("cc/{}", kind.name()),
                );
                report.runs.push(AlgorithmRun {
                    algorithm: "cc".to_string(),
                    variant: kind.name().to_string(),
                    iterations: result.iterations,
                    per_iteration,
                    sites: result.totals.sites.clone(),
                    totals: totals_from_snapshot(&result.totals, total_time),
                    bounds,
                    components: Some(count_components(&result.labels)),
                    reached: None,
                    edges_traversed: None,
                });
                results.push((kind, result));
            }
            if let [(_, based), (_, avoiding)] = results.as_slice() {
                let equivalent = based.labels == avoiding.labels
                    && based.iterations == avoiding.iterations;
                checks_passed &= equivalent;
                let ratio_table = iteration_ratio_table(
                    &report.runs[0].per_iteration,
                    &report.runs[1].per_iteration,
                )?;
                report.comparison = Some(ComparisonReport {
                    equivalent,
                    ratio_table,
                });
            }
        }
        Algo::Bfs => {
            let root = config.root.ok_or(CliError::RootRequired)?;
            let mut results = Vec::new();
            for &kind in config.variant.variants() {
                let result = run_bfs_variant(&graph, root, kind, config.init_state)?;
                let timing: Vec<Vec<f64>> = (0..config.timing_reps.max(1))
                    .map(|_| {
                        let timed = match kind {
                            VariantKind::Based => {
                                bfs_branch_based(&graph, root, &mut NullRecorder).expect("root checked")
                            }
                            VariantKind::Avoiding => {
                                bfs_branch_avoiding(&graph, root, &mut NullRecorder)
                                    .expect("root checked")
                            }
                        };
                        timed.per_level.iter().map(|s| s.wall_time_s).collect()
                    })
                    .collect();
                let times = median_times(timing);
                let mut per_iteration = result.per_level.clone();
                let total_time = apply_timing(&mut per_iteration, &times);
                let bounds = bfs_bounds(&result, &format!("bfs/{}", kind.name()));
                report.runs.push(AlgorithmRun {
                    algorithm: "bfs".to_string(),
                    variant: kind.name().to_string(),
                    iterations: result.per_level.len(),
                    per_iteration,
                    sites: result.totals.sites.clone(),
                    totals: totals_from_snapshot(&result.totals, total_time),
                    bounds,
                    components: None,
                    reached: Some(result.queue.len()),
                    edges_traversed: Some(result.edges_traversed),
                });
                results.push((kind, result));
            }
            if let [(_, based), (_, avoiding)] = results.as_slice() {
                let equivalent =
                    based.distances == avoiding.distances && based.queue == avoiding.queue;
                checks_passed &= equivalent;
                let ratio_table = iteration_ratio_table(
                    &report.runs[0].per_iteration,
                    &report.runs[1].per_iteration,
                )?;
                report.comparison = Some(ComparisonReport {
                    equivalent,
                    ratio_table,
                });
            }
        }
    }

    let rendered = match config.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    write_output(config.out.as_deref(), &rendered)?;
    Ok(RunOutcome {
        report,
        checks_passed,
    })
}

/// Runs the predictor verification suite and renders one row per lemma.
pub fn cmd_verify_lemmas(seed: u64) -> (Vec<LemmaCheck>, String) {
    let checks = run_lemma_checks(seed);
    let mut out = String::new();
    out.push_str("lemma                               status  max_deviation  detail\n");
    for check in &checks {
        out.push_str(&format!(
            "{:<35} {:<7} {:<14} {}\n",
            check.name,
            if check.passed { "PASS" } else { "FAIL" },
            format!("{:.3e}", check.max_deviation),
            check.detail
        ));
    }
    let passed = all_passed(&checks);
    out.push_str(if passed {
        "all lemma checks passed\n"
    } else {
        "LEMMA CHECKS FAILED\n"
    });
    (checks, out)
}

/// Pools per-iteration samples from report files and emits their 6x6
/// correlation matrix.
pub fn cmd_correlate(
    files: &[PathBuf],
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let mut samples = Vec::new();
    for path in files {
        let text = fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        })?;
        samples.extend(parse_samples(&text)?);
    }
    let matrix = correlate(&samples)?;
    let rendered = match format {
        OutputFormat::Csv => correlation_to_csv(&matrix),
        OutputFormat::Json => correlation_to_json(&matrix),
    };
    write_output(out, &rendered)?;
    Ok(rendered)
}

fn write_output(out: Option<&Path>, rendered: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, rendered).map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            io::stdout()
                .write_all(rendered.as_bytes())
                .map_err(CliError::from_io)?;
            Ok(())
        }
    }
}

impl CliError {
    fn from_io(source: io::Error) -> Self {
        CliError::File {
            path: PathBuf::from("<stdout>"),
            source,
        }
    }
}
