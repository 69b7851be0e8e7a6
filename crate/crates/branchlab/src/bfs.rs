//! Top-down breadth-first search in branch-based and branch-avoiding
//! variants, instrumented per frontier level.
//!
//! The branch-based variant tests every traversed edge for first discovery
//! and branches on it. The branch-avoiding variant instead executes an
//! unconditional per-edge sequence: load the neighbor's distance, compare it
//! against the next frontier's level, speculatively write the neighbor one
//! slot past the accepted queue end, conditionally select the new distance,
//! conditionally bump the queue length, and store the distance back. The
//! speculative slot is overwritten on the next edge unless the conditional
//! bump accepted it, so the queue needs `|V| + 1` slots and the distance
//! array receives one store per traversed edge.
//!
//! Distances compare against `next_level` = d[v] + 1 rather than d[v]: a
//! vertex discovered earlier in the current frontier already holds
//! `next_level`, and a strict greater-than test keeps it from being enqueued
//! twice.

use std::time::Instant;

use crate::analysis::IterationStats;
use crate::graph::{Graph, GraphError};
use crate::tracer::{Recorder, TraceSnapshot};

pub const BFS_WHILE: &str = "bfs.while";
pub const BFS_FOR: &str = "bfs.for";
pub const BFS_IF: &str = "bfs.if";

/// Sentinel for unreached vertices: the maximum representable hop count, so
/// greater-than comparisons need no special infinity handling.
pub const UNREACHED: u64 = u64::MAX;

/// Result of one BFS run.
///
/// `queue` is the discovery order (the reached set V̂); `edges_traversed` is
/// |Ê|, the total degree of the reached vertices. Levels are delimited by
/// distance changes in dequeue order, and the level deltas sum to `totals`.
#[derive(Debug, Clone, PartialEq)]
pub struct BfsRunResult {
    pub distances: Vec<u64>,
    pub queue: Vec<usize>,
    pub edges_traversed: u64,
    pub per_level: Vec<IterationStats>,
    pub per_level_sites: Vec<TraceSnapshot>,
    pub totals: TraceSnapshot,
}

fn check_root(graph: &Graph, root: usize) -> Result<(), GraphError> {
    if root >= graph.num_vertices() {
        return Err(GraphError::VertexOutOfRange {
            vertex: root,
            num_vertices: graph.num_vertices(),
        });
    }
    Ok(())
}

/// Tracks level windows while vertices are dequeued in distance order.
struct LevelTracker {
    current_level: u64,
    level_start: Instant,
    level_edges: u64,
    previous: TraceSnapshot,
    per_level: Vec<IterationStats>,
    per_level_sites: Vec<TraceSnapshot>,
}

impl LevelTracker {
    fn new(initial: TraceSnapshot) -> Self {
        LevelTracker {
            current_level: 0,
            level_start: Instant::now(),
            level_edges: 0,
            previous: initial,
            per_level: Vec::new(),
            per_level_sites: Vec::new(),
        }
    }

    fn close_level<R: Recorder>(&mut self, recorder: &R) {
        let wall_time_s = self.level_start.elapsed().as_secs_f64();
        let snapshot = recorder.snapshot();
        let delta = snapshot.delta_since(&self.previous);
        self.per_level.push(IterationStats::from_delta(
            self.current_level as usize,
            wall_time_s,
            &delta,
            self.level_edges,
        ));
        self.per_level_sites.push(delta);
        self.previous = snapshot;
        self.level_edges = 0;
        self.level_start = Instant::now();
    }

    fn observe_dequeue<R: Recorder>(&mut self, recorder: &R, level: u64, degree: u64) {
        if level != self.current_level {
            self.close_level(recorder);
            self.current_level = level;
        }
        self.level_edges += degree;
    }
}

/// Branch-based top-down BFS from `root`.
pub fn bfs_branch_based<R: Recorder>(
    graph: &Graph,
    root: usize,
    recorder: &mut R,
) -> Result<BfsRunResult, GraphError> {
    check_root(graph, root)?;
    let n = graph.num_vertices();
    let while_site = recorder.register_site(BFS_WHILE);
    let for_site = recorder.register_site(BFS_FOR);
    let if_site = recorder.register_site(BFS_IF);

    let mut distances = vec![UNREACHED; n];
    let mut queue: Vec<usize> = Vec::with_capacity(n);
    distances[root] = 0;
    recorder.record_store(1);
    queue.push(root);

    let mut head = 0;
    let mut edges_traversed = 0u64;
    let mut tracker = LevelTracker::new(recorder.snapshot());

    loop {
        recorder.record_branch(while_site, head < queue.len());
        if head >= queue.len() {
            break;
        }
        let v = queue[head];
        head += 1;
        let dv = distances[v];
        recorder.record_load(1);
        let degree = graph.degree(v) as u64;
        tracker.observe_dequeue(recorder, dv, degree);
        edges_traversed += degree;

        for &w in graph.neighbors(v) {
            recorder.record_branch(for_site, true);
            let dw = distances[w];
            recorder.record_load(1);
            let undiscovered = dw == UNREACHED;
            recorder.record_branch(if_site, undiscovered);
            if undiscovered {
                queue.push(w);
                distances[w] = dv + 1;
                recorder.record_store(1);
                recorder.record_arith(1);
            }
        }
        recorder.record_branch(for_site, false);
    }
    tracker.close_level(recorder);

    Ok(BfsRunResult {
        distances,
        queue,
        edges_traversed,
        per_level: tracker.per_level,
        per_level_sites: tracker.per_level_sites,
        totals: recorder.snapshot(),
    })
}

#[inline]
fn select_if(condition: bool, if_true: u64, if_false: u64) -> u64 {
    let mask = (condition as u64).wrapping_neg();
    (if_true & mask) | (if_false & !mask)
}

/// Branch-avoiding top-down BFS from `root`. No discovery branch exists;
/// the per-edge body is unconditional.
pub fn bfs_branch_avoiding<R: Recorder>(
    graph: &Graph,
    root: usize,
    recorder: &mut R,
) -> Result<BfsRunResult, GraphError> {
    check_root(graph, root)?;
    let n = graph.num_vertices();
    let while_site = recorder.register_site(BFS_WHILE);
    let for_site = recorder.register_site(BFS_FOR);

    let mut distances = vec![UNREACHED; n];
    distances[root] = 0;
    // One slot past |V| so the speculative write is always in bounds.
    let mut queue = vec![0usize; n + 1];
    queue[0] = root;
    let mut queue_len = 1usize;

    let mut head = 0;
    let mut edges_traversed = 0u64;
    let mut tracker = LevelTracker::new(recorder.snapshot());

    loop {
        recorder.record_branch(while_site, head < queue_len);
        if head >= queue_len {
            break;
        }
        let v = queue[head];
        head += 1;
        let next_level = distances[v] + 1;
        recorder.record_load(1);
        recorder.record_arith(1);
        let degree = graph.degree(v) as u64;
        tracker.observe_dequeue(recorder, next_level - 1, degree);
        edges_traversed += degree;

        for &w in graph.neighbors(v) {
            recorder.record_branch(for_site, true);
            let temp = distances[w];
            recorder.record_load(1);
            queue[queue_len] = w;
            let first_discovery = temp > next_level;
            let temp = select_if(first_discovery, next_level, temp);
            recorder.record_cmov(1);
            queue_len += first_discovery as usize;
            recorder.record_cmov(1);
            distances[w] = temp;
            recorder.record_store(1);
        }
        recorder.record_branch(for_site, false);
    }
    tracker.close_level(recorder);

    queue.truncate(queue_len);
    Ok(BfsRunResult {
        distances,
        queue,
        edges_traversed,
        per_level: tracker.per_level,
        per_level_sites: tracker.per_level_sites,
        totals: recorder.snapshot(),
    })
}
