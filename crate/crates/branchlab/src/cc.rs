//! Label-propagation connected components in branch-based and
//! branch-avoiding variants, fully instrumented.
//!
//! Both variants keep one label per vertex, initially the vertex id, and
//! repeatedly lower each vertex's label to the minimum over itself and its
//! neighbors until an iteration changes nothing. Labels are read from the
//! live array, so a lowered label can propagate further within the same
//! iteration. At convergence every label is the minimum vertex id of its
//! component.
//!
//! The branch-based variant tests `c_u < c_v` and branches on the result;
//! the branch-avoiding variant replaces the test with a conditional select,
//! writes the label back unconditionally once per vertex, and folds change
//! detection into a bitwise `change |= c_v XOR c_v_init`.

use std::time::Instant;

use crate::analysis::IterationStats;
use crate::graph::Graph;
use crate::tracer::{Recorder, TraceSnapshot};

pub const SV_WHILE: &str = "sv.while";
pub const SV_FOR_VERTICES: &str = "sv.for_vertices";
pub const SV_FOR_NEIGHBORS: &str = "sv.for_neighbors";
pub const SV_IF: &str = "sv.if";

/// Result of one label-propagation run.
///
/// `iterations` counts while-body executions; the last iteration is always
/// the one that observes zero label changes. `per_iteration_sites` holds the
/// counter delta of each iteration; the final loop-exit test of the while
/// site lands after the last iteration and is therefore only in `totals`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcRunResult {
    pub labels: Vec<usize>,
    pub iterations: usize,
    pub per_iteration: Vec<IterationStats>,
    pub per_iteration_sites: Vec<TraceSnapshot>,
    pub totals: TraceSnapshot,
}

/// Branch-based label propagation. The inner update branches on the strict
/// comparison `c_u < c_v` and stores the label only on improvement.
pub fn sv_branch_based<R: Recorder>(graph: &Graph, recorder: &mut R) -> CcRunResult {
    let n = graph.num_vertices();
    let while_site = recorder.register_site(SV_WHILE);
    let vertices_site = recorder.register_site(SV_FOR_VERTICES);
    let neighbors_site = recorder.register_site(SV_FOR_NEIGHBORS);
    let if_site = recorder.register_site(SV_IF);

    let mut cc_id: Vec<usize> = (0..n).collect();
    let mut change = true;
    let mut iterations = 0;
    let mut per_iteration = Vec::new();
    let mut per_iteration_sites = Vec::new();
    let mut previous = recorder.snapshot();

    loop {
        recorder.record_branch(while_site, change);
        if !change {
            break;
        }
        let started = Instant::now();
        change = false;

        for v in 0..n {
            recorder.record_branch(vertices_site, true);
            let mut c_v = cc_id[v];
            recorder.record_load(1);
            for &u in graph.neighbors(v) {
                recorder.record_branch(neighbors_site, true);
                let c_u = cc_id[u];
                recorder.record_load(1);
                let improved = c_u < c_v;
                recorder.record_branch(if_site, improved);
                if improved {
                    c_v = c_u;
                    cc_id[v] = c_u;
                    recorder.record_store(1);
                    change = true;
                    recorder.record_arith(1);
                }
            }
            recorder.record_branch(neighbors_site, false);
        }
        recorder.record_branch(vertices_site, false);

        let wall_time_s = started.elapsed().as_secs_f64();
        let snapshot = recorder.snapshot();
        let delta = snapshot.delta_since(&previous);
        per_iteration.push(IterationStats::from_delta(
            iterations,
            wall_time_s,
            &delta,
            graph.num_edges() as u64,
        ));
        per_iteration_sites.push(delta);
        previous = snapshot;
        iterations += 1;
    }

    CcRunResult {
        labels: cc_id,
        iterations,
        per_iteration,
        per_iteration_sites,
        totals: recorder.snapshot(),
    }
}

#[inline]
fn select_min(condition: bool, if_true: usize, if_false: usize) -> usize {
    let mask = (condition as usize).wrapping_neg();
    (if_true & mask) | (if_false & !mask)
}

/// Branch-avoiding label propagation. The neighbor loop lowers a local label
/// copy through conditional selects, never branching on label values; the
/// result is written back once per vertex per iteration, so the store count
/// per iteration is exactly `|V|`.
pub fn sv_branch_avoiding<R: Recorder>(graph: &Graph, recorder: &mut R) -> CcRunResult {
    let n = graph.num_vertices();
    let while_site = recorder.register_site(SV_WHILE);
    let vertices_site = recorder.register_site(SV_FOR_VERTICES);
    let neighbors_site = recorder.register_site(SV_FOR_NEIGHBORS);

    let mut cc_id: Vec<usize> = (0..n).collect();
    let mut change: usize = 1;
    let mut iterations = 0;
    let mut per_iteration = Vec::new();
    let mut per_iteration_sites = Vec::new();
    let mut previous = recorder.snapshot();

    loop {
        recorder.record_branch(while_site, change != 0);
        if change == 0 {
            break;
        }
        let started = Instant::now();
        change = 0;

        for v in 0..n {
            recorder.record_branch(vertices_site, true);
            let c_v_init = cc_id[v];
            recorder.record_load(1);
            let mut c_v = c_v_init;
            for &u in graph.neighbors(v) {
                recorder.record_branch(neighbors_site, true);
                let c_u = cc_id[u];
                recorder.record_load(1);
                c_v = select_min(c_u < c_v, c_u, c_v);
                recorder.record_cmov(1);
            }
            recorder.record_branch(neighbors_site, false);
            cc_id[v] = c_v;
            recorder.record_store(1);
            change |= c_v ^ c_v_init;
            recorder.record_arith(1);
        }
        recorder.record_branch(vertices_site, false);

        let wall_time_s = started.elapsed().as_secs_f64();
        let snapshot = recorder.snapshot();
        let delta = snapshot.delta_since(&previous);
        per_iteration.push(IterationStats::from_delta(
            iterations,
            wall_time_s,
            &delta,
            graph.num_edges() as u64,
        ));
        per_iteration_sites.push(delta);
        previous = snapshot;
        iterations += 1;
    }

    CcRunResult {
        labels: cc_id,
        iterations,
        per_iteration,
        per_iteration_sites,
        totals: recorder.snapshot(),
    }
}

/// Number of distinct label values.
pub fn count_components(labels: &[usize]) -> usize {
    let mut seen: Vec<usize> = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{to_csr, EdgeList};
    use crate::tracer::{NullRecorder, TraceRecorder};

    fn graph_from_pairs(n: usize, pairs: &[(usize, usize)]) -> Graph {
        to_csr(
            &EdgeList {
                num_vertices: n,
                pairs: pairs.to_vec(),
            },
            true,
        )
    }

    #[test]
    fn path_collapses_to_single_component() {
        let g = graph_from_pairs(3, &[(0, 1), (1, 2)]);
        let mut rec = TraceRecorder::default();
        let run = sv_branch_based(&g, &mut rec);
        assert_eq!(run.labels, vec![0, 0, 0]);
        assert!(run.iterations <= 4); // diameter 2 + 2
        assert_eq!(count_components(&run.labels), 1);
    }

    #[test]
    fn disjoint_edges_keep_their_minima() {
        let g = graph_from_pairs(4, &[(0, 1), (2, 3)]);
        let mut rec = NullRecorder;
        let run = sv_branch_based(&g, &mut rec);
        assert_eq!(run.labels, vec![0, 0, 2, 2]);
        assert_eq!(count_components(&run.labels), 2);
    }

    #[test]
    fn variants_agree_on_small_graphs() {
        for (n, pairs) in [
            (1, vec![]),
            (3, vec![(0, 1), (1, 2)]),
            (4, vec![(0, 1), (2, 3)]),
            (5, vec![(4, 0), (3, 1), (1, 4)]),
        ] {
            let g = graph_from_pairs(n, &pairs);
            let based = sv_branch_based(&g, &mut NullRecorder);
            let avoiding = sv_branch_avoiding(&g, &mut NullRecorder);
            assert_eq!(based.labels, avoiding.labels);
            assert_eq!(based.iterations, avoiding.iterations);
        }
    }

    #[test]
    fn empty_graph_converges_in_one_iteration() {
        let g = graph_from_pairs(0, &[]);
        let run = sv_branch_based(&g, &mut NullRecorder);
        assert!(run.labels.is_empty());
        assert_eq!(run.iterations, 1);
        assert_eq!(count_components(&run.labels), 0);
    }

    #[test]
    fn count_components_on_raw_labels() {
        let initial: Vec<usize> = (0..7).collect();
        assert_eq!(count_components(&initial), 7);
        assert_eq!(count_components(&[0, 0, 0]), 1);
    }

    #[test]
    fn branch_accounting_closed_forms() {
        let g = graph_from_pairs(3, &[(0, 1), (1, 2)]);
        let mut rec = TraceRecorder::default();
        let run = sv_branch_based(&g, &mut rec);
        let it = run.iterations as u64;
        let v = g.num_vertices() as u64;
        let e = g.num_edges() as u64;
        let totals = &run.totals;
        assert_eq!(totals.site(SV_WHILE).unwrap().evaluations, it + 1);
        assert_eq!(totals.site(SV_FOR_VERTICES).unwrap().evaluations, it * (v + 1));
        assert_eq!(
            totals.site(SV_FOR_NEIGHBORS).unwrap().evaluations,
            it * (e + v)
        );
        assert_eq!(totals.site(SV_IF).unwrap().evaluations, it * e);
    }

    #[test]
    fn avoiding_variant_has_no_if_site_and_stores_v_per_iteration() {
        let g = graph_from_pairs(3, &[(0, 1), (1, 2)]);
        let mut rec = TraceRecorder::default();
        let run = sv_branch_avoiding(&g, &mut rec);
        assert_eq!(run.labels, vec![0, 0, 0]);
        assert!(run.totals.site(SV_IF).is_none());
        for delta in &run.per_iteration_sites {
            assert_eq!(delta.stores, g.num_vertices() as u64);
        }
    }

    #[test]
    fn last_iteration_changes_nothing() {
        let g = graph_from_pairs(5, &[(0, 4), (4, 2), (2, 3), (3, 1)]);
        let run = sv_branch_based(&g, &mut NullRecorder);
        let last = run.per_iteration.last().unwrap();
        assert_eq!(last.stores, 0);
    }
}
