//! Cross-checks of library results against the independent oracles in
//! `common`, plus the cross-variant invariants of the instrumented
//! algorithms.

mod common;

use std::io::Cursor;

use branchlab::analysis::IterationStats;
use branchlab::bfs::{bfs_branch_avoiding, bfs_branch_based, UNREACHED};
use branchlab::cc::{
    count_components, sv_branch_avoiding, sv_branch_based, SV_FOR_NEIGHBORS, SV_FOR_VERTICES,
    SV_IF, SV_WHILE,
};
use branchlab::graph::{diameter, generate_random, load_edge_list, to_csr, EdgeList};
use branchlab::tracer::{NullRecorder, Recorder, TraceRecorder};
use branchlab::PredictorState;

use common::*;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn edge_list_round_trip_preserves_degree_sums() {
    // 100-line random edge file, recounted independently from the text.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 30;
    let mut text = String::new();
    let mut pairs = Vec::new();
    for _ in 0..100 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        text.push_str(&format!("{u} {v}\n"));
        pairs.push((u, v));
    }
    let edges = load_edge_list(Cursor::new(&text), n).unwrap();
    assert_eq!(edges.pairs, pairs);

    let graph = to_csr(&edges, true);
    graph.validate().unwrap();
    let matrix = dense_adjacency(&edges, true);
    let expected_slots: usize = matrix.iter().flatten().filter(|&&b| b).count();
    assert_eq!(graph.num_edges(), expected_slots);
    let degree_sum: usize = (0..n).map(|v| graph.degree(v)).sum();
    assert_eq!(degree_sum, graph.num_edges());
}

#[test]
fn csr_construction_matches_dense_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 50;
    let pairs: Vec<(usize, usize)> = (0..120)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    let edges = EdgeList {
        num_vertices: n,
        pairs,
    };
    for symmetrize in [false, true] {
        let graph = to_csr(&edges, symmetrize);
        let matrix = dense_adjacency(&edges, symmetrize);
        for u in 0..n {
            for v in 0..n {
                assert_eq!(
                    graph.neighbors(u).binary_search(&v).is_ok(),
                    matrix[u][v],
                    "edge ({u},{v}) symmetrize={symmetrize}"
                );
            }
        }
    }
}

#[test]
fn diameter_matches_all_pairs_oracle() {
    let graph = generate_random(100, 300, 42).unwrap();
    let info = diameter(&graph);
    let oracle = diameter_oracle(&graph);
    assert_eq!(info.connected, oracle.connected);
    assert_eq!(
        info.largest_component_diameter,
        oracle.largest_component_diameter
    );
    assert_eq!(info.max_component_diameter, oracle.max_component_diameter);

    // A sparse graph that is almost surely disconnected.
    let graph = generate_random(80, 30, 3).unwrap();
    let info = diameter(&graph);
    let oracle = diameter_oracle(&graph);
    assert_eq!(info.connected, oracle.connected);
    assert_eq!(
        info.largest_component_diameter,
        oracle.largest_component_diameter
    );
    assert_eq!(info.max_component_diameter, oracle.max_component_diameter);
}

#[test]
fn sv_labels_match_union_find_minima() {
    let graph = generate_random(200, 400, 42).unwrap();
    let run = sv_branch_based(&graph, &mut NullRecorder);
    assert_eq!(run.labels, component_minima(&graph));
    assert_eq!(count_components(&run.labels), component_count(&graph));
}

#[test]
fn sv_variants_are_bit_identical() {
    let graph = generate_random(200, 400, 42).unwrap();
    let based = sv_branch_based(&graph, &mut NullRecorder);
    let avoiding = sv_branch_avoiding(&graph, &mut NullRecorder);
    assert_eq!(based.labels, avoiding.labels);
    assert_eq!(based.iterations, avoiding.iterations);
}

#[test]
fn sv_iterations_bounded_by_component_diameter() {
    for seed in 0..8 {
        for (n, m) in [(60, 90), (60, 180), (40, 20)] {
            let graph = generate_random(n, m, seed).unwrap();
            let run = sv_branch_based(&graph, &mut NullRecorder);
            let bound = diameter(&graph).max_component_diameter + 2;
            assert!(
                run.iterations as u64 <= bound,
                "n={n} m={m} seed={seed}: {} iterations > diameter bound {bound}",
                run.iterations
            );
        }
    }
}

#[test]
fn bfs_distances_match_reference() {
    let graph = generate_random(500, 1500, 7).unwrap();
    let based = bfs_branch_based(&graph, 0, &mut NullRecorder).unwrap();
    let avoiding = bfs_branch_avoiding(&graph, 0, &mut NullRecorder).unwrap();
    assert_eq!(based.distances, avoiding.distances);
    assert_eq!(based.queue, avoiding.queue);
    let reference = reference_bfs(&graph, 0);
    for v in 0..graph.num_vertices() {
        match reference[v] {
            Some(d) => assert_eq!(based.distances[v], d),
            None => assert_eq!(based.distances[v], UNREACHED),
        }
    }
}

#[test]
fn bfs_distance_array_is_level_consistent() {
    let graph = generate_random(120, 360, 9).unwrap();
    let run = bfs_branch_based(&graph, 0, &mut NullRecorder).unwrap();
    let d = &run.distances;
    assert_eq!(d[0], 0);
    for u in 0..graph.num_vertices() {
        if d[u] == UNREACHED {
            continue;
        }
        for &v in graph.neighbors(u) {
            assert_ne!(d[v], UNREACHED, "neighbor of a reached vertex unreached");
            assert!(d[u].abs_diff(d[v]) <= 1);
        }
        if d[u] > 0 {
            assert!(
                graph.neighbors(u).iter().any(|&w| d[w] == d[u] - 1),
                "vertex {u} has no parent one level up"
            );
        }
    }
}

#[test]
fn sv_branch_total_ratio_on_dense_random_graphs() {
    // Average degree >= 4: the branch-based variant evaluates at least 1.5x
    // the branches of the branch-avoiding variant.
    for seed in [1, 2, 3] {
        let (graph, _) = connected_random_graph(150, 300, seed);
        let mut based_rec = TraceRecorder::default();
        let mut avoiding_rec = TraceRecorder::default();
        let based = sv_branch_based(&graph, &mut based_rec);
        let avoiding = sv_branch_avoiding(&graph, &mut avoiding_rec);
        let based_branches = based.totals.total_evaluations();
        let avoiding_branches = avoiding.totals.total_evaluations();
        assert!(based_branches > avoiding_branches);
        let ratio = based_branches as f64 / avoiding_branches as f64;
        assert!(ratio >= 1.5, "seed={seed}: branch ratio {ratio}");
    }
}

#[test]
fn sv_loop_site_misprediction_structure() {
    for seed in [4, 5, 6] {
        let (graph, _) = connected_random_graph(120, 360, seed);
        let mut rec = TraceRecorder::default();
        let run = sv_branch_based(&graph, &mut rec);
        let it = run.iterations as u64;
        let v = graph.num_vertices() as u64;
        let while_misses = run.totals.site(SV_WHILE).unwrap().mispredictions;
        let vertices_misses = run.totals.site(SV_FOR_VERTICES).unwrap().mispredictions;
        let neighbors_misses = run.totals.site(SV_FOR_NEIGHBORS).unwrap().mispredictions;
        assert!(while_misses <= 3, "while site missed {while_misses} times");
        // The vertex loop is a repeated loop executed `iterations` times.
        assert!(
            vertices_misses <= it + 2,
            "vertex loop missed {vertices_misses} > {} times",
            it + 2
        );
        assert!(
            neighbors_misses <= it * v + 2,
            "neighbor loop missed {neighbors_misses} > {} times",
            it * v + 2
        );
    }
}

#[test]
fn sv_if_misses_shrink_as_labels_stabilize() {
    let (graph, _) = connected_random_graph(150, 450, 21);
    let mut rec = TraceRecorder::default();
    let run = sv_branch_based(&graph, &mut rec);
    let per_if: Vec<u64> = run
        .per_iteration_sites
        .iter()
        .map(|d| d.site(SV_IF).unwrap().mispredictions)
        .collect();
    assert!(per_if.last().unwrap() <= per_if.first().unwrap());
}

#[test]
fn bfs_store_blowup_equals_average_reached_degree() {
    let (graph, _) = connected_random_graph(200, 800, 13);
    let mut based_rec = TraceRecorder::default();
    let mut avoiding_rec = TraceRecorder::default();
    let based = bfs_branch_based(&graph, 0, &mut based_rec).unwrap();
    let avoiding = bfs_branch_avoiding(&graph, 0, &mut avoiding_rec).unwrap();
    assert_eq!(based.totals.stores, based.queue.len() as u64);
    assert_eq!(avoiding.totals.stores, avoiding.edges_traversed);
    let ratio = avoiding.totals.stores as f64 / based.totals.stores as f64;
    let average_degree = avoiding.edges_traversed as f64 / avoiding.queue.len() as f64;
    assert!((ratio - average_degree).abs() < 1e-9);
}

#[test]
fn identical_configurations_give_identical_snapshots() {
    let graph = generate_random(90, 270, 17).unwrap();
    let run = |state: PredictorState| {
        let mut rec = TraceRecorder::new(state);
        sv_branch_based(&graph, &mut rec);
        rec.snapshot()
    };
    assert_eq!(
        run(PredictorState::WeaklyNotTaken),
        run(PredictorState::WeaklyNotTaken)
    );
    assert_ne!(
        run(PredictorState::WeaklyNotTaken),
        run(PredictorState::StronglyNotTaken)
    );

    let bfs_run = |root: usize| {
        let mut rec = TraceRecorder::default();
        bfs_branch_avoiding(&graph, root, &mut rec).unwrap();
        rec.snapshot()
    };
    assert_eq!(bfs_run(3), bfs_run(3));
}

#[test]
fn sv_misprediction_ratio_holds_every_iteration() {
    use branchlab::analysis::iteration_ratio_table;
    let (graph, _) = connected_random_graph(200, 600, 42);
    let mut based_rec = TraceRecorder::default();
    let mut avoiding_rec = TraceRecorder::default();
    let based = sv_branch_based(&graph, &mut based_rec);
    let avoiding = sv_branch_avoiding(&graph, &mut avoiding_rec);
    let table = iteration_ratio_table(&based.per_iteration, &avoiding.per_iteration).unwrap();
    for row in &table.rows {
        let ratio = row.misprediction_ratio.unwrap();
        assert!(ratio >= 1.0, "iteration {}: ratio {ratio}", row.iteration);
    }
}

#[test]
fn sv_lower_bound_holds_for_based_runs_all_init_states() {
    use branchlab::analysis::sv_bounds;
    for seed in [31, 32, 33, 34, 35] {
        let (graph, _) = connected_random_graph(80, 240, seed);
        for initial in [
            PredictorState::StronglyNotTaken,
            PredictorState::WeaklyNotTaken,
            PredictorState::WeaklyTaken,
            PredictorState::StronglyTaken,
        ] {
            let mut rec = TraceRecorder::new(initial);
            let run = sv_branch_based(&graph, &mut rec);
            let bounds = sv_bounds(&run, &graph, "cc/based");
            assert!(
                bounds.lower_bound <= bounds.measured_mispredictions,
                "seed={seed} init={initial:?}: measured {} below lower bound {}",
                bounds.measured_mispredictions,
                bounds.lower_bound
            );
        }
    }
}

#[test]
fn bounds_on_degenerate_graphs() {
    use branchlab::analysis::{bfs_bounds, sv_bounds};
    let graph = generate_random(1, 0, 1).unwrap();

    let mut rec = TraceRecorder::default();
    let run = sv_branch_based(&graph, &mut rec);
    let bounds = sv_bounds(&run, &graph, "cc/based");
    // One vertex: constants dominate the lower bound.
    assert_eq!(bounds.lower_bound, run.iterations as u64 + 6);

    let mut rec = TraceRecorder::default();
    let run = bfs_branch_based(&graph, 0, &mut rec).unwrap();
    let bounds = bfs_bounds(&run, "bfs/based");
    assert_eq!(bounds.lower_bound, 1);
    assert_eq!(bounds.upper_bound, Some(11));
    assert!(bounds.measured_mispredictions <= 11);
}

#[test]
fn per_iteration_rows_sum_to_interior_totals() {
    let graph = generate_random(80, 240, 23).unwrap();
    let mut rec = TraceRecorder::default();
    let run = sv_branch_based(&graph, &mut rec);
    let summed: u64 = run.per_iteration.iter().map(|s: &IterationStats| s.branches).sum();
    // The final loop-exit test of the while site lands after the last
    // iteration window.
    assert_eq!(summed + 1, run.totals.total_evaluations());
}
