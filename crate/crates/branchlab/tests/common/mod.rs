//! Independent oracles shared by the integration suites. Everything here is
//! deliberately naive and separate from the library's implementation paths:
//! union-find for component structure, a textbook queue BFS for distances,
//! all-pairs BFS for diameters, and a dense adjacency matrix for CSR
//! construction.
#![allow(dead_code)] // each test target uses a different subset

use std::collections::VecDeque;

use branchlab::graph::{EdgeList, Graph};

/// Union-find with path compression and union by size.
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Per-vertex minimum id of its connected component, via union-find.
pub fn component_minima(graph: &Graph) -> Vec<usize> {
    let n = graph.num_vertices();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        for &v in graph.neighbors(u) {
            uf.union(u, v);
        }
    }
    let mut minima = vec![usize::MAX; n];
    for v in 0..n {
        let root = uf.find(v);
        minima[root] = minima[root].min(v);
    }
    (0..n).map(|v| minima[uf.find(v)]).collect()
}

/// Number of connected components, via union-find.
pub fn component_count(graph: &Graph) -> usize {
    let n = graph.num_vertices();
    let mut uf = UnionFind::new(n);
    for u in 0..n {
        for &v in graph.neighbors(u) {
            uf.union(u, v);
        }
    }
    (0..n).filter(|&v| uf.find(v) == v).count()
}

/// Textbook queue BFS returning hop counts, `None` for unreached vertices.
pub fn reference_bfs(graph: &Graph, root: usize) -> Vec<Option<u64>> {
    let mut dist = vec![None; graph.num_vertices()];
    dist[root] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for &w in graph.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn is_connected(graph: &Graph) -> bool {
    let n = graph.num_vertices();
    if n == 0 {
        return true;
    }
    reference_bfs(graph, 0).iter().all(Option::is_some)
}

/// All-pairs BFS diameter: per-component maximum eccentricity plus the
/// diameter of the largest component (ties broken toward the earliest one).
pub struct DiameterOracle {
    pub connected: bool,
    pub largest_component_diameter: u64,
    pub max_component_diameter: u64,
}

pub fn diameter_oracle(graph: &Graph) -> DiameterOracle {
    let n = graph.num_vertices();
    let mut component = vec![usize::MAX; n];
    let mut components: Vec<(usize, u64)> = Vec::new(); // (size, diameter)
    for v in 0..n {
        if component[v] != usize::MAX {
            continue;
        }
        let id = components.len();
        let levels = reference_bfs(graph, v);
        let mut size = 0;
        for (w, level) in levels.iter().enumerate() {
            if level.is_some() {
                component[w] = id;
                size += 1;
            }
        }
        components.push((size, 0));
    }
    for v in 0..n {
        let ecc = reference_bfs(graph, v)
            .iter()
            .filter_map(|d| *d)
            .max()
            .unwrap_or(0);
        let c = component[v];
        components[c].1 = components[c].1.max(ecc);
    }
    let largest = components
        .iter()
        .enumerate()
        .max_by_key(|&(i, &(size, _))| (size, usize::MAX - i))
        .map(|(_, &(_, d))| d)
        .unwrap_or(0);
    DiameterOracle {
        connected: components.len() <= 1,
        largest_component_diameter: largest,
        max_component_diameter: components.iter().map(|&(_, d)| d).max().unwrap_or(0),
    }
}

/// Dense boolean adjacency built straight from the pair list with the same
/// semantics `to_csr` promises: self-loops dropped, duplicates collapsed,
/// optional symmetrization.
pub fn dense_adjacency(edges: &EdgeList, symmetrize: bool) -> Vec<Vec<bool>> {
    let n = edges.num_vertices;
    let mut matrix = vec![vec![false; n]; n];
    for &(u, v) in &edges.pairs {
        if u == v {
            continue;
        }
        matrix[u][v] = true;
        if symmetrize {
            matrix[v][u] = true;
        }
    }
    matrix
}

/// Deterministically finds a seed (starting from `seed_start`) whose
/// G(n, m) sample is connected, and returns the graph.
pub fn connected_random_graph(n: usize, m: usize, seed_start: u64) -> (Graph, u64) {
    let mut seed = seed_start;
    loop {
        let graph = branchlab::graph::generate_random(n, m, seed).expect("valid budget");
        if is_connected(&graph) {
            return (graph, seed);
        }
        seed += 1;
    }
}
