//! Graph representation and ingestion.
//!
//! Graphs are immutable CSR structures: an `offsets` array of length
//! `|V| + 1` indexing into a concatenated `neighbors` array of length `|E|`
//! (directed edge slots; an undirected edge occupies two slots). Vertex ids
//! are 0-based internally; METIS input is converted from 1-based at parse
//! time. Neighbor lists are kept sorted ascending so traversal order, and
//! therefore every simulated branch trace, is reproducible.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: expected integer, got {token:?}")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: vertex id {id} out of range for {num_vertices} vertices")]
    IdOutOfRange {
        line: usize,
        id: usize,
        num_vertices: usize,
    },
    #[error("line {line}: self-loop on vertex {vertex} not allowed in METIS input")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: adjacency is asymmetric: {u} lists {v} but {v} does not list {u} (1-based)")]
    AsymmetricAdjacency { line: usize, u: usize, v: usize },
    #[error("adjacency lines list {found} edge slots but header promises {expected} (= 2 x edge count)")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("file ends after {found} adjacency lines, header promises {expected}")]
    MissingAdjacencyLines { expected: usize, found: usize },
    #[error("line {line}: unexpected content after the last adjacency line")]
    TrailingContent { line: usize },
    #[error("{requested} edges requested but a simple graph on {num_vertices} vertices holds at most {capacity}")]
    EdgeBudgetExceeded {
        requested: usize,
        num_vertices: usize,
        capacity: u64,
    },
    #[error("vertex {vertex} out of range for graph with {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("invalid CSR structure: {0}")]
    InvalidCsr(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Immutable CSR adjacency structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from raw CSR arrays, checking the structural
    /// invariants (monotone offsets, ids in range).
    pub fn from_csr(offsets: Vec<usize>, neighbors: Vec<usize>) -> Result<Self, GraphError> {
        if offsets.is_empty() {
            return Err(GraphError::InvalidCsr("offsets must not be empty".into()));
        }
        if offsets[0] != 0 {
            return Err(GraphError::InvalidCsr("offsets[0] must be 0".into()));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(GraphError::InvalidCsr("offsets must be nondecreasing".into()));
        }
        if *offsets.last().unwrap() != neighbors.len() {
            return Err(GraphError::InvalidCsr(format!(
                "offsets end at {} but there are {} neighbor slots",
                offsets.last().unwrap(),
                neighbors.len()
            )));
        }
        let n = offsets.len() - 1;
        if let Some(&bad) = neighbors.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange {
                vertex: bad,
                num_vertices: n,
            });
        }
        Ok(Graph { offsets, neighbors })
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of directed edge slots; an undirected edge counts twice.
    pub fn num_edges(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_slots(&self) -> &[usize] {
        &self.neighbors
    }

    /// Full undirected validation: sorted neighbor lists and symmetry
    /// (edge (u,v) present iff (v,u) present).
    pub fn validate(&self) -> Result<(), GraphError> {
        for u in 0..self.num_vertices() {
            let adj = self.neighbors(u);
            if adj.windows(2).any(|w| w[0] > w[1]) {
                return Err(GraphError::InvalidCsr(format!(
                    "neighbors of vertex {u} are not sorted ascending"
                )));
            }
            for &v in adj {
                if self.neighbors(v).binary_search(&u).is_err() {
                    return Err(GraphError::AsymmetricAdjacency {
                        line: 0,
                        u: u + 1,
                        v: v + 1,
                    });
                }
            }
        }
        Ok(())
    }

    /// Flattens the CSR back into directed pairs, preserving slot order.
    pub fn to_edge_list(&self) -> EdgeList {
        let mut pairs = Vec::with_capacity(self.num_edges());
        for u in 0..self.num_vertices() {
            for &v in self.neighbors(u) {
                pairs.push((u, v));
            }
        }
        EdgeList {
            num_vertices: self.num_vertices(),
            pairs,
        }
    }

    /// Writes the graph in METIS format: `"|V| |E|"` header with the
    /// undirected edge count, then one 1-based adjacency line per vertex.
    pub fn write_metis<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.num_vertices(), self.num_edges() / 2)?;
        let mut line = String::new();
        for v in 0..self.num_vertices() {
            line.clear();
            for (i, &u) in self.neighbors(v).iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&(u + 1).to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Intermediate ingestion form: raw pairs, order and multiplicity preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub num_vertices: usize,
    pub pairs: Vec<(usize, usize)>,
}

fn parse_usize(token: &str, line: usize) -> Result<usize, GraphError> {
    token.parse().map_err(|_| GraphError::InvalidToken {
        line,
        token: token.to_string(),
    })
}

/// Parses METIS/Chaco text: a header line `"|V| |E| [fmt]"` followed by one
/// adjacency line per vertex with 1-based neighbor ids. `%` starts a comment
/// line. The result is validated as an undirected graph and its slot count
/// must equal twice the header edge count.
pub fn load_metis<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(text) => !text.trim_start().starts_with('%'),
            Err(_) => true,
        });

    let (header_line, header) = lines.next().ok_or(GraphError::MalformedHeader {
        line: 1,
        reason: "empty input".into(),
    })?;
    let header = header?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 2 || tokens.len() > 3 {
        return Err(GraphError::MalformedHeader {
            line: header_line,
            reason: format!("expected 2 or 3 fields, found {}", tokens.len()),
        });
    }
    let num_vertices = parse_usize(tokens[0], header_line)?;
    let num_undirected_edges = parse_usize(tokens[1], header_line)?;
    if let Some(fmt) = tokens.get(2) {
        if fmt.bytes().any(|b| b != b'0') {
            return Err(GraphError::MalformedHeader {
                line: header_line,
                reason: format!("weighted format {fmt:?} not supported"),
            });
        }
    }

    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(num_vertices);
    let mut vertex_lines: Vec<usize> = Vec::with_capacity(num_vertices);
    for (line_no, line) in &mut lines {
        if adjacency.len() == num_vertices {
            // Tolerate blank lines after the last vertex, nothing else.
            if line?.trim().is_empty() {
                continue;
            }
            return Err(GraphError::TrailingContent { line: line_no });
        }
        let vertex = adjacency.len();
        let line = line?;
        let mut neighbors = Vec::new();
        for token in line.split_whitespace() {
            let id = parse_usize(token, line_no)?;
            if id == 0 || id > num_vertices {
                return Err(GraphError::IdOutOfRange {
                    line: line_no,
                    id,
                    num_vertices,
                });
            }
            if id - 1 == vertex {
                return Err(GraphError::SelfLoop {
                    line: line_no,
                    vertex: id,
                });
            }
            neighbors.push(id - 1);
        }
        neighbors.sort_unstable();
        adjacency.push(neighbors);
        vertex_lines.push(line_no);
    }
    if adjacency.len() < num_vertices {
        return Err(GraphError::MissingAdjacencyLines {
            expected: num_vertices,
            found: adjacency.len(),
        });
    }

    let slot_count: usize = adjacency.iter().map(Vec::len).sum();
    if slot_count != 2 * num_undirected_edges {
        return Err(GraphError::EdgeCountMismatch {
            expected: 2 * num_undirected_edges,
            found: slot_count,
        });
    }

    // Symmetry check with the offending vertex's line number.
    for (u, neighbors) in adjacency.iter().enumerate() {
        for &v in neighbors {
            if adjacency[v].binary_search(&u).is_err() {
                return Err(GraphError::AsymmetricAdjacency {
                    line: vertex_lines[u],
                    u: u + 1,
                    v: v + 1,
                });
            }
        }
    }

    let mut offsets = Vec::with_capacity(num_vertices + 1);
    offsets.push(0);
    let mut flat = Vec::with_capacity(slot_count);
    for neighbors in adjacency {
        flat.extend_from_slice(&neighbors);
        offsets.push(flat.len());
    }
    Graph::from_csr(offsets, flat)
}

/// Parses whitespace-separated `"u v"` pairs, one per line, 0-based ids.
/// Lines starting with `#` are comments. Order and multiplicity are kept;
/// self-loops are allowed here and dropped later by [`to_csr`].
pub fn load_edge_list<R: BufRead>(reader: R, num_vertices: usize) -> Result<EdgeList, GraphError> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(GraphError::InvalidToken {
                line: line_no,
                token: trimmed.to_string(),
            });
        }
        let u = parse_usize(tokens[0], line_no)?;
        let v = parse_usize(tokens[1], line_no)?;
        for id in [u, v] {
            if id >= num_vertices {
                return Err(GraphError::IdOutOfRange {
                    line: line_no,
                    id,
                    num_vertices,
                });
            }
        }
        pairs.push((u, v));
    }
    Ok(EdgeList {
        num_vertices,
        pairs,
    })
}

/// Builds a CSR graph from an edge list. Self-loops are dropped, duplicate
/// slots collapsed, and neighbor lists sorted ascending. With `symmetrize`,
/// every pair is inserted in both directions.
pub fn to_csr(edges: &EdgeList, symmetrize: bool) -> Graph {
    let n = edges.num_vertices;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &edges.pairs {
        if u == v {
            continue;
        }
        adjacency[u].push(v);
        if symmetrize {
            adjacency[v].push(u);
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut flat = Vec::new();
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
        flat.extend_from_slice(list);
        offsets.push(flat.len());
    }
    Graph {
        offsets,
        neighbors: flat,
    }
}

fn pair_capacity(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Index of the first pair `(u, _)` in the lexicographic ordering of all
/// unordered pairs `(u, v)` with `u < v`.
fn pair_base(u: u64, n: u64) -> u64 {
    u * (2 * n - u - 1) / 2
}

fn decode_pair(index: u64, n: u64) -> (usize, usize) {
    // Largest u with pair_base(u) <= index, by binary search.
    let (mut lo, mut hi) = (0u64, n - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if pair_base(mid, n) <= index {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let u = lo;
    let v = u + 1 + (index - pair_base(u, n));
    (u as usize, v as usize)
}

/// Erdős–Rényi G(n, m): a uniform simple undirected graph with exactly `m`
/// edges, deterministic for a fixed seed.
pub fn generate_random(
    num_vertices: usize,
    num_undirected_edges: usize,
    seed: u64,
) -> Result<Graph, GraphError> {
    let capacity = pair_capacity(num_vertices);
    if num_undirected_edges as u64 > capacity {
        return Err(GraphError::EdgeBudgetExceeded {
            requested: num_undirected_edges,
            num_vertices,
            capacity,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = num_undirected_edges as u64;

    // Sample m distinct pair indices. For dense requests sample the
    // complement instead so rejection stays cheap.
    let sample_complement = m > capacity / 2;
    let target = if sample_complement { capacity - m } else { m };
    let mut picked: HashSet<u64> = HashSet::with_capacity(target as usize);
    while (picked.len() as u64) < target {
        picked.insert(rng.gen_range(0..capacity));
    }

    let mut pairs = Vec::with_capacity(num_undirected_edges);
    if sample_complement {
        for index in 0..capacity {
            if !picked.contains(&index) {
                pairs.push(decode_pair(index, num_vertices as u64));
            }
        }
    } else {
        let mut indices: Vec<u64> = picked.into_iter().collect();
        indices.sort_unstable();
        for index in indices {
            pairs.push(decode_pair(index, num_vertices as u64));
        }
    }

    let edges = EdgeList {
        num_vertices,
        pairs,
    };
    Ok(to_csr(&edges, true))
}

/// Plain queue BFS used internally for component labelling and
/// eccentricities; separate from the instrumented traversals.
fn bfs_levels(graph: &Graph, root: usize, levels: &mut [Option<u64>]) -> u64 {
    for slot in levels.iter_mut() {
        *slot = None;
    }
    levels[root] = Some(0);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(root);
    let mut eccentricity = 0;
    while let Some(v) = queue.pop_front() {
        let dv = levels[v].unwrap();
        eccentricity = eccentricity.max(dv);
        for &w in graph.neighbors(v) {
            if levels[w].is_none() {
                levels[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    eccentricity
}

/// Diameter report. For a disconnected graph the headline value is the
/// largest component's diameter; `max_component_diameter` (the maximum over
/// all components) is what bounds the label-propagation iteration count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiameterInfo {
    pub connected: bool,
    pub num_components: usize,
    pub largest_component_diameter: u64,
    pub max_component_diameter: u64,
}

/// Exact diameter by all-sources BFS, per connected component.
pub fn diameter(graph: &Graph) -> DiameterInfo {
    let n = graph.num_vertices();
    if n == 0 {
        return DiameterInfo {
            connected: true,
            num_components: 0,
            largest_component_diameter: 0,
            max_component_diameter: 0,
        };
    }

    // Component labels and sizes.
    let mut component = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut scratch = vec![None; n];
    for v in 0..n {
        if component[v] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        bfs_levels(graph, v, &mut scratch);
        let mut size = 0;
        for (w, level) in scratch.iter().enumerate() {
            if level.is_some() {
                component[w] = id;
                size += 1;
            }
        }
        sizes.push(size);
    }

    let mut diameters = vec![0u64; sizes.len()];
    for (v, &c) in component.iter().enumerate() {
        let ecc = bfs_levels(graph, v, &mut scratch);
        diameters[c] = diameters[c].max(ecc);
    }

    let largest = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(i, &size)| (size, usize::MAX - i))
        .map(|(i, _)| i)
        .unwrap();
    DiameterInfo {
        connected: sizes.len() == 1,
        num_components: sizes.len(),
        largest_component_diameter: diameters[largest],
        max_component_diameter: diameters.iter().copied().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn metis(text: &str) -> Result<Graph, GraphError> {
        load_metis(Cursor::new(text))
    }

    #[test]
    fn metis_smallest_path() {
        let g = metis("3 2\n2\n1 3\n2\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(2), &[1]);
    }

    #[test]
    fn metis_isolated_vertices() {
        let g = metis("2 0\n\n\n").unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn metis_skips_percent_comments() {
        let g = metis("% a comment\n3 2\n2\n% another\n1 3\n2\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 4);
    }

    #[test]
    fn metis_rejects_malformed_header() {
        assert!(matches!(
            metis("3\n"),
            Err(GraphError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            metis("3 2 1\n2\n1 3\n2\n"),
            Err(GraphError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            metis("x 2\n"),
            Err(GraphError::InvalidToken { line: 1, .. })
        ));
    }

    #[test]
    fn metis_rejects_out_of_range_neighbor() {
        let err = metis("2 1\n2\n4\n").unwrap_err();
        match err {
            GraphError::IdOutOfRange { line, id, .. } => {
                assert_eq!(line, 3);
                assert_eq!(id, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn metis_rejects_asymmetric_adjacency() {
        let err = metis("3 2\n2 3\n1 3\n\n").unwrap_err();
        match err {
            GraphError::AsymmetricAdjacency { line, u, v } => {
                assert_eq!((line, u, v), (2, 1, 3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn metis_rejects_edge_count_mismatch() {
        assert!(matches!(
            metis("3 1\n2\n1 3\n2\n"),
            Err(GraphError::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn metis_rejects_missing_lines_and_trailing_content() {
        assert!(matches!(
            metis("3 1\n2\n1\n"),
            Err(GraphError::MissingAdjacencyLines { .. })
        ));
        assert!(matches!(
            metis("2 1\n2\n1\n1 2\n"),
            Err(GraphError::TrailingContent { line: 4 })
        ));
    }

    #[test]
    fn edge_list_basics() {
        let edges = load_edge_list(Cursor::new("0 1\n1 2\n"), 3).unwrap();
        assert_eq!(edges.pairs, vec![(0, 1), (1, 2)]);

        let edges = load_edge_list(Cursor::new("# c\n0 0\n"), 1).unwrap();
        assert_eq!(edges.pairs, vec![(0, 0)]);
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(matches!(
            load_edge_list(Cursor::new("0 x\n"), 3),
            Err(GraphError::InvalidToken { line: 1, .. })
        ));
        assert!(matches!(
            load_edge_list(Cursor::new("0 5\n"), 3),
            Err(GraphError::IdOutOfRange { line: 1, id: 5, .. })
        ));
        assert!(matches!(
            load_edge_list(Cursor::new("0 1 2\n"), 3),
            Err(GraphError::InvalidToken { .. })
        ));
    }

    #[test]
    fn to_csr_symmetrizes_and_dedups() {
        let edges = EdgeList {
            num_vertices: 2,
            pairs: vec![(0, 1)],
        };
        let g = to_csr(&edges, true);
        assert_eq!(g.offsets(), &[0, 1, 2]);
        assert_eq!(g.neighbor_slots(), &[1, 0]);

        let edges = EdgeList {
            num_vertices: 2,
            pairs: vec![(0, 1), (0, 1)],
        };
        let g = to_csr(&edges, true);
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn to_csr_drops_self_loops() {
        let edges = EdgeList {
            num_vertices: 2,
            pairs: vec![(0, 0), (0, 1)],
        };
        let g = to_csr(&edges, true);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn generate_random_full_budget_is_complete_graph() {
        let g = generate_random(4, 6, 123).unwrap();
        assert_eq!(g.num_edges(), 12);
        for v in 0..4 {
            assert_eq!(g.degree(v), 3);
        }
    }

    #[test]
    fn generate_random_zero_edges() {
        let g = generate_random(10, 0, 7).unwrap();
        assert_eq!(g.num_vertices(), 10);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn generate_random_is_deterministic() {
        let a = generate_random(1000, 5000, 42).unwrap();
        let b = generate_random(1000, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_random(1000, 5000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generate_random_rejects_over_budget() {
        assert!(matches!(
            generate_random(4, 7, 1),
            Err(GraphError::EdgeBudgetExceeded { .. })
        ));
    }

    #[test]
    fn generated_graphs_validate() {
        for seed in 0..5 {
            let g = generate_random(50, 120, seed).unwrap();
            g.validate().unwrap();
            assert_eq!(g.num_edges(), 240);
        }
    }

    #[test]
    fn diameter_of_small_graphs() {
        let path = metis("3 2\n2\n1 3\n2\n").unwrap();
        let info = diameter(&path);
        assert!(info.connected);
        assert_eq!(info.largest_component_diameter, 2);

        let k4 = generate_random(4, 6, 1).unwrap();
        assert_eq!(diameter(&k4).largest_component_diameter, 1);
    }

    #[test]
    fn diameter_of_disconnected_graph() {
        // Component {0,1,2,3} is a path of diameter 3; component {4,5} has
        // diameter 1. Largest by size wins the headline number.
        let edges = EdgeList {
            num_vertices: 6,
            pairs: vec![(0, 1), (1, 2), (2, 3), (4, 5)],
        };
        let g = to_csr(&edges, true);
        let info = diameter(&g);
        assert!(!info.connected);
        assert_eq!(info.num_components, 2);
        assert_eq!(info.largest_component_diameter, 3);
        assert_eq!(info.max_component_diameter, 3);
    }

    #[test]
    fn metis_round_trip() {
        let g = generate_random(25, 60, 9).unwrap();
        let mut buf = Vec::new();
        g.write_metis(&mut buf).unwrap();
        let back = load_metis(Cursor::new(buf)).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn degree_sum_equals_slot_count() {
        let g = generate_random(40, 100, 3).unwrap();
        let total: usize = (0..g.num_vertices()).map(|v| g.degree(v)).sum();
        assert_eq!(total, g.num_edges());
    }
}
