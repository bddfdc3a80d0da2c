//! Cycle space of a graph over GF(2) and its minimum cycle basis.
//!
//! The basis is found by the Horton construction: every minimum cycle basis
//! can be assembled from cycles of the form `P(v, x) + (x, y) + P(y, v)`,
//! where `P` are fixed shortest paths. Candidates are sorted by length and
//! kept greedily whenever they are independent of the cycles already chosen,
//! which is exact because the independent sets of the cycle space form a
//! matroid.

mod bits;
pub mod oracle;

pub use bits::{CycleVector, Gf2Span};
pub use oracle::{enumerate_simple_cycles, exhaustive_mcb_oracle, ORACLE_MAX_NODES};

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph};

/// A set of independent cycles sorted by (length, edge list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    cycles: Vec<CycleVector>,
    total_length: usize,
}

impl CycleBasis {
    pub(crate) fn from_sorted(cycles: Vec<CycleVector>) -> Self {
        let total_length = cycles.iter().map(CycleVector::len).sum();
        CycleBasis { cycles, total_length }
    }

    pub fn cycles(&self) -> &[CycleVector] {
        &self.cycles
    }

    pub fn size(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Sum of cycle lengths; for simple cycles node and edge counts agree.
    pub fn total_length(&self) -> usize {
        self.total_length
    }

    /// GF(2) rank of the member vectors.
    pub fn rank(&self) -> usize {
        let mut span = Gf2Span::new();
        self.cycles.iter().filter(|c| span.insert(c)).count()
    }

    pub fn summary(&self, graph: &Graph) -> McbSummary {
        McbSummary {
            dimension: self.size(),
            total_length: self.total_length,
            s_c: conjectured_entropy(self).ok(),
            cycles: self.cycles.iter().map(CycleVector::edge_indices).collect(),
            edges: graph.edges().iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

/// JSON view of a basis, as emitted by the `mcb` command.
#[derive(Debug, Clone, Serialize)]
pub struct McbSummary {
    pub dimension: usize,
    pub total_length: usize,
    #[serde(rename = "S_C")]
    pub s_c: Option<f64>,
    pub cycles: Vec<Vec<usize>>,
    /// Canonical edge order that the cycle indices refer to.
    pub edges: Vec<[usize; 2]>,
}

fn require_connected(graph: &Graph) -> Result<()> {
    let components = graph.num_components();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(())
}

/// `|E| - |V| + 1` for a connected graph.
pub fn cycle_space_dimension(graph: &Graph) -> Result<usize> {
    require_connected(graph)?;
    Ok(graph.num_edges() + 1 - graph.num_nodes())
}

pub fn ring_sum(a: &CycleVector, b: &CycleVector) -> Result<CycleVector> {
    a.ring_sum(b)
}

/// Shortest-path tree from `root` with every parent the smallest-id
/// neighbor one level closer to the root.
struct BfsTree {
    root: usize,
    parent: Vec<Option<usize>>,
}

impl BfsTree {
    fn new(graph: &Graph, root: usize) -> Self {
        let n = graph.num_nodes();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::from([root]);
        dist[root] = 0;
        while let Some(x) = queue.pop_front() {
            for &y in graph.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let parent = (0..n)
            .map(|x| {
                if x == root || dist[x] == usize::MAX {
                    return None;
                }
                graph.neighbors(x).iter().copied().find(|&y| dist[y] + 1 == dist[x])
            })
            .collect();
        BfsTree { root, parent }
    }

    /// Nodes from `x` up to the root, inclusive; `None` if unreachable.
    fn path_to_root(&self, x: usize) -> Option<Vec<usize>> {
        let mut path = vec![x];
        let mut current = x;
        while current != self.root {
            current = self.parent[current]?;
            path.push(current);
        }
        Some(path)
    }
}

/// Horton candidate cycles, deduplicated and sorted. `arcs` must be the
/// table built for `graph`.
pub fn horton_candidates(graph: &Graph, arcs: &ArcTable) -> Vec<CycleVector> {
    debug_assert_eq!(arcs.num_arcs(), 2 * graph.num_edges());
    let n = graph.num_nodes();
    let m = graph.num_edges();
    let mut candidates = Vec::new();
    let mut on_path = vec![false; n];
    for root in 0..n {
        let tree = BfsTree::new(graph, root);
        for (e, &(x, y)) in graph.edges().iter().enumerate() {
            if tree.parent[x] == Some(y) || tree.parent[y] == Some(x) {
                continue;
            }
            let (Some(px), Some(py)) = (tree.path_to_root(x), tree.path_to_root(y)) else {
                continue;
            };
            for &node in &px {
                on_path[node] = true;
            }
            let disjoint = py.iter().all(|&node| node == root || !on_path[node]);
            for &node in &px {
                on_path[node] = false;
            }
            if !disjoint {
                continue;
            }
            let mut cycle = CycleVector::zeros(m);
            cycle.toggle(e);
            for path in [&px, &py] {
                for pair in path.windows(2) {
                    let edge = graph.edge_index(pair[0], pair[1]).expect("tree edges exist");
                    cycle.toggle(edge);
                }
            }
            candidates.push(cycle);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    candidates
}

/// Greedy matroid selection over already sorted candidates.
pub(crate) fn greedy_basis<'a>(
    sorted: impl IntoIterator<Item = &'a CycleVector>,
    dimension: usize,
) -> Vec<CycleVector> {
    let mut span = Gf2Span::new();
    let mut chosen = Vec::with_capacity(dimension);
    for candidate in sorted {
        if chosen.len() == dimension {
            break;
        }
        if span.insert(candidate) {
            chosen.push(candidate.clone());
        }
    }
    chosen
}

/// Minimum-total-length cycle basis of a connected graph.
pub fn minimum_cycle_basis(graph: &Graph) -> Result<CycleBasis> {
    let dimension = cycle_space_dimension(graph)?;
    if dimension == 0 {
        return Ok(CycleBasis::from_sorted(Vec::new()));
    }
    let arcs = ArcTable::new(graph)?;
    let candidates = horton_candidates(graph, &arcs);
    let chosen = greedy_basis(&candidates, dimension);
    debug_assert_eq!(chosen.len(), dimension, "Horton candidates span the cycle space");
    Ok(CycleBasis::from_sorted(chosen))
}

/// `log2` of the basis total length, in bits.
pub fn conjectured_entropy(basis: &CycleBasis) -> Result<f64> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok((basis.total_length() as f64).log2())
}
