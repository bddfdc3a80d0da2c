use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::Graph;

const WORD: usize = 64;

/// Edge subset of a graph as a GF(2) vector over the canonical edge order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleVector {
    words: Vec<u64>,
    num_edges: usize,
    len: usize,
}

impl CycleVector {
    pub fn zeros(num_edges: usize) -> Self {
        CycleVector {
            words: vec![0; num_edges.div_ceil(WORD)],
            num_edges,
            len: 0,
        }
    }

    /// Vector with the given edge indices set; repeated indices cancel.
    pub fn from_edges(num_edges: usize, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(num_edges);
        for e in edges {
            v.toggle(e);
        }
        v
    }

    pub fn toggle(&mut self, edge: usize) {
        assert!(edge < self.num_edges, "edge {edge} outside universe of {}", self.num_edges);
        let mask = 1u64 << (edge % WORD);
        let word = &mut self.words[edge / WORD];
        if *word & mask == 0 {
            self.len += 1;
        } else {
            self.len -= 1;
        }
        *word ^= mask;
    }

    pub fn contains(&self, edge: usize) -> bool {
        edge < self.num_edges && self.words[edge / WORD] >> (edge % WORD) & 1 == 1
    }

    /// Number of edges set (the cycle length for simple cycles).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Size of the edge universe.
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn edge_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len);
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * WORD + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn lowest_edge(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Symmetric difference of the two edge sets.
    pub fn ring_sum(&self, other: &CycleVector) -> Result<CycleVector> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub(crate) fn add_assign(&mut self, other: &CycleVector) -> Result<()> {
        if self.num_edges != other.num_edges {
            return Err(Error::EdgeUniverseMismatch {
                left: self.num_edges,
                right: other.num_edges,
            });
        }
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
            len += a.count_ones() as usize;
        }
        self.len = len;
        Ok(())
    }

    /// Per-node count of incident set edges.
    pub fn incidence(&self, graph: &Graph) -> Vec<usize> {
        let mut deg = vec![0; graph.num_nodes()];
        for e in self.edge_indices() {
            let (u, v) = graph.edges()[e];
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Even incidence at every node: an element of the cycle space.
    pub fn is_in_cycle_space(&self, graph: &Graph) -> bool {
        self.num_edges == graph.num_edges() && self.incidence(graph).iter().all(|d| d % 2 == 0)
    }

    /// A single connected cycle in which every touched node has degree 2.
    pub fn is_simple_cycle(&self, graph: &Graph) -> bool {
        if self.num_edges != graph.num_edges() || self.len < 3 {
            return false;
        }
        let incidence = self.incidence(graph);
        if incidence.iter().any(|&d| d != 0 && d != 2) {
            return false;
        }
        // Walk the cycle from its first edge and check every edge is reached.
        let edges = self.edge_indices();
        let (start, mut current) = graph.edges()[edges[0]];
        let mut previous_edge = edges[0];
        let mut steps = 1;
        while current != start {
            let next_edge = graph
                .neighbors(current)
                .iter()
                .filter_map(|&y| graph.edge_index(current, y))
                .find(|&e| e != previous_edge && self.contains(e));
            let Some(e) = next_edge else { return false };
            let (a, b) = graph.edges()[e];
            current = if a == current { b } else { a };
            previous_edge = e;
            steps += 1;
        }
        steps == self.len
    }
}

impl Ord for CycleVector {
    /// Length first, then lexicographic order of the sorted edge-index lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| {
                for (a, b) in self.words.iter().zip(&other.words) {
                    let diff = a ^ b;
                    if diff != 0 {
                        // Whoever owns the lowest differing edge lists it first.
                        let low = diff & diff.wrapping_neg();
                        return if a & low != 0 {
                            Ordering::Less
                        } else {
                            Ordering::Greater
                        };
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.num_edges.cmp(&other.num_edges))
    }
}

impl PartialOrd for CycleVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Incrementally built GF(2) row space with one pivot per stored row.
///
/// Every stored row is zero at the pivots of the rows stored before it, so a
/// single pass in insertion order fully reduces a candidate.
#[derive(Debug, Clone, Default)]
pub struct Gf2Span {
    rows: Vec<(usize, CycleVector)>,
}

impl Gf2Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &CycleVector) -> CycleVector {
        let mut x = v.clone();
        for (pivot, row) in &self.rows {
            if x.contains(*pivot) {
                x.add_assign(row).expect("rows share the edge universe");
            }
        }
        x
    }

    pub fn is_independent(&self, v: &CycleVector) -> bool {
        !self.reduce(v).is_empty()
    }

    /// Adds `v` if it is independent of the span; reports whether it was.
    pub fn insert(&mut self, v: &CycleVector) -> bool {
        let reduced = self.reduce(v);
        match reduced.lowest_edge() {
            Some(pivot) => {
                self.rows.push((pivot, reduced));
                true
            }
            None => false,
        }
    }
}
