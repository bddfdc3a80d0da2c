//! Simple undirected graphs carrying the spin network, their random
//! generators and the arc (node, color) indexing used by the walker.
//!
//! Colors are ports: color `c` at node `x` points to the `c`-th neighbor of
//! `x` in ascending node-id order.

mod arcs;
mod generate;
mod io;

pub use arcs::ArcTable;
pub use generate::{generate_erdos_renyi, generate_watts_strogatz, GraphRng, MAX_ATTEMPTS, RNG_ALGORITHM};
pub use io::{load_graph, load_graph_relaxed, save_graph, GRAPH_SCHEMA};

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random graph family a [`Graph`] was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "ws")]
    WattsStrogatz,
    #[serde(rename = "er")]
    ErdosRenyi,
    #[serde(rename = "explicit")]
    Explicit,
}

impl Family {
    pub fn short_name(self) -> &'static str {
        match self {
            Family::WattsStrogatz => "ws",
            Family::ErdosRenyi => "er",
            Family::Explicit => "explicit",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ws" => Ok(Family::WattsStrogatz),
            "er" => Ok(Family::ErdosRenyi),
            "explicit" => Ok(Family::Explicit),
            other => Err(Error::InvalidParameters(format!(
                "unknown graph family `{other}` (expected ws, er or explicit)"
            ))),
        }
    }
}

/// Generation parameters; the variant fixes the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphParams {
    WattsStrogatz { k: usize, p_rewire: f64 },
    ErdosRenyi { p_edge: f64 },
    Explicit,
}

impl GraphParams {
    pub fn family(&self) -> Family {
        match self {
            GraphParams::WattsStrogatz { .. } => Family::WattsStrogatz,
            GraphParams::ErdosRenyi { .. } => Family::ErdosRenyi,
            GraphParams::Explicit => Family::Explicit,
        }
    }
}

/// Undirected simple graph with canonically ordered edges.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically; the
/// position of an edge in that list is its canonical index (used by cycle
/// vectors). Construction only enforces simplicity; connectivity and the
/// minimum degree are checked by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    params: GraphParams,
    seed: u64,
}

impl Graph {
    /// Builds an explicit graph from an edge list in any orientation/order.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_metadata(num_nodes, edges, GraphParams::Explicit, 0)
    }

    pub(crate) fn with_metadata(
        num_nodes: usize,
        edges: &[(usize, usize)],
        params: GraphParams,
        seed: u64,
    ) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let report = validate_edges(num_nodes, edges);
        if let Some(problem) = report.structural_problem() {
            return Err(Error::InvalidGraph(problem));
        }
        let mut canonical: Vec<(usize, usize)> =
            edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        canonical.sort_unstable();

        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in &canonical {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            num_nodes,
            edges: canonical,
            adjacency,
            params,
            seed,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `u < v`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `x` in ascending node id.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Canonical index of the edge `{u, v}`, if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn params(&self) -> GraphParams {
        self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.num_edges() as f64 / self.num_nodes as f64
    }

    /// Number of connected components (BFS).
    pub fn num_components(&self) -> usize {
        count_components(self.num_nodes, self.adjacency.iter().map(|l| l.as_slice()))
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    pub fn validate(&self) -> ValidationReport {
        validate_edges(self.num_nodes, &self.edges)
    }
}

/// Outcome of checking a raw edge list against the graph invariants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub connected: bool,
    pub components: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub degrees: Vec<usize>,
    pub self_loops: usize,
    pub duplicate_edges: usize,
    pub out_of_range: usize,
    /// True iff the graph is simple, connected and has minimum degree >= 2.
    pub ok: bool,
}

impl ValidationReport {
    fn structural_problem(&self) -> Option<String> {
        if self.out_of_range > 0 {
            Some(format!(
                "{} edge(s) reference nodes outside 0..{}",
                self.out_of_range, self.num_nodes
            ))
        } else if self.self_loops > 0 {
            Some(format!("{} self-loop(s)", self.self_loops))
        } else if self.duplicate_edges > 0 {
            Some(format!("{} duplicate edge(s)", self.duplicate_edges))
        } else {
            None
        }
    }

    /// Human-readable reason the report is not ok, if any.
    pub fn problem(&self) -> Option<String> {
        if let Some(p) = self.structural_problem() {
            return Some(p);
        }
        if !self.connected {
            return Some(format!("disconnected ({} components)", self.components));
        }
        if self.min_degree < 2 {
            return Some(format!("minimum degree {} < 2", self.min_degree));
        }
        None
    }
}

/// Checks an arbitrary edge list; never fails, reports instead.
pub fn validate_edges(num_nodes: usize, edges: &[(usize, usize)]) -> ValidationReport {
    let mut self_loops = 0;
    let mut out_of_range = 0;
    let mut seen = std::collections::BTreeSet::new();
    let mut duplicate_edges = 0;
    let mut adjacency = vec![Vec::new(); num_nodes];
    for &(u, v) in edges {
        if u >= num_nodes || v >= num_nodes {
            out_of_range += 1;
            continue;
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            duplicate_edges += 1;
            continue;
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let degrees: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let components = count_components(num_nodes, adjacency.iter().map(|l| l.as_slice()));
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mean_degree = if num_nodes == 0 {
        0.0
    } else {
        degrees.iter().sum::<usize>() as f64 / num_nodes as f64
    };
    let connected = components == 1;
    let ok = connected && min_degree >= 2 && self_loops == 0 && duplicate_edges == 0 && out_of_range == 0;
    ValidationReport {
        num_nodes,
        num_edges: edges.len(),
        connected,
        components,
        min_degree,
        max_degree,
        mean_degree,
        degrees,
        self_loops,
        duplicate_edges,
        out_of_range,
        ok,
    }
}

fn count_components<'a>(num_nodes: usize, adjacency: impl Iterator<Item = &'a [usize]>) -> usize {
    let adjacency: Vec<&[usize]> = adjacency.collect();
    let mut seen = vec![false; num_nodes];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..num_nodes {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for &y in adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_valid() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let report = g.validate();
        assert!(report.ok);
        assert_eq!(report.degrees, vec![2, 2, 2]);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn disjoint_triangles_are_disconnected() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let report = g.validate();
        assert!(!report.ok);
        assert!(!report.connected);
        assert_eq!(report.components, 2);
    }

    #[test]
    fn path_has_degree_one_endpoints() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let report = g.validate();
        assert!(report.connected);
        assert_eq!(report.min_degree, 1);
        assert!(!report.ok);
    }

    #[test]
    fn raw_validation_detects_defects() {
        let report = validate_edges(3, &[(0, 1), (1, 0), (2, 2), (0, 3)]);
        assert_eq!(report.duplicate_edges, 1);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.out_of_range, 1);
        assert!(!report.ok);
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 5)]).is_err());
    }

    #[test]
    fn edge_index_is_orientation_free() {
        let g = Graph::from_edges(4, &[(3, 0), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.edge_index(0, 1), Some(0));
        assert_eq!(g.edge_index(3, 0), Some(1));
        assert_eq!(g.edge_index(2, 1), Some(2));
        assert_eq!(g.edge_index(2, 3), None);
    }
}
