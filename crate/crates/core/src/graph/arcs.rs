use crate::error::{Error, Result};

use super::Graph;

/// Dense indexing of the particle's (node, color) states.
///
/// Arcs are numbered node-major, color-minor: the arcs leaving node `x`
/// occupy the contiguous range `offset(x) .. offset(x) + d_x`, and arc
/// `(x, c)` points to the `c`-th smallest neighbor of `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcTable {
    offsets: Vec<usize>,
    node_of: Vec<usize>,
    color_of: Vec<usize>,
    target: Vec<usize>,
    reverse: Vec<usize>,
    d_max: usize,
}

impl ArcTable {
    pub fn new(graph: &Graph) -> Result<Self> {
        let n = graph.num_nodes();
        if graph.degrees().contains(&0) {
            return Err(Error::InvalidGraph("isolated node has no arcs".into()));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut node_of = Vec::with_capacity(2 * graph.num_edges());
        let mut color_of = Vec::with_capacity(2 * graph.num_edges());
        let mut target = Vec::with_capacity(2 * graph.num_edges());
        offsets.push(0);
        for x in 0..n {
            for (c, &y) in graph.neighbors(x).iter().enumerate() {
                node_of.push(x);
                color_of.push(c);
                target.push(y);
            }
            offsets.push(node_of.len());
        }
        let reverse = (0..node_of.len())
            .map(|a| {
                let (x, y) = (node_of[a], target[a]);
                let back = graph
                    .neighbors(y)
                    .binary_search(&x)
                    .expect("adjacency is symmetric");
                offsets[y] + back
            })
            .collect();
        let d_max = graph.degrees().into_iter().max().unwrap_or(0);
        Ok(ArcTable {
            offsets,
            node_of,
            color_of,
            target,
            reverse,
            d_max,
        })
    }

    pub fn num_arcs(&self) -> usize {
        self.node_of.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// First arc of node `x`; its arcs are `offset(x)..offset(x + 1)`.
    pub fn offset(&self, x: usize) -> usize {
        self.offsets[x]
    }

    pub fn arc_of(&self, x: usize, c: usize) -> Result<usize> {
        let degree = self.degree(x);
        if c >= degree {
            return Err(Error::InvalidColor {
                node: x,
                color: c,
                degree,
            });
        }
        Ok(self.offsets[x] + c)
    }

    pub fn node_of(&self, arc: usize) -> usize {
        self.node_of[arc]
    }

    pub fn color_of(&self, arc: usize) -> usize {
        self.color_of[arc]
    }

    /// Node the arc points to, i.e. the `c`-th neighbor of its tail.
    pub fn neighbor_of(&self, arc: usize) -> usize {
        self.target[arc]
    }

    /// Arc `(y -> x)` for arc `(x -> y)`.
    pub fn reverse(&self, arc: usize) -> usize {
        self.reverse[arc]
    }

    pub fn reverse_table(&self) -> &[usize] {
        &self.reverse
    }
}
