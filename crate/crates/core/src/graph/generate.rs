//! Seeded Watts-Strogatz and Erdős-Rényi generators.
//!
//! Sampling is written directly against the raw 64-bit output of ChaCha8
//! (seeded through `SeedableRng::seed_from_u64`) so that the float and range
//! conversions below, not a library's sampling internals, define the stream.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

use super::{Graph, GraphParams};

/// Name written into saved graph files.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64";

/// Attempts (sub-seeds `seed`, `seed + 1`, ...) before giving up.
pub const MAX_ATTEMPTS: u32 = 1000;

/// Portable sampler used by the generators.
pub struct GraphRng(ChaCha8Rng);

impl GraphRng {
    pub fn new(seed: u64) -> Self {
        GraphRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial, `uniform() < p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform in `0..n` by rejection (no modulo bias).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

/// Connected small-world graph: ring lattice with `k/2` neighbors per side,
/// each lattice edge `(u, u + j)` rewired to `(u, w)` with probability
/// `p_rewire`. Retries with sub-seeds until connected with min degree 2.
pub fn generate_watts_strogatz(n: usize, k: usize, p_rewire: f64, seed: u64) -> Result<Graph> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!("k must be even and >= 2, got {k}")));
    }
    if n <= k {
        return Err(Error::InvalidParameters(format!("need n > k, got n = {n}, k = {k}")));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(Error::InvalidParameters(format!(
            "rewiring probability must lie in [0, 1], got {p_rewire}"
        )));
    }
    let params = GraphParams::WattsStrogatz { k, p_rewire };
    retry(seed, |sub_seed| {
        let mut rng = GraphRng::new(sub_seed);
        let edges = watts_strogatz_edges(n, k, p_rewire, &mut rng);
        Graph::with_metadata(n, &edges, params, seed)
    })
}

/// Each unordered pair is an edge independently with probability `p_edge`.
pub fn generate_erdos_renyi(n: usize, p_edge: f64, seed: u64) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameters(format!("need n >= 3, got {n}")));
    }
    if !(p_edge > 0.0 && p_edge <= 1.0) {
        return Err(Error::InvalidParameters(format!(
            "edge probability must lie in (0, 1], got {p_edge}"
        )));
    }
    let params = GraphParams::ErdosRenyi { p_edge };
    retry(seed, |sub_seed| {
        let mut rng = GraphRng::new(sub_seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.chance(p_edge) {
                    edges.push((u, v));
                }
            }
        }
        Graph::with_metadata(n, &edges, params, seed)
    })
}

fn retry(seed: u64, mut attempt: impl FnMut(u64) -> Result<Graph>) -> Result<Graph> {
    for i in 0..MAX_ATTEMPTS {
        let graph = attempt(seed.wrapping_add(u64::from(i)))?;
        if graph.validate().ok {
            if i > 0 {
                log::debug!("graph accepted at attempt {i} (seed {seed})");
            }
            return Ok(graph);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

fn watts_strogatz_edges(n: usize, k: usize, p: f64, rng: &mut GraphRng) -> Vec<(usize, usize)> {
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !rng.chance(p) {
                continue;
            }
            // Edge may already have been moved away by an earlier rewire.
            if !adjacency[u].contains(&v) || adjacency[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.below(n as u64) as usize;
                if w != u && !adjacency[u].contains(&w) {
                    break w;
                }
            };
            adjacency[u].remove(&v);
            adjacency[v].remove(&u);
            adjacency[u].insert(w);
            adjacency[w].insert(u);
        }
    }
    let mut edges = Vec::with_capacity(n * k / 2);
    for (u, list) in adjacency.iter().enumerate() {
        edges.extend(list.range(u + 1..).map(|&v| (u, v)));
    }
    edges
}
