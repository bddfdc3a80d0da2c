//! Brute-force minimum cycle basis for small graphs, used to check the
//! Horton route. Shares no candidate generation or elimination code with it:
//! cycles are enumerated by backtracking and independence is tested on
//! plain `u64` edge masks.

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::{cycle_space_dimension, CycleBasis, CycleVector};

pub const ORACLE_MAX_NODES: usize = 8;

/// Every simple cycle (length >= 3) as a node sequence, each listed once:
/// it starts at its smallest node and its second node is smaller than its
/// last.
pub fn enumerate_simple_cycles(graph: &Graph) -> Result<Vec<Vec<usize>>> {
    let n = graph.num_nodes();
    if n > ORACLE_MAX_NODES {
        return Err(Error::TooLarge(format!(
            "exhaustive cycle enumeration limited to {ORACLE_MAX_NODES} nodes, got {n}"
        )));
    }
    let mut cycles = Vec::new();
    for start in 0..n {
        let mut path = vec![start];
        let mut used = vec![false; n];
        used[start] = true;
        extend(graph, start, &mut path, &mut used, &mut cycles);
    }
    Ok(cycles)
}

fn extend(graph: &Graph, start: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    for &next in graph.neighbors(last) {
        if next == start && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        }
        if next > start && !used[next] {
            used[next] = true;
            path.push(next);
            extend(graph, start, path, used, out);
            path.pop();
            used[next] = false;
        }
    }
}

fn cycle_mask(graph: &Graph, cycle: &[usize]) -> u64 {
    let mut mask = 0u64;
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        mask |= 1 << graph.edge_index(a, b).expect("cycle follows edges");
    }
    mask
}

/// Exact minimum cycle basis by greedy selection over all simple cycles.
pub fn exhaustive_mcb_oracle(graph: &Graph) -> Result<CycleBasis> {
    let dimension = cycle_space_dimension(graph)?;
    let cycles = enumerate_simple_cycles(graph)?;
    debug_assert!(graph.num_edges() <= 64);
    let mut masks: Vec<(u32, u64)> = cycles
        .iter()
        .map(|c| {
            let m = cycle_mask(graph, c);
            (m.count_ones(), m)
        })
        .collect();
    // Length, then lexicographic edge lists: lowest differing edge wins,
    // which for masks is the reversed bit string compared as an integer.
    masks.sort_by_key(|&(len, m)| (len, std::cmp::Reverse(m.reverse_bits())));

    // Reduced rows keyed by their highest set bit.
    let mut pivots = [0u64; 64];
    let mut chosen = Vec::with_capacity(dimension);
    for &(_, mask) in &masks {
        if chosen.len() == dimension {
            break;
        }
        let mut x = mask;
        while x != 0 {
            let top = 63 - x.leading_zeros() as usize;
            if pivots[top] == 0 {
                pivots[top] = x;
                break;
            }
            x ^= pivots[top];
        }
        if x != 0 {
            chosen.push(mask);
        }
    }
    let m = graph.num_edges();
    let cycles = chosen
        .into_iter()
        .map(|mask| CycleVector::from_edges(m, (0..m).filter(|e| mask >> e & 1 == 1)))
        .collect();
    Ok(CycleBasis::from_sorted(cycles))
}
