//! One-step walk operator `U = Z X M C` and its fast in-place kernels.
//!
//! Every kernel writes disjoint parts of the state from a fixed arithmetic
//! expression, so the result does not depend on how rayon schedules the
//! tiles: runs are bitwise identical for any thread count.

pub mod dense;

pub use dense::{build_dense_unitary, DenseUnitary, DENSE_MAX_DIMENSION};

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph};
use crate::hilbert::{self, StateVector};

/// Spin amplitudes per coin tile.
const COIN_TILE: usize = 2048;

/// `C(d)[c][c'] = exp(2 pi i c c' / d) / sqrt(d)` for every degree present.
#[derive(Debug, Clone)]
pub struct CoinSet {
    matrices: BTreeMap<usize, Vec<Complex64>>,
}

impl CoinSet {
    pub fn new(arcs: &ArcTable) -> Self {
        let mut matrices = BTreeMap::new();
        for x in 0..arcs.num_nodes() {
            let d = arcs.degree(x);
            matrices.entry(d).or_insert_with(|| fourier_matrix(d));
        }
        CoinSet { matrices }
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.matrices.keys().copied()
    }

    /// Row-major `d x d` coin, if degree `d` occurs.
    pub fn matrix(&self, d: usize) -> Option<&[Complex64]> {
        self.matrices.get(&d).map(Vec::as_slice)
    }

    /// `max |C C^dagger - I|` over entries.
    pub fn unitarity_error(&self, d: usize) -> Option<f64> {
        let m = self.matrix(d)?;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += m[i * d + k] * m[j * d + k].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        Some(worst)
    }
}

fn fourier_matrix(d: usize) -> Vec<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    let mut m = Vec::with_capacity(d * d);
    for c in 0..d {
        for c2 in 0..d {
            // Reduce c * c' mod d first so the angle stays in [0, 2 pi).
            let phase = TAU * ((c * c2) % d) as f64 / d as f64;
            m.push(Complex64::from_polar(scale, phase));
        }
    }
    m
}

/// Sign of the Ising phase for every spin configuration: `true` when an odd
/// number of edges join two down spins.
#[derive(Debug, Clone)]
pub struct IsingPhaseTable {
    negative: Vec<bool>,
}

impl IsingPhaseTable {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.num_nodes();
        let edge_masks: Vec<usize> = graph.edges().iter().map(|&(u, v)| (1 << u) | (1 << v)).collect();
        let negative = (0..1usize << n)
            .map(|s| edge_masks.iter().filter(|&&m| s & m == m).count() % 2 == 1)
            .collect();
        IsingPhaseTable { negative }
    }

    pub fn len(&self) -> usize {
        self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.negative.is_empty()
    }

    pub fn is_negative(&self, s: usize) -> bool {
        self.negative[s]
    }
}

/// Interacting walk on one graph: operator tables plus a scratch buffer.
#[derive(Debug, Clone)]
pub struct QuantumWalk {
    graph: Graph,
    arcs: ArcTable,
    coins: CoinSet,
    ising: IsingPhaseTable,
    scratch: Vec<Complex64>,
}

/// Coin matrix, tile width and one row slice per color of a node.
type CoinTile<'a> = (&'a [Complex64], usize, Vec<&'a mut [Complex64]>);

/// The exchange writes colors 0 and 1, so every node needs degree >= 2.
pub(crate) fn require_walkable(graph: &Graph) -> Result<()> {
    match (0..graph.num_nodes()).find(|&x| graph.degree(x) < 2) {
        Some(x) => Err(Error::InvalidGraph(format!(
            "node {x} has degree {} < 2",
            graph.degree(x)
        ))),
        None => Ok(()),
    }
}

impl QuantumWalk {
    pub fn new(graph: &Graph) -> Result<Self> {
        hilbert::dimension(graph)?;
        require_walkable(graph)?;
        let arcs = ArcTable::new(graph)?;
        Ok(QuantumWalk {
            graph: graph.clone(),
            coins: CoinSet::new(&arcs),
            ising: IsingPhaseTable::new(graph),
            arcs,
            scratch: Vec::new(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn arcs(&self) -> &ArcTable {
        &self.arcs
    }

    pub fn coins(&self) -> &CoinSet {
        &self.coins
    }

    pub fn ising(&self) -> &IsingPhaseTable {
        &self.ising
    }

    pub fn initial_state(&self) -> StateVector {
        hilbert::initial_state(&self.arcs)
    }

    /// Fourier coin on the colors of every node, for each spin configuration.
    pub fn apply_coin(&self, psi: &mut StateVector) {
        debug_assert!(psi.check_matches(&self.arcs).is_ok());
        let s_dim = psi.spin_dim();
        let tile = COIN_TILE.min(s_dim);
        let mut tiles: Vec<CoinTile> = Vec::new();
        let mut rest = psi.amplitudes_mut();
        for x in 0..self.arcs.num_nodes() {
            let d = self.arcs.degree(x);
            let (block, tail) = rest.split_at_mut(d * s_dim);
            rest = tail;
            let coin = self.coins.matrix(d).expect("coin exists for every degree");
            let mut rows: Vec<_> = block.chunks_mut(s_dim).map(|r| r.chunks_mut(tile)).collect();
            for _ in 0..s_dim / tile {
                let parts = rows.iter_mut().map(|r| r.next().unwrap()).collect();
                tiles.push((coin, d, parts));
            }
        }
        tiles.into_par_iter().for_each(|(coin, d, mut rows)| {
            let mut input = vec![Complex64::new(0.0, 0.0); d];
            for s in 0..rows[0].len() {
                for (c, row) in rows.iter().enumerate() {
                    input[c] = row[s];
                }
                for (c, row) in rows.iter_mut().enumerate() {
                    let weights = &coin[c * d..(c + 1) * d];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (w, v) in weights.iter().zip(&input) {
                        acc += w * v;
                    }
                    row[s] = acc;
                }
            }
        });
    }

    /// Flip-flop shift: the row of arc `x -> y` moves to arc `y -> x`.
    pub fn apply_motion(&mut self, psi: &mut StateVector) {
        debug_assert!(psi.check_matches(&self.arcs).is_ok());
        let s_dim = psi.spin_dim();
        let reverse = self.arcs.reverse_table();
        self.scratch.resize(psi.len(), Complex64::new(0.0, 0.0));
        {
            let source = psi.amplitudes();
            self.scratch
                .par_chunks_mut(s_dim)
                .enumerate()
                .for_each(|(arc, out)| {
                    let from = reverse[arc];
                    out.copy_from_slice(&source[from * s_dim..(from + 1) * s_dim]);
                });
        }
        psi.swap_buffer(&mut self.scratch);
    }

    /// Swaps color value and local spin at each node when the color is 0 or 1:
    /// `(x, c=0, s_x=1) <-> (x, c=1, s_x=0)`.
    pub fn apply_exchange(&self, psi: &mut StateVector) {
        debug_assert!(psi.check_matches(&self.arcs).is_ok());
        let s_dim = psi.spin_dim();
        let mut pairs = Vec::with_capacity(self.arcs.num_nodes());
        let mut rest = psi.amplitudes_mut();
        for x in 0..self.arcs.num_nodes() {
            let d = self.arcs.degree(x);
            let (block, tail) = rest.split_at_mut(d * s_dim);
            rest = tail;
            let (row0, others) = block.split_at_mut(s_dim);
            pairs.push((x, row0, &mut others[..s_dim]));
        }
        pairs.into_par_iter().for_each(|(x, row0, row1)| {
            let bit = 1usize << x;
            for s in (0..s_dim).filter(|s| s & bit == 0) {
                std::mem::swap(&mut row0[s | bit], &mut row1[s]);
            }
        });
    }

    /// `(-1)^{sum over edges of s_x s_y}` on every amplitude.
    pub fn apply_ising(&self, psi: &mut StateVector) {
        debug_assert!(psi.check_matches(&self.arcs).is_ok());
        let s_dim = psi.spin_dim();
        let table = &self.ising.negative;
        psi.amplitudes_mut().par_chunks_mut(s_dim).for_each(|row| {
            for (amp, &neg) in row.iter_mut().zip(table) {
                if neg {
                    *amp = -*amp;
                }
            }
        });
    }

    /// One step: coin, then motion, exchange and Ising phase.
    pub fn step(&mut self, psi: &mut StateVector) {
        self.apply_coin(psi);
        self.apply_motion(psi);
        self.apply_exchange(psi);
        self.apply_ising(psi);
    }

    /// Iterates `step`, calling `observe(t, psi)` at `t = 0`, every
    /// `measure_every` steps, and at `t_max`.
    pub fn evolve<E>(
        &mut self,
        psi: &mut StateVector,
        t_max: usize,
        measure_every: usize,
        mut observe: impl FnMut(usize, &StateVector) -> std::result::Result<(), E>,
    ) -> std::result::Result<(), E> {
        let every = measure_every.max(1);
        observe(0, psi)?;
        for t in 1..=t_max {
            self.step(psi);
            if t % every == 0 || t == t_max {
                observe(t, psi)?;
            }
        }
        Ok(())
    }
}
