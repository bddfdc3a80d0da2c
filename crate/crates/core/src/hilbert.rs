//! Composite space `|x c s>` of walker position, color and node spins.
//!
//! Amplitudes are stored arc-major: index `a * 2^|V| + s`, where `a` is the
//! arc index of `(x, c)` and bit `x` of `s` is the spin at node `x`
//! (0 = up, 1 = down). Each arc therefore owns a contiguous row of `2^|V|`
//! spin amplitudes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph, GraphRng};

/// Largest node count whose spin space we agree to index.
pub const MAX_SPIN_NODES: usize = 25;

/// Spin configuration; bit `x` is the spin at node `x`, 1 meaning down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig(pub usize);

impl SpinConfig {
    pub const ALL_UP: SpinConfig = SpinConfig(0);

    pub fn is_down(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    pub fn num_down(self) -> u32 {
        self.0.count_ones()
    }
}

/// `2|E| * 2^|V|`.
pub fn dimension(graph: &Graph) -> Result<usize> {
    let n = graph.num_nodes();
    if n > MAX_SPIN_NODES {
        return Err(Error::DimensionOverflow {
            nodes: n,
            limit: MAX_SPIN_NODES,
        });
    }
    Ok((2 * graph.num_edges()) << n)
}

pub fn basis_index(arcs: &ArcTable, x: usize, c: usize, s: SpinConfig) -> Result<usize> {
    let arc = arcs.arc_of(x, c)?;
    let spins = 1usize << arcs.num_nodes();
    if s.0 >= spins {
        return Err(Error::InvalidParameters(format!(
            "spin configuration {} needs more than {} bits",
            s.0,
            arcs.num_nodes()
        )));
    }
    Ok(arc * spins + s.0)
}

/// Inverse of [`basis_index`]: `(x, c, s)`.
pub fn decompose(arcs: &ArcTable, index: usize) -> (usize, usize, SpinConfig) {
    let n = arcs.num_nodes();
    let arc = index >> n;
    let s = index & ((1 << n) - 1);
    (arcs.node_of(arc), arcs.color_of(arc), SpinConfig(s))
}

/// Dense state over the full walker-spin space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    num_arcs: usize,
    num_spins: usize,
}

impl StateVector {
    pub fn zeros(arcs: &ArcTable) -> Self {
        let num_spins = arcs.num_nodes();
        StateVector {
            amplitudes: vec![Complex64::new(0.0, 0.0); arcs.num_arcs() << num_spins],
            num_arcs: arcs.num_arcs(),
            num_spins,
        }
    }

    pub fn from_amplitudes(arcs: &ArcTable, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = arcs.num_arcs() << arcs.num_nodes();
        if amplitudes.len() != expected {
            return Err(Error::StateMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(StateVector {
            amplitudes,
            num_arcs: arcs.num_arcs(),
            num_spins: arcs.num_nodes(),
        })
    }

    /// Basis vector `|index>`.
    pub fn basis(arcs: &ArcTable, index: usize) -> Self {
        let mut state = Self::zeros(arcs);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        state
    }

    /// Normalized state with independent Gaussian real and imaginary parts.
    pub fn random(arcs: &ArcTable, seed: u64) -> Self {
        let mut rng = GraphRng::new(seed);
        let mut state = Self::zeros(arcs);
        for amp in &mut state.amplitudes {
            // Box-Muller; 1 - u keeps the logarithm finite.
            let r = (-2.0 * (1.0 - rng.uniform()).ln()).sqrt();
            let theta = std::f64::consts::TAU * rng.uniform();
            *amp = Complex64::from_polar(r, theta);
        }
        state.normalize();
        state
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn num_arcs(&self) -> usize {
        self.num_arcs
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    /// Length of one arc row, `2^|V|`.
    pub fn spin_dim(&self) -> usize {
        1 << self.num_spins
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub(crate) fn swap_buffer(&mut self, other: &mut Vec<Complex64>) {
        debug_assert_eq!(other.len(), self.amplitudes.len());
        std::mem::swap(&mut self.amplitudes, other);
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Spin amplitudes of one arc.
    pub fn row(&self, arc: usize) -> &[Complex64] {
        let s = self.spin_dim();
        &self.amplitudes[arc * s..(arc + 1) * s]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, Complex64> {
        self.amplitudes.chunks_exact(self.spin_dim())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let inv = 1.0 / self.norm();
        for amp in &mut self.amplitudes {
            *amp *= inv;
        }
    }

    pub fn check_matches(&self, arcs: &ArcTable) -> Result<()> {
        let expected = arcs.num_arcs() << arcs.num_nodes();
        if self.len() != expected || self.num_arcs != arcs.num_arcs() {
            return Err(Error::StateMismatch {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Equal superposition over nodes with color 0 and all spins up.
pub fn initial_state(arcs: &ArcTable) -> StateVector {
    let n = arcs.num_nodes();
    let amplitude = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut state = StateVector::zeros(arcs);
    for x in 0..n {
        let index = arcs.offset(x) << n;
        state.amplitudes[index] = amplitude;
    }
    state
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"CWSTATE1";

/// FNV-1a over the node count and canonical edge list.
pub fn graph_hash(graph: &Graph) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    let mut feed = |v: u64| {
        for byte in v.to_le_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
    };
    feed(graph.num_nodes() as u64);
    for &(u, v) in graph.edges() {
        feed(u as u64);
        feed(v as u64);
    }
    hash
}

/// Binary checkpoint: magic, dimension, graph hash (all little-endian
/// `u64`), then `(re, im)` little-endian `f64` pairs.
pub fn save_checkpoint(path: impl AsRef<Path>, state: &StateVector, graph: &Graph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&(state.len() as u64).to_le_bytes())?;
    out.write_all(&graph_hash(graph).to_le_bytes())?;
    for amp in state.amplitudes() {
        out.write_all(&amp.re.to_le_bytes())?;
        out.write_all(&amp.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>, graph: &Graph, arcs: &ArcTable) -> Result<StateVector> {
    let mut input = BufReader::new(File::open(path)?);
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    if &word != CHECKPOINT_MAGIC {
        return Err(Error::Malformed("not a state checkpoint".into()));
    }
    input.read_exact(&mut word)?;
    let len = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    if u64::from_le_bytes(word) != graph_hash(graph) {
        return Err(Error::Malformed("checkpoint was written for a different graph".into()));
    }
    let expected = dimension(graph)?;
    if len != expected {
        return Err(Error::StateMismatch { expected, found: len });
    }
    let mut amplitudes = Vec::with_capacity(len);
    let mut pair = [0u8; 16];
    for _ in 0..len {
        input.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        amplitudes.push(Complex64::new(re, im));
    }
    StateVector::from_amplitudes(arcs, amplitudes)
}
