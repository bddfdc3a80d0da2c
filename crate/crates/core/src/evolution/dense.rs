//! Dense matrix of `U` for small graphs, assembled from the operator
//! definitions on basis states rather than from the fast kernels.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph};
use crate::hilbert::{self, basis_index, decompose, SpinConfig, StateVector};

pub const DENSE_MAX_DIMENSION: usize = 4096;

#[derive(Debug, Clone)]
pub struct DenseUnitary {
    matrix: DMatrix<Complex64>,
}

impl DenseUnitary {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, psi: &StateVector, arcs: &ArcTable) -> Result<StateVector> {
        psi.check_matches(arcs)?;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let out = &self.matrix * v;
        StateVector::from_amplitudes(arcs, out.as_slice().to_vec())
    }

    /// `max |U U^dagger - I|` over entries.
    pub fn unitarity_error(&self) -> f64 {
        let product = &self.matrix * self.matrix.adjoint();
        let mut worst = 0.0f64;
        for i in 0..product.nrows() {
            for j in 0..product.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((product[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Sparse image of one basis state: `(index, amplitude)` pairs.
type Image = Vec<(usize, Complex64)>;

fn coin_image(arcs: &ArcTable, index: usize) -> Image {
    let (x, c, s) = decompose(arcs, index);
    let d = arcs.degree(x);
    let scale = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|c_out| {
            let phase = TAU * (c_out * c) as f64 / d as f64;
            (basis_index(arcs, x, c_out, s).unwrap(), Complex64::from_polar(scale, phase))
        })
        .collect()
}

fn motion_target(graph: &Graph, arcs: &ArcTable, index: usize) -> usize {
    let (x, c, s) = decompose(arcs, index);
    let y = graph.neighbors(x)[c];
    let back = graph.neighbors(y).iter().position(|&z| z == x).unwrap();
    basis_index(arcs, y, back, s).unwrap()
}

fn exchange_target(arcs: &ArcTable, index: usize) -> usize {
    let (x, c, s) = decompose(arcs, index);
    if c > 1 {
        return index;
    }
    let spin = usize::from(s.is_down(x));
    let swapped = (s.0 & !(1 << x)) | (c << x);
    basis_index(arcs, x, spin, SpinConfig(swapped)).unwrap()
}

fn ising_sign(graph: &Graph, s: SpinConfig) -> f64 {
    let down_pairs = graph
        .edges()
        .iter()
        .filter(|&&(u, v)| s.is_down(u) && s.is_down(v))
        .count();
    if down_pairs % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Column `j` of `U` is `Z X M C |j>`.
pub fn build_dense_unitary(graph: &Graph) -> Result<DenseUnitary> {
    let dimension = hilbert::dimension(graph)?;
    super::require_walkable(graph)?;
    if dimension > DENSE_MAX_DIMENSION {
        return Err(Error::TooLarge(format!(
            "dense unitary limited to dimension {DENSE_MAX_DIMENSION}, got {dimension}"
        )));
    }
    let arcs = ArcTable::new(graph)?;
    let mut matrix = DMatrix::from_element(dimension, dimension, Complex64::new(0.0, 0.0));
    for column in 0..dimension {
        for (after_coin, amplitude) in coin_image(&arcs, column) {
            let after_motion = motion_target(graph, &arcs, after_coin);
            let after_exchange = exchange_target(&arcs, after_motion);
            let (_, _, s) = decompose(&arcs, after_exchange);
            matrix[(after_exchange, column)] += amplitude * ising_sign(graph, s);
        }
    }
    Ok(DenseUnitary { matrix })
}
