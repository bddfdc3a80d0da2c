//! Thermalization observables and entanglement entropies of a walk state.
//!
//! The spin entropy is obtained from the `2|E| x 2|E|` particle Gram matrix
//! `G[a, b] = sum_s psi(a, s) conj(psi(b, s))`: for a pure state it shares
//! its nonzero spectrum with the `2^|V|`-dimensional spin density matrix.
//! The position and color density matrices are partial sums of `G`.

mod density;
pub mod oracle;
mod record;

pub use density::{
    spectrum_entropy, von_neumann_entropy, DensityMatrix, Subsystem, EIGENVALUE_CLAMP, HERMITIAN_TOLERANCE,
    TRACE_TOLERANCE,
};
pub use record::{measure, GraphMeta, MeasurementRow, RunRecord, RunSummary, PROBABILITY_TOLERANCE};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{ArcTable, Graph};
use crate::hilbert::StateVector;

/// Spin amplitudes per accumulation block of the Gram matrix.
const GRAM_BLOCK: usize = 512;

/// `p(x) = sum_{c, s} |psi(x, c, s)|^2`.
pub fn position_distribution(psi: &StateVector, arcs: &ArcTable) -> Vec<f64> {
    let arc_weights: Vec<f64> = (0..psi.num_arcs())
        .into_par_iter()
        .map(|a| psi.row(a).iter().map(Complex64::norm_sqr).sum())
        .collect();
    (0..arcs.num_nodes())
        .map(|x| arc_weights[arcs.offset(x)..arcs.offset(x + 1)].iter().sum())
        .collect()
}

/// Occupation proportional to degree, `d_x / 2|E|`.
pub fn microcanonical_distribution(graph: &Graph) -> Vec<f64> {
    let total = 2.0 * graph.num_edges() as f64;
    graph.degrees().into_iter().map(|d| d as f64 / total).collect()
}

/// `sum_s |psi(., s)|^2`, the spin-configuration marginal.
pub fn spin_marginal(psi: &StateVector) -> Vec<f64> {
    let s_dim = psi.spin_dim();
    let block = GRAM_BLOCK.min(s_dim);
    let mut weights = vec![0.0; s_dim];
    weights.par_chunks_mut(block).enumerate().for_each(|(k, out)| {
        let start = k * block;
        for row in psi.rows() {
            for (w, amp) in out.iter_mut().zip(&row[start..start + block]) {
                *w += amp.norm_sqr();
            }
        }
    });
    weights
}

/// Per-node mean of `sigma_z`, with spin up (bit 0) counting `+1`.
pub fn mean_spin_z(psi: &StateVector) -> f64 {
    let n = psi.num_spins() as f64;
    spin_marginal(psi)
        .iter()
        .enumerate()
        .map(|(s, w)| w * (n - 2.0 * s.count_ones() as f64))
        .sum::<f64>()
        / n
}

/// `sum_i a_i conj(b_i)` with a fixed four-lane accumulation order.
fn conj_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let mut xa = a.chunks_exact(4);
    let mut xb = b.chunks_exact(4);
    for (x, y) in (&mut xa).zip(&mut xb) {
        for k in 0..4 {
            re[k] += x[k].re * y[k].re + x[k].im * y[k].im;
            im[k] += x[k].im * y[k].re - x[k].re * y[k].im;
        }
    }
    for (x, y) in xa.remainder().iter().zip(xb.remainder()) {
        re[0] += x.re * y.re + x.im * y.im;
        im[0] += x.im * y.re - x.re * y.im;
    }
    Complex64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]))
}

/// Particle (arc) reduced density matrix, the Gram matrix of the arc rows.
pub fn particle_gram(psi: &StateVector) -> DensityMatrix {
    let m = psi.num_arcs();
    let s_dim = psi.spin_dim();
    let block = GRAM_BLOCK.min(s_dim);
    let amplitudes = psi.amplitudes();
    let mut upper = vec![Complex64::new(0.0, 0.0); m * m];
    for start in (0..s_dim).step_by(block) {
        let piece = |a: usize| &amplitudes[a * s_dim + start..a * s_dim + start + block];
        upper.par_chunks_mut(m).enumerate().for_each(|(a, acc)| {
            let row_a = piece(a);
            for (b, entry) in acc.iter_mut().enumerate().skip(a) {
                *entry += conj_dot(row_a, piece(b));
            }
        });
    }
    let matrix = DMatrix::from_fn(m, m, |a, b| {
        if a <= b {
            upper[a * m + b]
        } else {
            upper[b * m + a].conj()
        }
    });
    DensityMatrix::new(matrix, Subsystem::Particle)
}

/// `rho_x[x, x'] = sum_c G[(x, c), (x', c)]` over colors present at both.
pub fn position_density_from_gram(gram: &DensityMatrix, arcs: &ArcTable) -> DensityMatrix {
    let n = arcs.num_nodes();
    let g = gram.matrix();
    let matrix = DMatrix::from_fn(n, n, |x, y| {
        let shared = arcs.degree(x).min(arcs.degree(y));
        (0..shared).map(|c| g[(arcs.offset(x) + c, arcs.offset(y) + c)]).sum()
    });
    DensityMatrix::new(matrix, Subsystem::Position)
}

/// `rho_c[c, c'] = sum_x G[(x, c), (x, c')]`, colors padded to `d_max`.
pub fn color_density_from_gram(gram: &DensityMatrix, arcs: &ArcTable) -> DensityMatrix {
    let d = arcs.d_max();
    let g = gram.matrix();
    let matrix = DMatrix::from_fn(d, d, |c, c2| {
        (0..arcs.num_nodes())
            .filter(|&x| c.max(c2) < arcs.degree(x))
            .map(|x| g[(arcs.offset(x) + c, arcs.offset(x) + c2)])
            .sum()
    });
    DensityMatrix::new(matrix, Subsystem::Color)
}

pub fn reduced_density_position(psi: &StateVector, arcs: &ArcTable) -> DensityMatrix {
    position_density_from_gram(&particle_gram(psi), arcs)
}

pub fn reduced_density_color(psi: &StateVector, arcs: &ArcTable) -> DensityMatrix {
    color_density_from_gram(&particle_gram(psi), arcs)
}

/// Mean subsystem entropy of a random pure state, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PageEntropy {
    pub value: f64,
    /// False when `D_A^2 > D`, outside the range where the formula holds.
    pub approximation_valid: bool,
}

/// `log2 D_A - D_A^2 / (2 D ln 2)`.
pub fn page_entropy(subsystem_dim: usize, total_dim: usize) -> PageEntropy {
    let d_a = subsystem_dim as f64;
    let d = total_dim as f64;
    let value = d_a.log2() - d_a * d_a / (2.0 * d * std::f64::consts::LN_2);
    let approximation_valid = subsystem_dim >= 1 && (subsystem_dim as u128).pow(2) <= total_dim as u128;
    if !approximation_valid {
        log::warn!("page entropy evaluated outside its range: D_A = {subsystem_dim}, D = {total_dim}");
    }
    PageEntropy {
        value,
        approximation_valid,
    }
}

/// `(1/2) sum |p - q|`.
pub fn total_variation_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
