//! Partial traces taken directly from `|psi><psi|` over the full basis, for
//! checking the Gram-matrix route on small graphs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::ArcTable;
use crate::hilbert::{decompose, StateVector};

use super::{DensityMatrix, Subsystem};

pub const ORACLE_MAX_DIMENSION: usize = 4096;

/// Reduced density matrix of `keep`, tracing out everything else.
///
/// Color is padded to `d_max`; position keeps pairs with equal color, so a
/// color present at only one of two nodes contributes nothing.
pub fn dense_partial_trace(psi: &StateVector, arcs: &ArcTable, keep: Subsystem) -> Result<DensityMatrix> {
    psi.check_matches(arcs)?;
    let dim = psi.len();
    if dim > ORACLE_MAX_DIMENSION {
        return Err(Error::TooLarge(format!(
            "dense partial trace limited to dimension {ORACLE_MAX_DIMENSION}, got {dim}"
        )));
    }
    let labels: Vec<(usize, usize, usize)> = (0..dim)
        .map(|i| {
            let (x, c, s) = decompose(arcs, i);
            (x, c, s.0)
        })
        .collect();
    let arc = |i: usize| i >> arcs.num_nodes();
    // (kept label, traced-out label) for each basis index.
    let split = |i: usize| -> (usize, (usize, usize)) {
        let (x, c, s) = labels[i];
        match keep {
            Subsystem::Position => (x, (c, s)),
            Subsystem::Color => (c, (x, s)),
            Subsystem::Particle => (arc(i), (s, 0)),
            Subsystem::Spin => (s, (arc(i), 0)),
        }
    };
    let size = match keep {
        Subsystem::Position => arcs.num_nodes(),
        Subsystem::Color => arcs.d_max(),
        Subsystem::Particle => arcs.num_arcs(),
        Subsystem::Spin => 1 << arcs.num_nodes(),
    };
    let amps = psi.amplitudes();
    let mut rho = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        if amps[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (ki, ti) = split(i);
        for j in 0..dim {
            let (kj, tj) = split(j);
            if ti == tj {
                rho[(ki, kj)] += amps[i] * amps[j].conj();
            }
        }
    }
    Ok(DensityMatrix::new(rho, keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::QuantumWalk;
    use crate::graph::Graph;
    use crate::observables::{color_density_from_gram, particle_gram, position_density_from_gram};

    fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        a.matrix()
            .iter()
            .zip(b.matrix().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn triangle_after_one_step_matches_gram_route() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let mut walk = QuantumWalk::new(&g).unwrap();
        let mut psi = walk.initial_state();
        walk.step(&mut psi);
        let arcs = walk.arcs();
        let gram = particle_gram(&psi);
        let color = dense_partial_trace(&psi, arcs, Subsystem::Color).unwrap();
        assert!(max_diff(&color, &color_density_from_gram(&gram, arcs)) < 1e-12);
        let position = dense_partial_trace(&psi, arcs, Subsystem::Position).unwrap();
        assert!(max_diff(&position, &position_density_from_gram(&gram, arcs)) < 1e-12);
        let particle = dense_partial_trace(&psi, arcs, Subsystem::Particle).unwrap();
        assert!(max_diff(&particle, &gram) < 1e-12);
    }

    #[test]
    fn schmidt_symmetry_on_random_states() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let walk = QuantumWalk::new(&g).unwrap();
        for seed in 0..5 {
            let psi = StateVector::random(walk.arcs(), seed);
            let spin = dense_partial_trace(&psi, walk.arcs(), Subsystem::Spin).unwrap();
            let s_spin = spin.entropy().unwrap();
            let s_gram = particle_gram(&psi).entropy().unwrap();
            assert!((s_spin - s_gram).abs() < 1e-10);
        }
    }

    #[test]
    fn mixed_degree_color_padding() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (2, 4)]).unwrap();
        let walk = QuantumWalk::new(&g).unwrap();
        let psi = StateVector::random(walk.arcs(), 77);
        let arcs = walk.arcs();
        let gram = particle_gram(&psi);
        let color = dense_partial_trace(&psi, arcs, Subsystem::Color).unwrap();
        assert_eq!(color.dim(), 4);
        assert!(max_diff(&color, &color_density_from_gram(&gram, arcs)) < 1e-12);
        let position = dense_partial_trace(&psi, arcs, Subsystem::Position).unwrap();
        assert!(max_diff(&position, &position_density_from_gram(&gram, arcs)) < 1e-12);
    }
}
