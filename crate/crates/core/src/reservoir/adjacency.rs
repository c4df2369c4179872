use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::distr::{Distribution, Uniform};

use crate::linalg::{is_structurally_nilpotent, spectral_radius};
use crate::rng::{rng_from_seed, uniform_symmetric};
use crate::{Error, Result};

/// Raw radii below this cannot be rescaled.
const DEGENERATE_RADIUS: f64 = 1e-12;

/// Node coupling matrix with zero diagonal, rescaled to a target spectral
/// radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    matrix: DMatrix<f64>,
    spectral_radius: f64,
}

impl Adjacency {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Spectral radius measured after rescaling.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Wraps an arbitrary square matrix, measuring its spectral radius.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let spectral_radius = spectral_radius(&matrix)?;
        Ok(Adjacency { matrix, spectral_radius })
    }
}

/// Random sparse adjacency matrix.
///
/// `round(density · M²)` positions are drawn without replacement and filled
/// with U(-1, 1) values; the diagonal is then cleared and the matrix scaled to
/// spectral radius `sigma`.
pub fn build_adjacency(nodes: usize, density: f64, sigma: f64, seed: u64) -> Result<Adjacency> {
    if nodes == 0 {
        return Err(Error::param("nodes", "must be at least 1"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::param("density", "must lie in (0, 1]"));
    }
    if !(sigma > 0.0) {
        return Err(Error::param("spectral_radius", "must be positive"));
    }
    let total = nodes * nodes;
    let count = (libm::round(density * total as f64) as usize).min(total);
    let mut rng = rng_from_seed(seed);
    let positions = rand::seq::index::sample(&mut rng, total, count);
    let values = uniform_symmetric(&mut rng, count);
    let mut a = DMatrix::zeros(nodes, nodes);
    // Positions index the matrix row-major.
    for (pos, v) in positions.iter().zip(values) {
        a[(pos / nodes, pos % nodes)] = v;
    }
    a.fill_diagonal(0.0);

    if is_structurally_nilpotent(&a) {
        return Err(Error::DegenerateMatrix { radius: 0.0 });
    }
    let raw = spectral_radius(&a)?;
    if raw < DEGENERATE_RADIUS {
        return Err(Error::DegenerateMatrix { radius: raw });
    }
    a *= sigma / raw;
    Adjacency::from_matrix(a)
}

/// Input coupling vector with U(-1, 1) entries.
pub fn build_input_weights(nodes: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let dist = Uniform::new_inclusive(-1.0_f64, 1.0).expect("valid bounds");
    (0..nodes).map(|_| dist.sample(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_is_degenerate() {
        assert!(matches!(build_adjacency(1, 0.5, 1.0, 0), Err(Error::DegenerateMatrix { .. })));
    }

    #[test]
    fn entry_count_and_zero_diagonal() {
        let a = build_adjacency(40, 0.5, 0.9, 11).unwrap();
        let m = a.matrix();
        assert!((0..40).all(|i| m[(i, i)] == 0.0));
        let nz = m.iter().filter(|v| **v != 0.0).count();
        // 800 positions drawn, minus those that landed on the diagonal.
        assert!((760..=800).contains(&nz), "nonzeros {nz}");
        assert!((a.spectral_radius() - 0.9).abs() < 1e-10);
    }

    #[test]
    fn rescaling_is_linear() {
        let one = build_adjacency(30, 0.5, 1.0, 5).unwrap();
        let small = build_adjacency(30, 0.5, 0.3, 5).unwrap();
        let scaled = one.matrix() * 0.3;
        for (x, y) in scaled.iter().zip(small.matrix().iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(build_adjacency(0, 0.5, 1.0, 0).is_err());
        assert!(build_adjacency(5, 0.0, 1.0, 0).is_err());
        assert!(build_adjacency(5, 0.5, -1.0, 0).is_err());
    }
}
