//! Random states and channels for property checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{DephasingKrausFamily, DiagonalState};
use crate::entropy::{DensityMatrix, ProbVector};
use crate::error::Result;

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Full-rank mixed state `G G^dagger / Tr` from a Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = 1 << n_qubits;
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    let m = m.unscale(trace);
    DensityMatrix::new((&m + m.adjoint()).scale(0.5))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<DensityMatrix> {
    let amplitudes: Vec<Complex64> = (0..1 << n_qubits).map(|_| complex_normal(rng)).collect();
    DensityMatrix::pure(&amplitudes)
}

/// Random populations, uniform on the simplex.
pub fn random_probabilities<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<ProbVector> {
    let raw: Vec<f64> = (0..len)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    ProbVector::new(raw.into_iter().map(|x| x / sum).collect())
}

pub fn random_diagonal_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<DiagonalState> {
    DiagonalState::new(n_qubits, random_probabilities(1 << n_qubits, rng)?)
}

/// `kraus_count` random diagonal Kraus operators, normalized per configuration.
pub fn random_kraus_family<R: Rng + ?Sized>(
    n_qubits: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<DephasingKrausFamily> {
    let dim = 1 << n_qubits;
    let mut factors: Vec<Vec<Complex64>> = (0..kraus_count)
        .map(|_| (0..dim).map(|_| complex_normal(rng)).collect())
        .collect();
    for j in 0..dim {
        let norm: f64 = factors.iter().map(|f| f[j].norm_sqr()).sum::<f64>().sqrt();
        for f in factors.iter_mut() {
            f[j] /= norm;
        }
    }
    DephasingKrausFamily::from_kraus(n_qubits, factors)
}
