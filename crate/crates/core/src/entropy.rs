//! Entropies, distances and the small linear-algebra layer shared by the
//! channel models.
//!
//! All entropies are in bits. Eigenvalues that come out slightly negative
//! (down to [`TOL_CLIP`]) are treated as round-off and clipped to zero before
//! taking logarithms; anything further below zero is reported as a
//! [`Error::PsdViolation`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues above `-TOL_CLIP` are clipped to zero.
pub const TOL_CLIP: f64 = 1e-10;

/// Largest register size handled by the dense routines.
pub const N_MAX: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PROB_SUM_TOL: f64 = 1e-9;
const OPERATOR_TRACE_TOL: f64 = 1e-9;
const EIGEN_CHECK_TOL: f64 = 1e-9;

/// A probability vector: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validates, clips entries in `[-TOL_CLIP, 0)` to zero and renormalizes.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if let Some(bad) = entries.iter().find(|p| !p.is_finite() || **p < -TOL_CLIP) {
            return Err(Error::Domain(format!("invalid probability entry {bad}")));
        }
        let clipped: Vec<f64> = entries.into_iter().map(|p| p.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self(clipped.into_iter().map(|p| p / sum).collect()))
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Domain("empty probability vector".into()));
        }
        Ok(Self(vec![1.0 / len as f64; len]))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A density matrix on `n_qubits` qubits.
///
/// Basis configuration `j` is the integer whose bit `k` (least significant
/// first) holds the state of qubit `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity (down to `-TOL_CLIP`).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.nrows(), matrix.ncols())?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian(deviation));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(trace.re));
        }
        let matrix = hermitize(matrix);
        let min = hermitian_eigenvalues(&matrix)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -TOL_CLIP {
            return Err(Error::PsdViolation(min));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Builds the matrix without validation. Callers guarantee the result of
    /// a trace-preserving, positivity-preserving map.
    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: DMatrix<Complex64>) -> Self {
        Self { n_qubits, matrix }
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(populations: &ProbVector) -> Result<Self> {
        let dim = populations.len();
        let n_qubits = qubits_for_dim(dim, dim)?;
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(populations.entries()[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self { n_qubits, matrix })
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Domain("state vector has zero norm".into()));
        }
        let dim = amplitudes.len();
        let n_qubits = qubits_for_dim(dim, dim)?;
        let matrix =
            DMatrix::from_fn(dim, dim, |i, j| amplitudes[i] * amplitudes[j].conj() / norm);
        Ok(Self { n_qubits, matrix })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Self::from_populations(&ProbVector::uniform(1 << n_qubits)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// The diagonal part of the matrix.
    pub fn diagonal_part(&self) -> Self {
        let dim = self.dim();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                self.matrix[(i, i)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_matrix_unchecked(self.n_qubits, matrix)
    }

    /// Largest off-diagonal modulus.
    pub fn max_coherence(&self) -> f64 {
        let dim = self.dim();
        let mut max = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    max = max.max(self.matrix[(i, j)].norm());
                }
            }
        }
        max
    }
}

/// A real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::Domain("empty matrix".into()));
        }
        let n = matrix.nrows();
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self(matrix)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// Operators whose von Neumann entropy can be taken: unit trace, Hermitian.
pub trait HermitianOperator {
    fn spectrum(&self) -> Result<Vec<f64>>;
    fn trace(&self) -> f64;
}

impl HermitianOperator for DensityMatrix {
    fn spectrum(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

impl HermitianOperator for SymmetricMatrix {
    fn spectrum(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(self)
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// `H(q) = -q log2 q - (1-q) log2 (1-q)`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("binary entropy argument {q} outside [0, 1]")));
    }
    Ok(plogp(q) + plogp(1.0 - q))
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    p.entries().iter().map(|&x| plogp(x)).sum()
}

/// `-Tr[m log2 m]`.
pub fn von_neumann_entropy<M: HermitianOperator>(m: &M) -> Result<f64> {
    let trace = m.trace();
    if (trace - 1.0).abs() > OPERATOR_TRACE_TOL {
        return Err(Error::InvalidTrace(trace));
    }
    spectral_entropy(&m.spectrum()?)
}

/// Entropy of a spectrum with the clipping and renormalization rules applied.
pub fn spectral_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut clipped = Vec::with_capacity(eigenvalues.len());
    for &lambda in eigenvalues {
        if lambda < -TOL_CLIP {
            return Err(Error::PsdViolation(lambda));
        }
        clipped.push(lambda.max(0.0));
    }
    let sum: f64 = clipped.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidTrace(sum));
    }
    if (sum - 1.0).abs() > TRACE_TOL {
        clipped.iter_mut().for_each(|x| *x /= sum);
    }
    Ok(clipped.iter().map(|&x| plogp(x)).sum())
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    let eigenvalues = hermitian_eigenvalues(&diff)?;
    Ok(0.5 * eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Half the l1 distance between two distributions.
pub fn kolmogorov_distance(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(0.5
        * p.entries()
            .iter()
            .zip(q.entries())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// All eigenvalues of a real symmetric matrix.
///
/// The result is checked against the trace and the Frobenius norm
/// (`sum l = tr M`, `sum l^2 = |M|_F^2`) before being returned.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    check_eigen_dim(m.dim())?;
    let matrix = m.matrix();
    if is_diagonal(matrix) {
        return Ok(matrix.diagonal().iter().copied().collect());
    }
    let eigenvalues: Vec<f64> = matrix.symmetric_eigenvalues().iter().copied().collect();
    check_spectrum(&eigenvalues, matrix.trace(), matrix.norm_squared())?;
    Ok(eigenvalues)
}

/// Eigenvalues with eigenvectors (as columns), residual-checked:
/// `|M v - l v| <= 1e-9 |M|` for every pair.
pub fn symmetric_eigen(m: &SymmetricMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_eigen_dim(m.dim())?;
    let matrix = m.matrix();
    let max_iterations = 1000 * m.dim().max(10);
    let eigen = nalgebra::SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, max_iterations)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let scale = matrix.norm().max(f64::MIN_POSITIVE);
    for (k, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let v = eigen.eigenvectors.column(k);
        let residual = (matrix * v - v * lambda).norm();
        if residual > EIGEN_CHECK_TOL * scale {
            return Err(Error::Numerical(format!(
                "eigenpair {k} residual {residual:e} exceeds tolerance"
            )));
        }
    }
    Ok((eigen.eigenvalues.iter().copied().collect(), eigen.eigenvectors))
}

/// Eigenvalues of a complex Hermitian matrix. Only the lower triangle is read.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_eigen_dim(m.nrows())?;
    let eigenvalues: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    let trace = m.trace().re;
    let frobenius = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    check_spectrum(&eigenvalues, trace, frobenius)?;
    Ok(eigenvalues)
}

fn check_spectrum(eigenvalues: &[f64], trace: f64, frobenius_sq: f64) -> Result<()> {
    let scale = frobenius_sq.sqrt().max(1.0);
    let sum: f64 = eigenvalues.iter().sum();
    let sum_sq: f64 = eigenvalues.iter().map(|l| l * l).sum();
    if !sum.is_finite()
        || (sum - trace).abs() > EIGEN_CHECK_TOL * scale
        || (sum_sq - frobenius_sq).abs() > EIGEN_CHECK_TOL * scale * scale
    {
        return Err(Error::Numerical(format!(
            "eigenvalue check failed: sum {sum} vs trace {trace}, \
             sum of squares {sum_sq} vs {frobenius_sq}"
        )));
    }
    Ok(())
}

fn check_eigen_dim(dim: usize) -> Result<()> {
    let max = 1usize << N_MAX;
    if dim > max {
        return Err(Error::SizeCap {
            what: "matrix dimension",
            value: dim,
            max,
        });
    }
    if dim == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    Ok(())
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == 0.0))
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut deviation = 0.0f64;
    for i in 0..n {
        for j in i..n {
            deviation = deviation.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    deviation
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adjoint = m.adjoint();
    (m + adjoint).scale(0.5)
}

pub(crate) fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::Domain("register needs at least one qubit".into()));
    }
    if n_qubits > N_MAX {
        return Err(Error::SizeCap {
            what: "qubits",
            value: n_qubits,
            max: N_MAX,
        });
    }
    Ok(())
}

fn qubits_for_dim(rows: usize, cols: usize) -> Result<usize> {
    if rows != cols {
        return Err(Error::DimensionMismatch {
            left: rows,
            right: cols,
        });
    }
    if rows < 2 || !rows.is_power_of_two() {
        return Err(Error::Domain(format!(
            "dimension {rows} is not a power of two >= 2"
        )));
    }
    let n = rows.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

#[inline]
fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // 0.85 log2(1/0.85) + 0.15 log2(1/0.15), summed term by term in
        // extended form: 0.199295... + 0.410545...
        assert_abs_diff_eq!(binary_entropy(0.85).unwrap(), 0.60984, epsilon = 1e-5);
        assert!(matches!(binary_entropy(1.2), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn shannon_entropy_examples() {
        let pure = ProbVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(shannon_entropy(&pure), 0.0);
        for n in 1..6 {
            let u = ProbVector::uniform(1 << n).unwrap();
            assert_abs_diff_eq!(shannon_entropy(&u), n as f64, epsilon = 1e-12);
        }
        // Two-step stationary chain: H(X1, X2) = H(p0) + p0 H(q0) + pz H(qz).
        let (p0, pz, mu) = (0.85, 0.15, 0.5);
        let (q0, qz) = ((1.0 - mu) * p0 + mu, (1.0 - mu) * pz + mu);
        let joint = ProbVector::new(vec![p0 * q0, p0 * (1.0 - q0), pz * (1.0 - qz), pz * qz])
            .unwrap();
        let chain_rule = binary_entropy(p0).unwrap()
            + p0 * binary_entropy(q0).unwrap()
            + pz * binary_entropy(qz).unwrap();
        assert_abs_diff_eq!(shannon_entropy(&joint), chain_rule, epsilon = 1e-12);
        assert_abs_diff_eq!(joint.entries()[1], 0.85 * 0.075, epsilon = 1e-15);
    }

    #[test]
    fn prob_vector_rejects_bad_input() {
        assert!(ProbVector::new(vec![]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.0 + 1e-11, -1e-11]).is_ok());
        assert!(ProbVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn von_neumann_examples() {
        for n in 1..4 {
            let rho = DensityMatrix::maximally_mixed(n).unwrap();
            assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), n as f64, epsilon = 1e-12);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pure = DensityMatrix::pure(&[c(s), c(0.0), c(0.0), c(s)]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&pure).unwrap(), 0.0, epsilon = 1e-12);

        let g = 0.69220;
        let m = SymmetricMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[0.5, 0.5 * g, 0.5 * g, 0.5],
        ))
        .unwrap();
        let expected = binary_entropy((1.0 + g) / 2.0).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&m).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.61951, epsilon = 1e-4);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        assert!(matches!(
            spectral_entropy(&[1.1, -0.1]),
            Err(Error::PsdViolation(_))
        ));
        assert_abs_diff_eq!(spectral_entropy(&[1.0, -1e-11]).unwrap(), 0.0);
        let m = SymmetricMatrix::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.8, 0.8, 0.5]))
            .unwrap();
        assert!(matches!(von_neumann_entropy(&m), Err(Error::PsdViolation(_))));
        let m = SymmetricMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(von_neumann_entropy(&m), Err(Error::InvalidTrace(_))));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = DMatrix::from_diagonal_element(2, 2, c(1.0));
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace(_))));
        let mut non_herm = DMatrix::from_diagonal_element(2, 2, c(0.5));
        non_herm[(0, 1)] = c(0.1);
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::NotHermitian(_))));
        let mut not_psd = DMatrix::from_diagonal_element(2, 2, c(0.5));
        not_psd[(0, 1)] = c(0.9);
        not_psd[(1, 0)] = c(0.9);
        assert!(matches!(DensityMatrix::new(not_psd), Err(Error::PsdViolation(_))));
        let three = DMatrix::from_diagonal_element(3, 3, c(1.0 / 3.0));
        assert!(matches!(DensityMatrix::new(three), Err(Error::Domain(_))));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let one = DensityMatrix::pure(&[c(0.0), c(1.0)]).unwrap();
        assert_abs_diff_eq!(trace_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&zero, &zero).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(
            trace_distance(&zero, &mixed),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kolmogorov_examples() {
        let a = ProbVector::new(vec![1.0, 0.0]).unwrap();
        let b = ProbVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(kolmogorov_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(kolmogorov_distance(&a, &a).unwrap(), 0.0);
        let c3 = ProbVector::uniform(3).unwrap();
        assert!(kolmogorov_distance(&a, &c3).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let id = SymmetricMatrix::new(DMatrix::identity(4, 4)).unwrap();
        assert_eq!(symmetric_eigenvalues(&id).unwrap(), vec![1.0; 4]);

        let diag = SymmetricMatrix::new(DMatrix::from_diagonal(&nalgebra::dvector![0.3, -2.0]))
            .unwrap();
        assert_eq!(symmetric_eigenvalues(&diag).unwrap(), vec![0.3, -2.0]);

        let g = 0.4;
        let m = SymmetricMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[0.5, 0.5 * g, 0.5 * g, 0.5],
        ))
        .unwrap();
        let mut eig = symmetric_eigenvalues(&m).unwrap();
        eig.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(eig[0], (1.0 - g) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig[1], (1.0 + g) / 2.0, epsilon = 1e-14);

        let (values, vectors) = symmetric_eigen(&m).unwrap();
        assert_eq!(values.len(), 2);
        assert_eq!(vectors.ncols(), 2);
    }

    #[test]
    fn eigen_dimension_cap() {
        let big = SymmetricMatrix::from_matrix_unchecked(DMatrix::zeros(1 << 13, 1));
        assert!(matches!(
            symmetric_eigenvalues(&big),
            Err(Error::SizeCap { .. })
        ));
    }
}
