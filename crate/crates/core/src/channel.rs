//! Generic N-qubit dephasing channels.
//!
//! A dephasing channel has Kraus operators diagonal in the computational
//! basis, `A_a = diag(A_a(0), ..., A_a(2^N - 1))`. Its action is fully
//! described by the decoherence table
//!
//! ```text
//! D(j, l) = sum_a A_a(j) conj(A_a(l)) = <phi_l | phi_j>,
//! ```
//!
//! with `rho'_{jl} = D(j, l) rho_{jl}`. The environment ends up in
//! `w = sum_j rho_jj |phi_j><phi_j|`, which depends on the populations only.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::entropy::{
    check_qubits, hermitian_eigenvalues, shannon_entropy, spectral_entropy, von_neumann_entropy,
    DensityMatrix, ProbVector, SymmetricMatrix,
};
use crate::error::{Error, Result};

/// Full (non-diagonal) density matrices are only handled up to this size.
pub const GENERAL_STATE_MAX_QUBITS: usize = 4;

const COMPLETENESS_TOL: f64 = 1e-12;

/// A state diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    n_qubits: usize,
    populations: ProbVector,
}

impl DiagonalState {
    pub fn new(n_qubits: usize, populations: ProbVector) -> Result<Self> {
        check_qubits(n_qubits)?;
        if populations.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                left: populations.len(),
                right: 1 << n_qubits,
            });
        }
        Ok(Self {
            n_qubits,
            populations,
        })
    }

    /// The maximally mixed state `I / 2^N`.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Self::new(n_qubits, ProbVector::uniform(1 << n_qubits)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn populations(&self) -> &ProbVector {
        &self.populations
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_populations(&self.populations)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// One diagonal vector per Kraus operator.
    Kraus(Vec<Vec<Complex64>>),
    /// `A_a = sqrt(w_a) Z^a`, where bit `k` of `a` places sigma_z on qubit `k+1`.
    PauliZ(Vec<f64>),
    /// Pairwise decoherence factors.
    Table(DMatrix<Complex64>),
}

/// A dephasing channel on `n_qubits` qubits, stored either through its
/// Kraus operators or through its decoherence table.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingKrausFamily {
    n_qubits: usize,
    repr: Repr,
}

impl DephasingKrausFamily {
    /// Explicit diagonal Kraus operators. Each inner vector has `2^N` entries.
    pub fn from_kraus(n_qubits: usize, factors: Vec<Vec<Complex64>>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if factors.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: f.len(),
                right: dim,
            });
        }
        for j in 0..dim {
            let norm: f64 = factors.iter().map(|f| f[j].norm_sqr()).sum();
            if (norm - 1.0).abs() > COMPLETENESS_TOL {
                return Err(Error::InvalidChannel(format!(
                    "completeness fails at configuration {j}: sum |A(j)|^2 = {norm}"
                )));
            }
        }
        Ok(Self {
            n_qubits,
            repr: Repr::Kraus(factors),
        })
    }

    /// Weighted sigma_z strings; `weights` is indexed by the string's bit mask.
    pub fn pauli_z(n_qubits: usize, weights: ProbVector) -> Result<Self> {
        check_qubits(n_qubits)?;
        if weights.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                left: weights.len(),
                right: 1 << n_qubits,
            });
        }
        Ok(Self {
            n_qubits,
            repr: Repr::PauliZ(weights.into_inner()),
        })
    }

    /// A decoherence table `D(j, l)`. Must be Hermitian with unit diagonal
    /// and entries of modulus at most one.
    pub fn from_table(n_qubits: usize, table: DMatrix<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if table.nrows() != dim || table.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: table.nrows(),
                right: dim,
            });
        }
        for j in 0..dim {
            if (table[(j, j)] - Complex64::new(1.0, 0.0)).norm() > COMPLETENESS_TOL {
                return Err(Error::InvalidChannel(format!(
                    "D({j},{j}) = {} is not 1",
                    table[(j, j)]
                )));
            }
            for l in 0..j {
                let d = table[(j, l)];
                if d.norm() > 1.0 + COMPLETENESS_TOL {
                    return Err(Error::InvalidChannel(format!("|D({j},{l})| > 1")));
                }
                if (d - table[(l, j)].conj()).norm() > COMPLETENESS_TOL {
                    return Err(Error::InvalidChannel(format!(
                        "D({j},{l}) is not the conjugate of D({l},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            n_qubits,
            repr: Repr::Table(table),
        })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Self::from_kraus(n_qubits, vec![vec![Complex64::new(1.0, 0.0); 1 << n_qubits]])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Number of Kraus operators, if the family is stored through them.
    pub fn kraus_count(&self) -> Option<usize> {
        match &self.repr {
            Repr::Kraus(f) => Some(f.len()),
            Repr::PauliZ(w) => Some(w.len()),
            Repr::Table(_) => None,
        }
    }

    /// `A_a(j)`, the `j`-th diagonal entry of Kraus operator `a`.
    pub fn kraus_entry(&self, alpha: usize, j: usize) -> Option<Complex64> {
        match &self.repr {
            Repr::Kraus(f) => f.get(alpha).and_then(|v| v.get(j).copied()),
            Repr::PauliZ(w) => w
                .get(alpha)
                .map(|&wa| Complex64::new(wa.sqrt() * parity_sign(alpha & j), 0.0)),
            Repr::Table(_) => None,
        }
    }

    /// `D(j, l)`.
    pub fn decoherence(&self, j: usize, l: usize) -> Complex64 {
        match &self.repr {
            Repr::Kraus(f) => f.iter().map(|a| a[j] * a[l].conj()).sum(),
            Repr::PauliZ(w) => {
                let flips = j ^ l;
                Complex64::new(
                    w.iter()
                        .enumerate()
                        .map(|(a, wa)| wa * parity_sign(a & flips))
                        .sum(),
                    0.0,
                )
            }
            Repr::Table(t) => t[(j, l)],
        }
    }

    pub fn decoherence_table(&self) -> DMatrix<Complex64> {
        match &self.repr {
            Repr::Table(t) => t.clone(),
            _ => {
                let dim = self.dim();
                let mut table = DMatrix::from_element(dim, dim, Complex64::new(1.0, 0.0));
                for j in 0..dim {
                    for l in 0..j {
                        let d = self.decoherence(j, l);
                        table[(j, l)] = d;
                        table[(l, j)] = d.conj();
                    }
                }
                table
            }
        }
    }

    /// The same channel stored as its decoherence table.
    pub fn to_table(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            repr: Repr::Table(self.decoherence_table()),
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: dim,
            });
        }
        Ok(())
    }
}

/// Output of [`coherent_information`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub rho_out: DensityMatrix,
    /// Entropy exchange `S_e`, bits.
    pub entropy_exchange: f64,
    /// `S(rho_out) - S_e`, bits.
    pub coherent_information: f64,
}

/// `rho' = sum_a A_a rho A_a^dagger`, computed as `rho'_{jl} = D(j,l) rho_{jl}`.
pub fn apply_channel(k: &DephasingKrausFamily, rho: &DensityMatrix) -> Result<DensityMatrix> {
    k.check_dim(rho.dim())?;
    check_general_state(rho)?;
    let table = k.decoherence_table();
    let out = rho.matrix().component_mul(&table);
    Ok(DensityMatrix::from_matrix_unchecked(rho.n_qubits(), out))
}

/// Entropy exchange `S(W)`, `W_{ab} = Tr(A_a rho A_b^dagger)`.
///
/// Families stored through Kraus operators use the `W` matrix; tables use
/// the Gram matrix of the environment states. Both give the spectrum of
/// `w = sum_j rho_jj |phi_j><phi_j|`.
pub fn conjugate_channel_entropy(k: &DephasingKrausFamily, rho: &DensityMatrix) -> Result<f64> {
    k.check_dim(rho.dim())?;
    let populations = rho.populations();
    match k.repr {
        Repr::Table(_) => entropy_exchange_via_gram(k, &populations),
        _ => entropy_exchange_via_kraus(k, &populations),
    }
}

/// Entropy exchange for a diagonal input.
pub fn conjugate_channel_entropy_diagonal(
    k: &DephasingKrausFamily,
    state: &DiagonalState,
) -> Result<f64> {
    k.check_dim(1 << state.n_qubits())?;
    let populations = state.populations().entries();
    match k.repr {
        Repr::Table(_) => entropy_exchange_via_gram(k, populations),
        _ => entropy_exchange_via_kraus(k, populations),
    }
}

/// `S(W)` with `W_{ab} = sum_j A_a(j) q_j conj(A_b(j))`.
pub fn entropy_exchange_via_kraus(k: &DephasingKrausFamily, populations: &[f64]) -> Result<f64> {
    k.check_dim(populations.len())?;
    let dim = populations.len();
    let sqrt_q: Vec<f64> = populations.iter().map(|q| q.max(0.0).sqrt()).collect();
    match &k.repr {
        Repr::PauliZ(weights) => {
            let kraus = weights.len();
            let b = DMatrix::from_fn(kraus, dim, |a, j| {
                weights[a].sqrt() * parity_sign(a & j) * sqrt_q[j]
            });
            let w = &b * b.transpose();
            von_neumann_entropy(&SymmetricMatrix::from_matrix_unchecked(w))
        }
        Repr::Kraus(factors) => {
            let b = DMatrix::from_fn(factors.len(), dim, |a, j| factors[a][j] * sqrt_q[j]);
            let w = &b * b.adjoint();
            spectral_entropy(&hermitian_eigenvalues(&w)?)
        }
        Repr::Table(_) => Err(Error::InvalidChannel(
            "family is stored as a decoherence table; no Kraus operators available".into(),
        )),
    }
}

/// Spectrum of the Gram matrix `M_{jl} = sqrt(q_j q_l) D(l, j)`.
pub fn entropy_exchange_via_gram(k: &DephasingKrausFamily, populations: &[f64]) -> Result<f64> {
    k.check_dim(populations.len())?;
    let sqrt_q: Vec<f64> = populations.iter().map(|q| q.max(0.0).sqrt()).collect();
    let table = k.decoherence_table();
    let dim = populations.len();
    let gram = DMatrix::from_fn(dim, dim, |j, l| table[(l, j)] * (sqrt_q[j] * sqrt_q[l]));
    if gram.iter().all(|z| z.im == 0.0) {
        let real = gram.map(|z| z.re);
        von_neumann_entropy(&SymmetricMatrix::from_matrix_unchecked(real))
    } else {
        spectral_entropy(&hermitian_eigenvalues(&gram)?)
    }
}

/// `I_c = S(E(rho)) - S_e(rho)`.
pub fn coherent_information(k: &DephasingKrausFamily, rho: &DensityMatrix) -> Result<ChannelOutput> {
    let rho_out = apply_channel(k, rho)?;
    let output_entropy = von_neumann_entropy(&rho_out)?;
    let entropy_exchange = conjugate_channel_entropy(k, rho)?;
    Ok(ChannelOutput {
        rho_out,
        entropy_exchange,
        coherent_information: output_entropy - entropy_exchange,
    })
}

/// Coherent information of a diagonal input. Diagonal states pass the
/// channel unchanged, so the output entropy is the Shannon entropy of the
/// populations.
pub fn coherent_information_diagonal(k: &DephasingKrausFamily, state: &DiagonalState) -> Result<f64> {
    let exchange = conjugate_channel_entropy_diagonal(k, state)?;
    Ok(shannon_entropy(state.populations()) - exchange)
}

/// `(rho + Z_k rho Z_k) / 2`, qubit index `k` counted from 1.
pub fn z_twirl_step(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    let mask = qubit_mask(rho.n_qubits(), k)?;
    let out = DMatrix::from_fn(rho.dim(), rho.dim(), |j, l| {
        if (j ^ l) & mask == 0 {
            rho.matrix()[(j, l)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(DensityMatrix::from_matrix_unchecked(rho.n_qubits(), out))
}

/// `(rho + X_k rho X_k) / 2`, qubit index `k` counted from 1.
pub fn x_twirl_step(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    let mask = qubit_mask(rho.n_qubits(), k)?;
    let m = rho.matrix();
    let out = DMatrix::from_fn(rho.dim(), rho.dim(), |j, l| {
        (m[(j, l)] + m[(j ^ mask, l ^ mask)]) * 0.5
    });
    Ok(DensityMatrix::from_matrix_unchecked(rho.n_qubits(), out))
}

/// `rho_0 = rho, rho_k = z_twirl_step(rho_{k-1}, k)` for `k = 1..=N`.
pub fn z_twirl_sweep(rho: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
    twirl_sweep(rho, z_twirl_step)
}

/// Same as [`z_twirl_sweep`] with `X_k`.
pub fn x_twirl_sweep(rho: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
    twirl_sweep(rho, x_twirl_step)
}

fn twirl_sweep(
    rho: &DensityMatrix,
    step: fn(&DensityMatrix, usize) -> Result<DensityMatrix>,
) -> Result<Vec<DensityMatrix>> {
    let mut states = vec![rho.clone()];
    for k in 1..=rho.n_qubits() {
        let next = step(states.last().expect("non-empty"), k)?;
        states.push(next);
    }
    Ok(states)
}

/// `Z_k rho Z_k`, conjugation by sigma_z on qubit `k` (from 1).
pub fn conjugate_by_z(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    let mask = qubit_mask(rho.n_qubits(), k)?;
    let m = rho.matrix();
    let out = DMatrix::from_fn(rho.dim(), rho.dim(), |j, l| {
        m[(j, l)] * parity_sign((j ^ l) & mask)
    });
    Ok(DensityMatrix::from_matrix_unchecked(rho.n_qubits(), out))
}

fn qubit_mask(n_qubits: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n_qubits {
        return Err(Error::QubitIndex { index: k, n_qubits });
    }
    Ok(1 << (k - 1))
}

fn check_general_state(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() > GENERAL_STATE_MAX_QUBITS {
        return Err(Error::SizeCap {
            what: "qubits for a general density matrix",
            value: rho.n_qubits(),
            max: GENERAL_STATE_MAX_QUBITS,
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}
