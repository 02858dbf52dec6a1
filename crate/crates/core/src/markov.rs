//! Dephasing noise driven by a stationary two-state Markov chain.
//!
//! Each use applies either the identity or sigma_z. The first use draws from
//! the marginals `(p0, pz)`; each later use repeats the previous operator
//! with probability `mu` and otherwise draws afresh from the marginals:
//!
//! ```text
//! p(i_k | i_{k-1}) = (1 - mu) p(i_k) + mu delta(i_k, i_{k-1})
//! ```
//!
//! The maximally mixed input is optimal for this channel, and its entropy
//! exchange is the Shannon entropy of the chain, which gives closed forms
//! for `Q_N` and the capacity.

use crate::channel::DephasingKrausFamily;
use crate::entropy::{binary_entropy, check_qubits, kolmogorov_distance, ProbVector};
use crate::error::{Error, Result};

/// Longest chain enumerated exhaustively.
pub const MAX_ENUMERATED_USES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovParams {
    p_z: f64,
    mu: f64,
    n: usize,
}

/// `q_0` and `q_z`: probability that the next use repeats the previous
/// identity or sigma_z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalProbs {
    pub q_0: f64,
    pub q_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliSymbol {
    Identity,
    Z,
}

impl MarkovParams {
    pub fn new(p_z: f64, mu: f64, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_z) {
            return Err(Error::Domain(format!("p_z = {p_z} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("mu = {mu} outside [0, 1]")));
        }
        if n == 0 {
            return Err(Error::Domain("number of uses must be positive".into()));
        }
        Ok(Self { p_z, mu, n })
    }

    /// Parameterized by the identity probability `p0 = 1 - p_z`.
    pub fn from_p0(p0: f64, mu: f64, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::Domain(format!("p0 = {p0} outside [0, 1]")));
        }
        Self::new(1.0 - p0, mu, n)
    }

    pub fn p_z(&self) -> f64 {
        self.p_z
    }

    pub fn p0(&self) -> f64 {
        1.0 - self.p_z
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.p_z, self.mu, n)
    }

    pub fn conditional(&self) -> ConditionalProbs {
        ConditionalProbs {
            q_0: (1.0 - self.mu) * self.p0() + self.mu,
            q_z: (1.0 - self.mu) * self.p_z + self.mu,
        }
    }

    /// Entropy rate `p0 H(q0) + pz H(qz)` of the chain, bits per use.
    pub fn entropy_rate(&self) -> f64 {
        let ConditionalProbs { q_0, q_z } = self.conditional();
        self.p0() * h2(q_0) + self.p_z * h2(q_z)
    }

    fn marginal(&self, z: bool) -> f64 {
        if z {
            self.p_z
        } else {
            self.p0()
        }
    }

    fn transition(&self, from_z: bool, to_z: bool) -> f64 {
        let repeat = if from_z == to_z { self.mu } else { 0.0 };
        (1.0 - self.mu) * self.marginal(to_z) + repeat
    }

    /// Probability of the string whose bit `k` marks sigma_z at use `k + 1`.
    fn mask_probability(&self, mask: u64, len: usize) -> f64 {
        let mut prev = mask & 1 == 1;
        let mut p = self.marginal(prev);
        for k in 1..len {
            let cur = (mask >> k) & 1 == 1;
            p *= self.transition(prev, cur);
            prev = cur;
        }
        p
    }

    /// Probability of the ordered Pauli string.
    pub fn joint_probability(&self, string: &[PauliSymbol]) -> Result<f64> {
        if string.len() != self.n {
            return Err(Error::DimensionMismatch {
                left: string.len(),
                right: self.n,
            });
        }
        let mut symbols = string.iter().map(|s| *s == PauliSymbol::Z);
        let first = symbols.next().expect("n >= 1");
        let mut p = self.marginal(first);
        let mut prev = first;
        for cur in symbols {
            p *= self.transition(prev, cur);
            prev = cur;
        }
        Ok(p)
    }

    /// Joint distribution over all `2^n` strings, indexed by sigma_z bit mask.
    pub fn joint_distribution(&self) -> Result<ProbVector> {
        chain_distribution(self, self.n)
    }
}

fn chain_distribution(params: &MarkovParams, len: usize) -> Result<ProbVector> {
    if len > MAX_ENUMERATED_USES {
        return Err(Error::SizeCap {
            what: "enumerated chain length",
            value: len,
            max: MAX_ENUMERATED_USES,
        });
    }
    let probs = (0..1u64 << len)
        .map(|mask| params.mask_probability(mask, len))
        .collect();
    ProbVector::new(probs)
}

#[inline]
fn h2(q: f64) -> f64 {
    binary_entropy(q.clamp(0.0, 1.0)).expect("argument clamped to [0, 1]")
}

/// Kraus family `sqrt(p_{i_1..i_N}) sigma_{i_1} x ... x sigma_{i_N}`.
pub fn markov_kraus_family(params: &MarkovParams) -> Result<DephasingKrausFamily> {
    check_qubits(params.n())?;
    DephasingKrausFamily::pauli_z(params.n(), params.joint_distribution()?)
}

/// `(S_e)_N = (N - 1)[p0 H(q0) + pz H(qz)] + H(p0)` for the maximally mixed input.
pub fn entropy_exchange_closed(params: &MarkovParams) -> f64 {
    (params.n() - 1) as f64 * params.entropy_rate() + h2(params.p0())
}

/// `Q_N = N - (S_e)_N`, the maximal coherent information over `N` uses.
pub fn q_n(params: &MarkovParams) -> f64 {
    params.n() as f64 - entropy_exchange_closed(params)
}

/// `Q = 1 - p0 H(q0) - pz H(qz)`, bits per use.
pub fn capacity(params: &MarkovParams) -> f64 {
    1.0 - params.entropy_rate()
}

/// `eps_N = Q - Q_N / N`.
pub fn epsilon_n(params: &MarkovParams) -> f64 {
    // Algebraically (H(p0) - entropy rate) / N; evaluated that way to avoid
    // cancellation between Q and Q_N / N.
    ((h2(params.p0()) - params.entropy_rate()) / params.n() as f64).max(0.0)
}

/// Distance between the exact two-block noise distribution and its
/// factorized approximation, with the bound `2 mu^(L+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForgetfulnessReport {
    pub distance: f64,
    pub bound: f64,
}

impl ForgetfulnessReport {
    pub fn satisfied(&self) -> bool {
        self.distance <= self.bound
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.distance
    }
}

/// Two blocks of `params.n()` uses separated by `idle` uses.
///
/// The exact joint over all `2N + L` uses is enumerated and the idle indices
/// are summed out; the result is compared against the product of two
/// independent `N`-use blocks.
pub fn forgetfulness_check(params: &MarkovParams, idle: usize) -> Result<ForgetfulnessReport> {
    let n = params.n();
    let total = 2 * n + idle;
    if total > MAX_ENUMERATED_USES {
        return Err(Error::SizeCap {
            what: "2N + L",
            value: total,
            max: MAX_ENUMERATED_USES,
        });
    }
    let block_mask = (1u64 << n) - 1;
    let second_shift = n + idle;
    let mut exact = vec![0.0; 1 << (2 * n)];
    for mask in 0..1u64 << total {
        let first = mask & block_mask;
        let second = (mask >> second_shift) & block_mask;
        exact[(first | (second << n)) as usize] += params.mask_probability(mask, total);
    }
    let block = chain_distribution(params, n)?;
    let block = block.entries();
    let factorized: Vec<f64> = (0..1usize << (2 * n))
        .map(|i| block[i & block_mask as usize] * block[i >> n])
        .collect();
    let distance = kolmogorov_distance(&ProbVector::new(exact)?, &ProbVector::new(factorized)?)?;
    Ok(ForgetfulnessReport {
        distance,
        bound: 2.0 * params.mu().powi(idle as i32 + 1),
    })
}
