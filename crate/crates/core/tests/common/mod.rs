//! Reference computations written directly from the definitions. They share
//! no code path with the library apart from the eigensolver backend.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub fn h2(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

pub fn entropy_of(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Probability of the sigma_z pattern `bits` (bit k set: Z at use k + 1),
/// multiplied out step by step along the chain.
pub fn chain_probability(p0: f64, mu: f64, bits: u64, n: usize) -> f64 {
    let marginal = |z: bool| if z { 1.0 - p0 } else { p0 };
    let mut prob = marginal(bits & 1 == 1);
    for k in 1..n {
        let prev = (bits >> (k - 1)) & 1 == 1;
        let cur = (bits >> k) & 1 == 1;
        prob *= (1.0 - mu) * marginal(cur) + if prev == cur { mu } else { 0.0 };
    }
    prob
}

fn pauli_sign(alpha: usize, j: usize) -> f64 {
    if (alpha & j).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `S(W)` for the Markov channel on populations `q`, with
/// `W_ab = sqrt(p_a p_b) sum_j q_j s_a(j) s_b(j)`.
pub fn markov_w_entropy(p0: f64, mu: f64, n: usize, q: &[f64]) -> f64 {
    let dim = 1usize << n;
    let p: Vec<f64> = (0..dim as u64).map(|a| chain_probability(p0, mu, a, n)).collect();
    // The overlap depends on a and b only through a ^ b.
    let overlap: Vec<f64> = (0..dim)
        .map(|x| (0..dim).map(|j| q[j] * pauli_sign(x, j)).sum())
        .collect();
    let w = DMatrix::from_fn(dim, dim, |a, b| (p[a] * p[b]).sqrt() * overlap[a ^ b]);
    entropy_of(SymmetricEigen::new(w).eigenvalues.as_slice())
}

/// `Q_N = S(out) - S(W)` at the maximally mixed input.
pub fn markov_q_n_brute(p0: f64, mu: f64, n: usize) -> f64 {
    let dim = 1usize << n;
    n as f64 - markov_w_entropy(p0, mu, n, &vec![1.0 / dim as f64; dim])
}

/// Composite Simpson rule with `2 * half_steps` intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, half_steps: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = 2 * half_steps;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `F(t) = (1/pi) int_0^inf S(w) (1 - cos wt) / w^2 dw` for the Lorentzian
/// `S(w) = 2 tau_c / (1 + w^2 tau_c^2)`: 20-point Gauss-Legendre panels no
/// longer than half an oscillation on `[0, W]`, plus the leading tail term.
pub fn lorentzian_f_by_frequency(t: f64, tau_c: f64) -> f64 {
    let cutoff = 2000.0 / tau_c;
    let integrand = |w: f64| {
        let s = 2.0 * tau_c / (1.0 + w * w * tau_c * tau_c);
        let kernel = if w * t < 1e-3 {
            t * t / 2.0 - w * w * t.powi(4) / 24.0
        } else {
            2.0 * (0.5 * w * t).sin().powi(2) / (w * w)
        };
        s * kernel
    };
    let (nodes, weights) = gauss_legendre(20);
    let width = (std::f64::consts::PI / t).min(0.25 / tau_c);
    let panels = (cutoff / width).ceil() as usize;
    let h = cutoff / panels as f64;
    let mut body = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let panel: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * integrand(mid + 0.5 * h * x))
            .sum();
        body += 0.5 * h * panel;
    }
    let tail = 2.0 / (3.0 * tau_c * cutoff.powi(3));
    (body + tail) / std::f64::consts::PI
}

/// `int_{[0,L] x [D, D+L]} e^{-|t - t'| / tau_c} dt dt'`, reduced to one
/// dimension and integrated piecewise between the kinks.
pub fn window_overlap(offset: f64, len: f64, tau_c: f64) -> f64 {
    let f = |s: f64| (len - (s - offset).abs()) * (-s.abs() / tau_c).exp();
    let (lo, hi) = (offset - len, offset + len);
    let mut knots = vec![lo, offset, hi];
    if lo < 0.0 && hi > 0.0 {
        knots.push(0.0);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots.windows(2).map(|w| simpson(f, w[0], w[1], 2000)).sum()
}

/// Decoherence factors of the Lorentzian bath built from the time-domain
/// correlation `e^{-|s|/tau_c}`: carrier `k` couples during `[k tau, k tau + tau_p]`,
/// so windows overlap when `tau < tau_p`.
pub struct BathOracle {
    lambda: f64,
    lags: Vec<f64>,
}

impl BathOracle {
    pub fn new(lambda: f64, tau_c: f64, tau_p: f64, tau: f64, n: usize) -> Self {
        let lags = (0..n)
            .map(|k| window_overlap(k as f64 * tau, tau_p, tau_c))
            .collect();
        Self { lambda, lags }
    }

    pub fn factor(&self, d: &[i8]) -> f64 {
        let mut exponent = 0.0;
        for (k, &dk) in d.iter().enumerate() {
            for (m, &dm) in d.iter().enumerate() {
                exponent += (dk * dm) as f64 * self.lags[k.abs_diff(m)];
            }
        }
        (-0.5 * self.lambda * self.lambda * exponent).exp()
    }

    pub fn table(&self) -> DMatrix<f64> {
        let n = self.lags.len();
        let dim = 1 << n;
        DMatrix::from_fn(dim, dim, |j, l| self.factor(&difference(j, l, n)))
    }
}

pub fn difference(j: usize, l: usize, n: usize) -> Vec<i8> {
    (0..n)
        .map(|k| ((j >> k) & 1) as i8 - ((l >> k) & 1) as i8)
        .collect()
}

/// `I_c` at the maximally mixed input from a decoherence table.
pub fn coherent_info_uniform(table: &DMatrix<f64>) -> f64 {
    let dim = table.nrows();
    let n = dim.trailing_zeros() as f64;
    let gram = table.transpose() / dim as f64;
    n - entropy_of(SymmetricEigen::new(gram).eigenvalues.as_slice())
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Trace norm / 2 of a Hermitian difference.
pub fn trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let diff = a - b;
    let diff = (&diff + diff.adjoint()) * c(0.5);
    0.5 * SymmetricEigen::new(diff).eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// Von Neumann entropy of a Hermitian matrix.
pub fn vn_entropy(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * c(0.5);
    entropy_of(SymmetricEigen::new(h).eigenvalues.as_slice())
}

/// `I_c = S(sum_a A rho A^dag) - S(W)` with `W_ab = Tr(A_a rho A_b^dag)`,
/// for diagonal Kraus operators given by their diagonals.
pub fn coherent_info_kraus(kraus: &[Vec<Complex64>], rho: &DMatrix<Complex64>) -> f64 {
    let dim = rho.nrows();
    let out = DMatrix::from_fn(dim, dim, |j, l| {
        kraus.iter().map(|a| a[j] * rho[(j, l)] * a[l].conj()).sum::<Complex64>()
    });
    let w = DMatrix::from_fn(kraus.len(), kraus.len(), |x, y| {
        (0..dim)
            .map(|j| kraus[x][j] * rho[(j, j)] * kraus[y][j].conj())
            .sum::<Complex64>()
    });
    vn_entropy(&out) - vn_entropy(&w)
}
