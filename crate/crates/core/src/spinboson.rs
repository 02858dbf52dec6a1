//! Dephasing by a bosonic bath with a Lorentzian power spectrum.
//!
//! Qubits cross the channel one after another: each spends `tau_p` coupled
//! to the bath, consecutive qubits enter `tau` apart. The coherence between
//! configurations `j` and `l` is multiplied by
//!
//! ```text
//! D(j, l) = exp[-lambda^2 int_0^inf dw/pi S(w) (1 - cos w tau_p) / w^2
//!                 |sum_k d_k e^{i w (k-1) tau}|^2],      d = j - l.
//! ```
//!
//! Expanding the modulus gives `sum_{k,m} d_k d_m cos(w (k-m) tau)`, and with
//! `(1 - cos a) cos b = (1 - cos(a+b))/2 + (1 - cos(a-b))/2 - (1 - cos b)` the
//! exponent becomes a combination of the single convergent integral
//!
//! ```text
//! F(t) = int_0^inf dw/pi S(w) (1 - cos w t) / w^2,
//! ```
//!
//! which for `S(w) = 2 tau_c / (1 + (w tau_c)^2)` is
//! `F(t) = tau_c [t - tau_c (1 - e^{-t/tau_c})]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{DephasingKrausFamily, DiagonalState};
use crate::entropy::{
    binary_entropy, check_qubits, spectral_entropy, symmetric_eigenvalues, trace_distance,
    DensityMatrix, ProbVector, SymmetricMatrix,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, QuadConfig};

/// Contribution allowed for the truncated tail `[Omega, inf)` of `F(t)`.
const TAIL_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 400_000;

/// A bath power spectrum `S(w)`, `w >= 0`.
pub trait PowerSpectrum: Send + Sync {
    fn density(&self, omega: f64) -> f64;

    /// A constant `C` with `S(w) <= C / w^2` for all `w > 0`.
    fn decay_constant(&self) -> f64;

    /// `F(t)` by quadrature unless the spectrum knows better.
    fn base_integral(&self, t: f64) -> Result<f64> {
        base_integral_quadrature(self, t, &default_quadrature())
    }
}

/// `S(w) = 2 tau_c / (1 + (w tau_c)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorentzian {
    pub tau_c: f64,
}

impl PowerSpectrum for Lorentzian {
    fn density(&self, omega: f64) -> f64 {
        lorentzian_spectrum(omega, self.tau_c)
    }

    fn decay_constant(&self) -> f64 {
        2.0 / self.tau_c
    }

    fn base_integral(&self, t: f64) -> Result<f64> {
        base_integral(t, self.tau_c)
    }
}

pub fn lorentzian_spectrum(omega: f64, tau_c: f64) -> f64 {
    let x = omega * tau_c;
    2.0 * tau_c / (1.0 + x * x)
}

/// `F(t)` for the Lorentzian spectrum, closed form.
///
/// Agrees with [`base_integral_quadrature`] to better than `1e-8` on
/// `t in [0, 100 tau_c]` (checked in the test suite).
pub fn base_integral(t: f64, tau_c: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("base integral needs finite t >= 0, got {t}")));
    }
    if !(tau_c > 0.0 && tau_c.is_finite()) {
        return Err(Error::Domain(format!("tau_c = {tau_c} must be positive")));
    }
    let x = t / tau_c;
    // t - tau_c (1 - e^{-x}) = tau_c (x + expm1(-x))
    Ok(tau_c * tau_c * (x + (-x).exp_m1()))
}

pub fn default_quadrature() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-11,
        rel_tol: 1e-13,
        max_intervals: 2_000,
    }
}

/// `F(t)` by adaptive quadrature on `[0, Omega]`.
///
/// The integrand is bounded by `2 C / (pi w^4)`, so cutting at `Omega` drops
/// at most `2 C / (3 pi Omega^3)`; `Omega` is chosen to keep that below
/// `1e-12`. The range is split into panels of roughly one period of
/// `cos(w t)`, each integrated adaptively.
pub fn base_integral_quadrature<S: PowerSpectrum + ?Sized>(
    spectrum: &S,
    t: f64,
    config: &QuadConfig,
) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("base integral needs finite t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let c = spectrum.decay_constant();
    let omega_max = (2.0 * c / (3.0 * std::f64::consts::PI * TAIL_TOL)).cbrt();
    let periods = (omega_max * t / (2.0 * std::f64::consts::PI)).ceil() as usize;
    if periods > MAX_PANELS {
        return Err(Error::Quadrature(format!(
            "t = {t} needs {periods} panels, more than {MAX_PANELS}"
        )));
    }
    let integrand = |w: f64| {
        let s = (0.5 * w * t).sin();
        let one_minus_cos = 2.0 * s * s;
        if w == 0.0 {
            spectrum.density(0.0) * t * t / (2.0 * std::f64::consts::PI)
        } else {
            spectrum.density(w) * one_minus_cos / (std::f64::consts::PI * w * w)
        }
    };
    let panel_config = QuadConfig {
        rel_tol: config.rel_tol,
        ..*config
    };
    Ok(integrate_panels(&integrand, 0.0, omega_max, periods.max(1), &panel_config)?.value)
}

/// How `F(t)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum IntegralMethod {
    #[default]
    ClosedForm,
    Quadrature(QuadConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBosonParams {
    lambda: f64,
    tau_c: f64,
    tau_p: f64,
    tau: f64,
    n: usize,
    method: IntegralMethod,
}

impl SpinBosonParams {
    pub fn new(lambda: f64, tau_c: f64, tau_p: f64, tau: f64, n: usize) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {v} must be positive and finite")))
            }
        };
        positive("lambda", lambda)?;
        positive("tau_c", tau_c)?;
        positive("tau_p", tau_p)?;
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau = {tau} must be finite and >= 0")));
        }
        if n == 0 {
            return Err(Error::Domain("number of uses must be positive".into()));
        }
        Ok(Self {
            lambda,
            tau_c,
            tau_p,
            tau,
            n,
            method: IntegralMethod::ClosedForm,
        })
    }

    /// Spacing from the memory degree `xi = tau_c / (tau + tau_c)`, `xi in (0, 1]`.
    pub fn from_xi(lambda: f64, tau_c: f64, tau_p: f64, xi: f64, n: usize) -> Result<Self> {
        if xi == 0.0 {
            return Err(Error::Domain(
                "xi = 0 means infinite spacing; use the memoryless value 1 - H((1+g)/2)".into(),
            ));
        }
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::Domain(format!("xi = {xi} outside (0, 1]")));
        }
        Self::new(lambda, tau_c, tau_p, tau_c * (1.0 - xi) / xi, n)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        let mut p = Self::new(self.lambda, self.tau_c, self.tau_p, self.tau, n)?;
        p.method = self.method;
        Ok(p)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        let mut p = Self::new(self.lambda, self.tau_c, self.tau_p, tau, self.n)?;
        p.method = self.method;
        Ok(p)
    }

    pub fn with_integral_method(mut self, method: IntegralMethod) -> Self {
        self.method = method;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau_c(&self) -> f64 {
        self.tau_c
    }

    pub fn tau_p(&self) -> f64 {
        self.tau_p
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn integral_method(&self) -> IntegralMethod {
        self.method
    }

    pub fn xi(&self) -> f64 {
        self.tau_c / (self.tau + self.tau_c)
    }

    fn f(&self, t: f64) -> Result<f64> {
        match self.method {
            IntegralMethod::ClosedForm => base_integral(t, self.tau_c),
            IntegralMethod::Quadrature(cfg) => {
                base_integral_quadrature(&Lorentzian { tau_c: self.tau_c }, t, &cfg)
            }
        }
    }

    /// Single-use coherence factor `g = exp(-lambda^2 F(tau_p))`.
    pub fn single_use_factor(&self) -> Result<f64> {
        Ok((-self.lambda * self.lambda * self.f(self.tau_p)?).exp())
    }

    /// Memoryless capacity `1 - H((1 + g) / 2)`.
    pub fn memoryless_capacity(&self) -> Result<f64> {
        let g = self.single_use_factor()?;
        Ok(1.0 - binary_entropy((1.0 + g) / 2.0)?)
    }

    /// `lambda^2 G(delta)` for lags `delta = 0..n`, where
    /// `G(0) = F(tau_p)` and
    /// `G(delta) = F(tau_p + delta tau)/2 + F(|tau_p - delta tau|)/2 - F(delta tau)`.
    fn lag_kernel(&self) -> Result<Vec<f64>> {
        let l2 = self.lambda * self.lambda;
        (0..self.n)
            .map(|delta| {
                if delta == 0 {
                    return Ok(l2 * self.f(self.tau_p)?);
                }
                let b = delta as f64 * self.tau;
                Ok(l2
                    * (0.5 * self.f(self.tau_p + b)? + 0.5 * self.f((self.tau_p - b).abs())?
                        - self.f(b)?))
            })
            .collect()
    }
}

/// `d = j - l` over the qubits, entries in `{-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DifferenceVector(Vec<i8>);

impl DifferenceVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("empty difference vector".into()));
        }
        if let Some(bad) = entries.iter().find(|d| !(-1..=1).contains(*d)) {
            return Err(Error::Domain(format!("difference entry {bad} not in {{-1, 0, 1}}")));
        }
        Ok(Self(entries))
    }

    /// `d_k = j_k - l_k` with qubit `k + 1` on bit `k`.
    pub fn from_configs(j: usize, l: usize, n_qubits: usize) -> Self {
        Self(
            (0..n_qubits)
                .map(|k| ((j >> k) & 1) as i8 - ((l >> k) & 1) as i8)
                .collect(),
        )
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn ternary_code(&self) -> usize {
        self.0
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * 3 + (d + 1) as usize)
    }
}

fn exponent(d: &[i8], kernel: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (k, &dk) in d.iter().enumerate() {
        if dk == 0 {
            continue;
        }
        sum += kernel[0];
        for (m, &dm) in d.iter().enumerate().skip(k + 1) {
            if dm != 0 {
                sum += 2.0 * f64::from(dk * dm) * kernel[m - k];
            }
        }
    }
    sum
}

/// `D` for a given difference vector.
pub fn decoherence_factor(params: &SpinBosonParams, d: &DifferenceVector) -> Result<f64> {
    if d.len() != params.n() {
        return Err(Error::DimensionMismatch {
            left: d.len(),
            right: params.n(),
        });
    }
    let kernel = params.lag_kernel()?;
    Ok((-exponent(d.entries(), &kernel)).exp())
}

/// All `3^N` decoherence factors, indexed by difference vector.
///
/// Filled completely on construction and read-only afterwards, so it can be
/// shared between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceTable {
    n_qubits: usize,
    factors: Vec<f64>,
    config_codes: Vec<usize>,
}

impl DecoherenceTable {
    pub fn new(params: &SpinBosonParams) -> Result<Self> {
        let n = params.n();
        check_qubits(n)?;
        let kernel = params.lag_kernel()?;
        let size = 3usize.pow(n as u32);
        let mut d = vec![0i8; n];
        let mut factors = Vec::with_capacity(size);
        for code in 0..size {
            let mut rest = code;
            for dk in d.iter_mut() {
                *dk = (rest % 3) as i8 - 1;
                rest /= 3;
            }
            factors.push((-exponent(&d, &kernel)).exp());
        }
        // code(j - l) = code(0) + t(j) - t(l), t(j) = sum_k j_k 3^k
        let config_codes = (0..1usize << n)
            .map(|j| {
                (0..n)
                    .filter(|k| (j >> k) & 1 == 1)
                    .map(|k| 3usize.pow(k as u32))
                    .sum()
            })
            .collect();
        Ok(Self {
            n_qubits: n,
            factors,
            config_codes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn factor(&self, d: &DifferenceVector) -> Option<f64> {
        if d.len() != self.n_qubits {
            return None;
        }
        self.factors.get(d.ternary_code()).copied()
    }

    /// `D(j, l)` for basis configurations `j`, `l`.
    pub fn factor_for_configs(&self, j: usize, l: usize) -> f64 {
        let zero = (self.factors.len() - 1) / 2;
        self.factors[zero + self.config_codes[j] - self.config_codes[l]]
    }

    /// The channel as a generic dephasing family.
    pub fn to_channel(&self) -> Result<DephasingKrausFamily> {
        let dim = 1usize << self.n_qubits;
        let table = DMatrix::from_fn(dim, dim, |j, l| {
            Complex64::new(self.factor_for_configs(j, l), 0.0)
        });
        DephasingKrausFamily::from_table(self.n_qubits, table)
    }
}

/// The channel of `params` as a generic dephasing family.
pub fn spinboson_channel(params: &SpinBosonParams) -> Result<DephasingKrausFamily> {
    DecoherenceTable::new(params)?.to_channel()
}

fn check_state(params: &SpinBosonParams, q: &DiagonalState) -> Result<()> {
    if q.n_qubits() != params.n() {
        return Err(Error::DimensionMismatch {
            left: q.n_qubits(),
            right: params.n(),
        });
    }
    Ok(())
}

/// Spectrum of the environment Gram matrix `M_{jl} = sqrt(q_j q_l) D(j, l)`,
/// restricted to the support of `q`.
pub fn gram_spectrum(params: &SpinBosonParams, q: &DiagonalState) -> Result<Vec<f64>> {
    check_state(params, q)?;
    let table = DecoherenceTable::new(params)?;
    gram_spectrum_with(&table, q.populations().entries())
}

fn gram_spectrum_with(table: &DecoherenceTable, populations: &[f64]) -> Result<Vec<f64>> {
    let support: Vec<usize> = (0..populations.len())
        .filter(|&j| populations[j] > 0.0)
        .collect();
    let sqrt_q: Vec<f64> = support.iter().map(|&j| populations[j].sqrt()).collect();
    let size = support.len();
    let gram = DMatrix::from_fn(size, size, |a, b| {
        sqrt_q[a] * sqrt_q[b] * table.factor_for_configs(support[a], support[b])
    });
    symmetric_eigenvalues(&SymmetricMatrix::from_matrix_unchecked(gram))
}

/// Entropy exchange for a diagonal input.
pub fn exchange_entropy(params: &SpinBosonParams, q: &DiagonalState) -> Result<f64> {
    spectral_entropy(&gram_spectrum(params, q)?)
}

/// `I_c` for the maximally mixed input: `N - S_e`.
pub fn coherent_info_unpolarized(params: &SpinBosonParams) -> Result<f64> {
    let uniform = DiagonalState::uniform(params.n())?;
    Ok(params.n() as f64 - exchange_entropy(params, &uniform)?)
}

/// Dimension and rate of the balanced-configuration subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfsSummary {
    pub dimension: u128,
    pub rate: f64,
}

const DFS_MAX_QUBITS: usize = 120;

/// `C(n, floor(n/2))` balanced configurations and `log2(dim) / n`.
pub fn dfs_analysis(n: usize) -> Result<DfsSummary> {
    if n == 0 || n > DFS_MAX_QUBITS {
        return Err(Error::Domain(format!("dfs analysis needs 1 <= n <= {DFS_MAX_QUBITS}")));
    }
    let k = n / 2;
    let mut dimension: u128 = 1;
    for i in 1..=k as u128 {
        dimension = dimension * (n as u128 - k as u128 + i) / i;
    }
    Ok(DfsSummary {
        dimension,
        rate: (dimension as f64).log2() / n as f64,
    })
}

/// The state uniform over configurations with `floor(n/2)` excitations.
pub fn dfs_state(n_qubits: usize) -> Result<DiagonalState> {
    check_qubits(n_qubits)?;
    let weight = (n_qubits / 2) as u32;
    let dim = 1usize << n_qubits;
    let members = (0..dim).filter(|j| j.count_ones() == weight).count();
    let populations = (0..dim)
        .map(|j| {
            if j.count_ones() == weight {
                1.0 / members as f64
            } else {
                0.0
            }
        })
        .collect();
    DiagonalState::new(n_qubits, ProbVector::new(populations)?)
}

/// Coherent information of the maximally mixed state on the balanced subspace.
pub fn dfs_coherent_info(params: &SpinBosonParams) -> Result<f64> {
    let state = dfs_state(params.n())?;
    let dimension = dfs_analysis(params.n())?.dimension as f64;
    Ok(dimension.log2() - exchange_entropy(params, &state)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoUseReport {
    pub distance: f64,
    pub bound: f64,
}

impl TwoUseReport {
    /// The bound only constrains anything when it is at most one.
    pub fn satisfied(&self) -> bool {
        self.bound > 1.0 || self.distance <= self.bound
    }
}

/// Two single uses separated by `idle` empty slots.
///
/// The exact output keeps the cross-correlation between the two qubits
/// (spacing `(L + 1) tau`); the memoryless output drops it. Returns their
/// trace distance and the bound
/// `4 lambda^2 g^2 tau_c^2 (1 - e^{-tau_p/tau_c})^2 e^{-L tau / tau_c}`.
pub fn two_use_forgetfulness(
    params: &SpinBosonParams,
    idle: usize,
    rho: &DensityMatrix,
) -> Result<TwoUseReport> {
    if params.n() != 1 {
        return Err(Error::Domain(format!(
            "two-use check takes single-use blocks, got n = {}",
            params.n()
        )));
    }
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: 2,
        });
    }
    let spacing = (idle as f64 + 1.0) * params.tau();
    let pair = params.with_n(2)?.with_tau(spacing)?;
    let exact_table = DecoherenceTable::new(&pair)?;
    let g = params.single_use_factor()?;

    let m = rho.matrix();
    let exact = DMatrix::from_fn(4, 4, |j, l| m[(j, l)] * exact_table.factor_for_configs(j, l));
    let memoryless = DMatrix::from_fn(4, 4, |j, l| {
        let flips = ((j ^ l) & 0b11).count_ones() as i32;
        m[(j, l)] * g.powi(flips)
    });
    let distance = trace_distance(
        &DensityMatrix::from_matrix_unchecked(2, exact),
        &DensityMatrix::from_matrix_unchecked(2, memoryless),
    )?;

    let ratio = params.tau_p() / params.tau_c();
    let bound = 4.0
        * params.lambda().powi(2)
        * g
        * g
        * params.tau_c().powi(2)
        * (-(-ratio).exp_m1()).powi(2)
        * (-(idle as f64) * params.tau() / params.tau_c()).exp();
    Ok(TwoUseReport { distance, bound })
}
