//! Property suites run by `dephcap --verify`.
//!
//! Every property reports the worst slack it saw: the distance to failure,
//! positive when the property holds. Results are emitted as JSON lines.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{
    apply_channel, coherent_information, coherent_information_diagonal, conjugate_by_z,
    conjugate_channel_entropy, entropy_exchange_via_gram, entropy_exchange_via_kraus,
    z_twirl_sweep, DephasingKrausFamily, DiagonalState,
};
use crate::entropy::{
    binary_entropy, kolmogorov_distance, shannon_entropy, symmetric_eigenvalues, trace_distance,
    von_neumann_entropy, DensityMatrix, SymmetricMatrix,
};
use crate::error::{Error, Result};
use crate::markov::{
    capacity, entropy_exchange_closed, epsilon_n, forgetfulness_check, markov_kraus_family, q_n,
    MarkovParams,
};
use crate::sampling::{
    random_density_matrix, random_diagonal_state, random_kraus_family, random_probabilities,
};
use crate::spinboson::{
    base_integral, base_integral_quadrature, coherent_info_unpolarized, default_quadrature,
    dfs_analysis, dfs_coherent_info, exchange_entropy, gram_spectrum, two_use_forgetfulness,
    DecoherenceTable, DifferenceVector, Lorentzian, SpinBosonParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Markov,
    Spinboson,
    Channel,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov" => Ok(Suite::Markov),
            "spinboson" => Ok(Suite::Spinboson),
            "channel" => Ok(Suite::Channel),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!(
                "unknown suite '{other}' (markov, spinboson, channel or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Markov => "markov",
            Suite::Spinboson => "spinboson",
            Suite::Channel => "channel",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub property: &'static str,
    pub passed: bool,
    pub worst_slack: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn write_json_lines<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.results {
            writeln!(w, "{}", serde_json::to_string(r).map_err(std::io::Error::other)?)?;
        }
        Ok(())
    }
}

/// Collects slacks for one property.
struct Check {
    suite: &'static str,
    property: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
}

impl Check {
    fn new(suite: &'static str, property: &'static str, tolerance: f64) -> Self {
        Self {
            suite,
            property,
            tolerance,
            worst: f64::INFINITY,
            cases: 0,
        }
    }

    fn slack(&mut self, s: f64) {
        self.cases += 1;
        // NaN must fail, so it replaces any finite worst value.
        if s.is_nan() || s < self.worst {
            self.worst = s;
        }
    }

    /// `|error| <= tolerance`.
    fn error(&mut self, e: f64) {
        self.slack(self.tolerance - e.abs());
    }

    /// `later >= earlier - tolerance`.
    fn non_decreasing(&mut self, earlier: f64, later: f64) {
        self.slack(later - earlier + self.tolerance);
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            suite: self.suite,
            property: self.property,
            passed: self.cases > 0 && self.worst >= 0.0,
            worst_slack: self.worst,
            tolerance: self.tolerance,
            cases: self.cases,
        }
    }
}

pub fn run_verify(suite: Suite, seed: u64) -> Result<VerifyReport> {
    let mut results = Vec::new();
    if matches!(suite, Suite::Markov | Suite::All) {
        results.extend(markov_suite()?);
    }
    if matches!(suite, Suite::Channel | Suite::All) {
        results.extend(channel_suite(seed)?);
    }
    if matches!(suite, Suite::Spinboson | Suite::All) {
        results.extend(spinboson_suite(seed)?);
    }
    Ok(VerifyReport { results })
}

const MARKOV: &str = "markov";
const CHANNEL: &str = "channel";
const SPINBOSON: &str = "spinboson";

fn markov_suite() -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();
    let grid: Vec<(usize, f64, f64)> = (1..=10)
        .flat_map(|n| {
            [0.0, 0.25, 0.5, 0.75, 1.0]
                .into_iter()
                .flat_map(move |mu| [0.6, 0.85].into_iter().map(move |p0| (n, mu, p0)))
        })
        .collect();

    let mut joint = Check::new(MARKOV, "exchange_closed_vs_joint_entropy", 1e-9);
    for &(n, mu, p0) in &grid {
        let p = MarkovParams::from_p0(p0, mu, n)?;
        joint.error(entropy_exchange_closed(&p) - shannon_entropy(&p.joint_distribution()?));
    }
    out.push(joint.finish());

    let errors: Vec<f64> = grid
        .par_iter()
        .map(|&(n, mu, p0)| {
            let p = MarkovParams::from_p0(p0, mu, n)?;
            let brute =
                coherent_information_diagonal(&markov_kraus_family(&p)?, &DiagonalState::uniform(n)?)?;
            Ok(q_n(&p) - brute)
        })
        .collect::<Result<_>>()?;
    let mut w_matrix = Check::new(MARKOV, "q_n_closed_vs_w_matrix", 1e-9);
    errors.into_iter().for_each(|e| w_matrix.error(e));
    out.push(w_matrix.finish());

    let mut bound = Check::new(MARKOV, "forgetfulness_bound", 0.0);
    let mut nontrivial = Check::new(MARKOV, "forgetfulness_distance_positive", 0.0);
    for n in 1..=3 {
        for idle in 0..=6 {
            for i in 1..=9 {
                let p = MarkovParams::from_p0(0.85, i as f64 / 10.0, n)?;
                let r = forgetfulness_check(&p, idle)?;
                bound.slack(r.slack());
                nontrivial.slack(if r.distance > 0.0 { r.distance } else { -1.0 });
            }
        }
    }
    out.push(bound.finish());
    out.push(nontrivial.finish());

    let mus: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
    let mut cap = Check::new(MARKOV, "capacity_non_decreasing_in_mu", 1e-12);
    let mut eps = Check::new(MARKOV, "epsilon_non_decreasing_in_mu", 1e-12);
    for p0 in [0.6, 0.75, 0.85, 0.95] {
        for n in [2, 10, 100] {
            for w in mus.windows(2) {
                let a = MarkovParams::from_p0(p0, w[0], n)?;
                let b = MarkovParams::from_p0(p0, w[1], n)?;
                cap.non_decreasing(capacity(&a), capacity(&b));
                eps.non_decreasing(epsilon_n(&a), epsilon_n(&b));
            }
        }
    }
    out.push(cap.finish());
    out.push(eps.finish());

    let mut conv = Check::new(MARKOV, "epsilon_non_increasing_in_n", 1e-12);
    for i in 0..=10 {
        let mu = i as f64 / 10.0;
        for n in 1..100 {
            let a = MarkovParams::from_p0(0.85, mu, n)?;
            let b = a.with_n(n + 1)?;
            conv.non_decreasing(epsilon_n(&b), epsilon_n(&a));
            conv.non_decreasing(q_n(&a) / n as f64, capacity(&a));
        }
    }
    out.push(conv.finish());

    let mut tight = Check::new(MARKOV, "rate_reaches_capacity_at_large_n", 1e-6);
    for p0 in [0.6, 0.75, 0.85, 0.95] {
        for i in 0..=10 {
            let p = MarkovParams::from_p0(p0, i as f64 / 10.0, 1_000_000)?;
            tight.error(q_n(&p) / p.n() as f64 - capacity(&p));
        }
    }
    out.push(tight.finish());

    let mut law = Check::new(MARKOV, "epsilon_small_mu_law", 0.2);
    for n in [5, 10, 50] {
        for i in 0..=9 {
            let mu = 0.01 + 0.01 * i as f64;
            let p = MarkovParams::from_p0(0.85, mu, n)?;
            let eps = epsilon_n(&p);
            let approx = mu * mu / (2.0 * std::f64::consts::LN_2 * n as f64);
            law.error((eps - approx) / eps);
        }
    }
    out.push(law.finish());

    let mut ends = Check::new(MARKOV, "endpoints_p0_0_85", 1e-9);
    let memoryless = 1.0 - binary_entropy(0.85)?;
    for n in [2, 4, 6, 8, 10, 100] {
        let zero = MarkovParams::from_p0(0.85, 0.0, n)?;
        let one = MarkovParams::from_p0(0.85, 1.0, n)?;
        ends.error(q_n(&zero) / n as f64 - memoryless);
        ends.error(q_n(&one) / n as f64 - (1.0 - binary_entropy(0.85)? / n as f64));
        ends.error(capacity(&one) - 1.0);
        ends.error(capacity(&zero) - memoryless);
    }
    out.push(ends.finish());
    Ok(out)
}

fn property_rng(seed: u64, property: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(property))
}

fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    use rand_distr::StandardNormal;
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.qr().q()
}

fn matrix_gap(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn channel_suite(seed: u64) -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();

    let mut mono = Check::new(CHANNEL, "twirl_monotonicity", 1e-9);
    let mut populations = Check::new(CHANNEL, "population_conservation", 1e-14);
    let mut commute = Check::new(CHANNEL, "twirl_commutation", 1e-12);
    let mut witness = Check::new(CHANNEL, "exchange_entropy_ignores_coherences", 1e-10);
    let mut routes = Check::new(CHANNEL, "gram_route_matches_kraus_route", 1e-10);
    for case in 0..100u64 {
        let mut rng = property_rng(seed, 1000 + case);
        let n = 1 + (case % 3) as usize;
        let kraus = rng.random_range(1..=4);
        let k = random_kraus_family(n, kraus, &mut rng)?;
        let rho = random_density_matrix(n, &mut rng)?;

        let sweep = z_twirl_sweep(&rho)?;
        let ic: Vec<f64> = sweep
            .iter()
            .map(|s| coherent_information(&k, s).map(|o| o.coherent_information))
            .collect::<Result<_>>()?;
        for w in ic.windows(2) {
            mono.non_decreasing(w[0], w[1]);
        }

        let rho_out = apply_channel(&k, &rho)?;
        for (a, b) in rho.populations().iter().zip(rho_out.populations()) {
            populations.error(a - b);
        }

        for q in 1..=n {
            let lhs = apply_channel(&k, &conjugate_by_z(&rho, q)?)?;
            let rhs = conjugate_by_z(&rho_out, q)?;
            commute.error(matrix_gap(lhs.matrix(), rhs.matrix()));
        }

        let full = conjugate_channel_entropy(&k, &rho)?;
        for s in &sweep[1..] {
            witness.error(full - conjugate_channel_entropy(&k, s)?);
        }

        let pops = rho.populations();
        routes.error(entropy_exchange_via_kraus(&k, &pops)? - entropy_exchange_via_gram(&k, &pops)?);
    }
    out.extend([
        mono.finish(),
        populations.finish(),
        commute.finish(),
        witness.finish(),
        routes.finish(),
    ]);

    let mut x_claim = Check::new(CHANNEL, "markov_uniform_input_is_optimal_diagonal", 1e-12);
    let mut rng = property_rng(seed, 2);
    for case in 0..150 {
        let n = 1 + case % 3;
        let p = MarkovParams::from_p0(rng.random_range(0.5..1.0), rng.random::<f64>(), n)?;
        let k = markov_kraus_family(&p)?;
        let best = coherent_information_diagonal(&k, &DiagonalState::uniform(n)?)?;
        let other = coherent_information_diagonal(&k, &random_diagonal_state(n, &mut rng)?)?;
        x_claim.non_decreasing(other, best);
    }
    out.push(x_claim.finish());

    let mut convexity = Check::new(CHANNEL, "trace_distance_below_kolmogorov", 1e-12);
    let mut triangle = Check::new(CHANNEL, "trace_distance_triangle", 1e-10);
    let mut unitary = Check::new(CHANNEL, "trace_distance_unitary_invariance", 1e-10);
    let mut diagonal = Check::new(CHANNEL, "von_neumann_diagonal_is_shannon", 1e-10);
    let mut rng = property_rng(seed, 3);
    for case in 0..100 {
        let n = 1 + case % 2;
        let rho = random_density_matrix(n, &mut rng)?;
        let p = random_probabilities(1 << n, &mut rng)?;
        let q = random_probabilities(1 << n, &mut rng)?;
        let a = apply_channel(&DephasingKrausFamily::pauli_z(n, p.clone())?, &rho)?;
        let b = apply_channel(&DephasingKrausFamily::pauli_z(n, q.clone())?, &rho)?;
        convexity.non_decreasing(trace_distance(&a, &b)?, kolmogorov_distance(&p, &q)?);

        let x = random_density_matrix(2, &mut rng)?;
        let y = random_density_matrix(2, &mut rng)?;
        let z = random_density_matrix(2, &mut rng)?;
        triangle.non_decreasing(
            trace_distance(&x, &z)?,
            trace_distance(&x, &y)? + trace_distance(&y, &z)?,
        );
        let u = random_unitary(4, &mut rng);
        let rotate = |m: &DensityMatrix| DensityMatrix::new(&u * m.matrix() * u.adjoint());
        unitary.error(trace_distance(&x, &y)? - trace_distance(&rotate(&x)?, &rotate(&y)?)?);

        let pops = random_probabilities(8, &mut rng)?;
        diagonal.error(
            von_neumann_entropy(&DensityMatrix::from_populations(&pops)?)? - shannon_entropy(&pops),
        );
    }
    out.extend([
        convexity.finish(),
        triangle.finish(),
        unitary.finish(),
        diagonal.finish(),
    ]);

    let mut eig = Check::new(CHANNEL, "eigenvalue_trace_and_frobenius", 1e-9);
    let mut rng = property_rng(seed, 4);
    for dim in [2, 5, 16, 64, 200] {
        let g = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() - 0.5);
        let m = SymmetricMatrix::new((&g + g.transpose()) * 0.5)?;
        let values = symmetric_eigenvalues(&m)?;
        eig.error(values.iter().sum::<f64>() - m.trace());
        eig.error(values.iter().map(|v| v * v).sum::<f64>() - m.matrix().norm_squared());
    }
    out.push(eig.finish());
    Ok(out)
}

fn spinboson_suite(seed: u64) -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();
    let reference_params = |tau: f64, n: usize| SpinBosonParams::new(1.0, 1.0, 1.0, tau, n);

    let mut quad = Check::new(SPINBOSON, "base_integral_quadrature_vs_closed_form", 1e-8);
    let cfg = default_quadrature();
    let mut ts: Vec<f64> = vec![0.01, 0.1, 1.0, 10.0, 100.0];
    ts.extend((0..=20).map(|i| 5.0 * i as f64));
    for tau_c in [1.0, 0.5] {
        for &t in &ts {
            let t = t * tau_c;
            let numeric = base_integral_quadrature(&Lorentzian { tau_c }, t, &cfg)?;
            quad.error(numeric - base_integral(t, tau_c)?);
        }
    }
    out.push(quad.finish());

    let mut table = Check::new(SPINBOSON, "table_symmetric_unit_diagonal_bounded", 1e-14);
    let mut rng = property_rng(seed, 5);
    for case in 0..20 {
        let n = 1 + case % 6;
        let p = SpinBosonParams::new(
            rng.random_range(0.1..2.0),
            rng.random_range(0.2..3.0),
            rng.random_range(0.2..3.0),
            rng.random_range(0.0..5.0),
            n,
        )?;
        let t = DecoherenceTable::new(&p)?;
        table.error(t.factor(&DifferenceVector::new(vec![0; n])?).unwrap_or(f64::NAN) - 1.0);
        for j in 0..1usize << n {
            for l in 0..1usize << n {
                let d = t.factor_for_configs(j, l);
                table.error(d - t.factor_for_configs(l, j));
                table.slack(if d > 0.0 && d <= 1.0 { table.tolerance } else { -1.0 });
            }
        }
    }
    out.push(table.finish());

    let mut psd = Check::new(SPINBOSON, "gram_psd_unit_trace", 1e-8);
    for xi in [0.05, 0.5, 0.999] {
        for n in 1..=10 {
            let p = SpinBosonParams::from_xi(1.0, 1.0, 1.0, xi, n)?;
            let spectrum = gram_spectrum(&p, &DiagonalState::uniform(n)?)?;
            let min = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
            psd.slack(min + psd.tolerance);
            psd.error(spectrum.iter().sum::<f64>() - 1.0);
        }
    }
    out.push(psd.finish());

    let xis: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let jobs: Vec<(usize, f64)> =
        (2..=10).flat_map(|n| xis.iter().map(move |&xi| (n, xi))).collect();
    let rates: Vec<f64> = jobs
        .par_iter()
        .map(|&(n, xi)| {
            let p = SpinBosonParams::from_xi(1.0, 1.0, 1.0, xi, n)?;
            Ok(coherent_info_unpolarized(&p)? / n as f64)
        })
        .collect::<Result<_>>()?;
    let rate = |n: usize, i: usize| rates[(n - 2) * xis.len() + i];
    let mut in_xi = Check::new(SPINBOSON, "rate_non_decreasing_in_xi", 1e-9);
    for n in [2, 4, 6, 8, 10] {
        for i in 1..xis.len() {
            in_xi.non_decreasing(rate(n, i - 1), rate(n, i));
        }
    }
    let mut in_n = Check::new(SPINBOSON, "rate_non_decreasing_in_n", 1e-9);
    for i in 0..xis.len() {
        for n in 3..=10 {
            in_n.non_decreasing(rate(n - 1, i), rate(n, i));
        }
    }
    out.push(in_xi.finish());
    out.push(in_n.finish());

    let mut factor = Check::new(SPINBOSON, "long_spacing_factorizes", 1e-2);
    let g = reference_params(1.0, 1)?.single_use_factor()?;
    let h = binary_entropy((1.0 + g) / 2.0)?;
    for tau in [50.0, 100.0] {
        for n in 1..=10 {
            let p = reference_params(tau, n)?;
            factor.error(exchange_entropy(&p, &DiagonalState::uniform(n)?)? - n as f64 * h);
        }
    }
    out.push(factor.finish());

    let mut dfs = Check::new(SPINBOSON, "dfs_rate_at_zero_spacing", 1e-8);
    for n in [2, 4, 6, 8] {
        let exact = (dfs_analysis(n)?.dimension as f64).log2();
        dfs.error(dfs_coherent_info(&reference_params(0.0, n)?)? - exact);
    }
    out.push(dfs.finish());

    let mut bound = Check::new(SPINBOSON, "two_use_trace_distance_bound", 0.0);
    let mut decay = Check::new(SPINBOSON, "two_use_decay_ratio", 0.05);
    let single = reference_params(1.0, 1)?;
    let step = (-single.tau() / single.tau_c()).exp();
    let bell = {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);
        DensityMatrix::pure(&[c(s), c(0.0), c(0.0), c(s)])?
    };
    let mut rng = property_rng(seed, 6);
    let mut states = vec![bell];
    for _ in 0..50 {
        states.push(random_density_matrix(2, &mut rng)?);
    }
    for rho in &states {
        let reports = (0..=8)
            .map(|idle| two_use_forgetfulness(&single, idle, rho))
            .collect::<Result<Vec<_>>>()?;
        for r in &reports {
            if r.bound <= 1.0 {
                bound.slack(r.bound - r.distance);
            }
        }
        for w in reports.windows(2) {
            if w[0].distance > 1e-13 {
                decay.slack(step + decay.tolerance - w[1].distance / w[0].distance);
            }
        }
    }
    out.push(bound.finish());
    out.push(decay.finish());
    Ok(out)
}
