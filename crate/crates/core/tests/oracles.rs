mod common;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dephcap::channel::{coherent_information, coherent_information_diagonal, DiagonalState};
use dephcap::entropy::{DensityMatrix, ProbVector};
use dephcap::markov::{markov_kraus_family, MarkovParams, PauliSymbol};
use dephcap::sampling::{random_density_matrix, random_kraus_family, random_probabilities};
use dephcap::spinboson::{
    base_integral, base_integral_quadrature, coherent_info_unpolarized, default_quadrature,
    exchange_entropy, gram_spectrum, spinboson_channel, two_use_forgetfulness, Lorentzian,
    SpinBosonParams,
};

use common::*;

#[test]
fn markov_joint_matches_chain_product() {
    for n in 1..=6 {
        for &(p0, mu) in &[(0.85, 0.5), (0.6, 0.1), (0.95, 0.9), (0.5, 0.0)] {
            let params = MarkovParams::from_p0(p0, mu, n).unwrap();
            let joint = params.joint_distribution().unwrap();
            for (bits, &p) in joint.entries().iter().enumerate() {
                assert_abs_diff_eq!(p, chain_probability(p0, mu, bits as u64, n), epsilon = 1e-15);
                let symbols: Vec<PauliSymbol> = (0..n)
                    .map(|k| if (bits >> k) & 1 == 1 { PauliSymbol::Z } else { PauliSymbol::Identity })
                    .collect();
                assert_abs_diff_eq!(params.joint_probability(&symbols).unwrap(), p, epsilon = 1e-15);
            }
        }
    }
}

#[test]
fn markov_coherent_info_on_skewed_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        for _ in 0..5 {
            let (p0, mu) = (rng.random_range(0.5..1.0), rng.random::<f64>());
            let q = random_probabilities(1 << n, &mut rng).unwrap();
            let family = markov_kraus_family(&MarkovParams::from_p0(p0, mu, n).unwrap()).unwrap();
            let state = DiagonalState::new(n, q.clone()).unwrap();
            let library = coherent_information_diagonal(&family, &state).unwrap();
            let output_entropy = entropy_of(q.entries());
            let oracle = output_entropy - markov_w_entropy(p0, mu, n, q.entries());
            assert_abs_diff_eq!(library, oracle, epsilon = 1e-10);
        }
    }
}

#[test]
fn general_state_coherent_info_matches_kraus_oracle() {
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 3) as usize;
        let k = random_kraus_family(n, 3, &mut rng).unwrap();
        let rho = random_density_matrix(n, &mut rng).unwrap();
        let kraus: Vec<Vec<Complex64>> = (0..3)
            .map(|a| (0..k.dim()).map(|j| k.kraus_entry(a, j).unwrap()).collect())
            .collect();
        let library = coherent_information(&k, &rho).unwrap();
        assert_abs_diff_eq!(
            library.coherent_information,
            coherent_info_kraus(&kraus, rho.matrix()),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(library.entropy_exchange, vn_entropy(&w_matrix(&kraus, &rho)), epsilon = 1e-10);
    }
}

fn w_matrix(kraus: &[Vec<Complex64>], rho: &DensityMatrix) -> nalgebra::DMatrix<Complex64> {
    let m = rho.matrix();
    nalgebra::DMatrix::from_fn(kraus.len(), kraus.len(), |a, b| {
        (0..rho.dim()).map(|j| kraus[a][j] * m[(j, j)] * kraus[b][j].conj()).sum()
    })
}

#[test]
fn base_integral_against_frequency_oracle() {
    for &tau_c in &[1.0, 0.5, 2.0] {
        for &t in &[0.01, 0.3, 1.0, 4.0, 10.0, 100.0] {
            let t = t * tau_c;
            assert_abs_diff_eq!(base_integral(t, tau_c).unwrap(), lorentzian_f_by_frequency(t, tau_c), epsilon = 1e-8);
        }
    }
}

#[test]
fn base_integral_quadrature_over_range() {
    let cfg = default_quadrature();
    let spectrum = Lorentzian { tau_c: 1.0 };
    for i in 0..=50 {
        let t = 2.0 * i as f64;
        let quad = base_integral_quadrature(&spectrum, t, &cfg).unwrap();
        assert_abs_diff_eq!(quad, base_integral(t, 1.0).unwrap(), epsilon = 1e-8);
    }
}

#[test]
fn base_integral_asymptote_and_origin() {
    // F(t) = tau_c t - tau_c^2 + O(e^{-t/tau_c}) and F(t) ~ t^2 / 2 near 0.
    for &tau_c in &[0.5, 1.0, 3.0] {
        let t = 200.0 * tau_c;
        assert_abs_diff_eq!(base_integral(t, tau_c).unwrap(), tau_c * t - tau_c * tau_c, epsilon = 1e-9 * t);
        let small = 1e-6 * tau_c;
        let ratio = base_integral(small, tau_c).unwrap() / (small * small / 2.0);
        assert_abs_diff_eq!(ratio, 1.0, epsilon = 1e-6);
    }
}

#[test]
fn decoherence_table_matches_time_domain_oracle() {
    for &(lambda, tau_c, tau_p, tau) in &[
        (1.0, 1.0, 1.0, 1.0),
        (1.0, 1.0, 1.0, 0.0),
        (0.7, 2.0, 1.0, 0.3),
        (1.3, 0.5, 2.0, 1.5),
        (1.0, 1.0, 1.0, 19.0),
    ] {
        let n = 3;
        let params = SpinBosonParams::new(lambda, tau_c, tau_p, tau, n).unwrap();
        let channel = spinboson_channel(&params).unwrap();
        let oracle = BathOracle::new(lambda, tau_c, tau_p, tau, n).table();
        for j in 0..8 {
            for l in 0..8 {
                let d = channel.decoherence(j, l);
                assert_abs_diff_eq!(d.re, oracle[(j, l)], epsilon = 1e-10);
                assert_eq!(d.im, 0.0);
            }
        }
    }
}

#[test]
fn unpolarized_coherent_info_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=5 {
        for _ in 0..3 {
            let tau = rng.random_range(0.0..5.0);
            let tau_p = rng.random_range(0.5..2.0);
            let params = SpinBosonParams::new(1.0, 1.0, tau_p, tau, n).unwrap();
            let oracle = coherent_info_uniform(&BathOracle::new(1.0, 1.0, tau_p, tau, n).table());
            assert_abs_diff_eq!(coherent_info_unpolarized(&params).unwrap(), oracle, epsilon = 1e-9);
        }
    }
}

#[test]
fn long_spacing_factorizes() {
    let g = (-lorentzian_f_by_frequency(1.0, 1.0)).exp();
    let per_use = h2((1.0 + g) / 2.0);
    for n in 1..=6 {
        let params = SpinBosonParams::new(1.0, 1.0, 1.0, 50.0, n).unwrap();
        let s = exchange_entropy(&params, &DiagonalState::uniform(n).unwrap()).unwrap();
        assert_abs_diff_eq!(s, n as f64 * per_use, epsilon = 1e-2);
        // At this spacing the cross terms are e^{-50}; the match is far tighter.
        assert_abs_diff_eq!(s, n as f64 * per_use, epsilon = 1e-9);
    }
}

#[test]
fn gram_spectrum_is_a_distribution() {
    for n in 1..=8 {
        for &tau in &[0.0, 0.2, 1.0, 19.0] {
            let params = SpinBosonParams::new(1.0, 1.0, 1.0, tau, n).unwrap();
            let q = DiagonalState::uniform(n).unwrap();
            let spectrum = gram_spectrum(&params, &q).unwrap();
            assert!(spectrum.iter().all(|&x| x >= -1e-8), "n = {n}, tau = {tau}");
            assert_abs_diff_eq!(spectrum.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn gram_route_with_skewed_populations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let q = random_probabilities(1 << n, &mut rng).unwrap();
        let params = SpinBosonParams::new(1.0, 1.0, 1.0, 0.5, n).unwrap();
        let table = BathOracle::new(1.0, 1.0, 1.0, 0.5, n).table();
        let weights = q.entries();
        let gram = nalgebra::DMatrix::from_fn(1 << n, 1 << n, |j, l| {
            (weights[j] * weights[l]).sqrt() * table[(l, j)]
        });
        let oracle = entropy_of(nalgebra::SymmetricEigen::new(gram).eigenvalues.as_slice());
        let state = DiagonalState::new(n, q).unwrap();
        assert_abs_diff_eq!(exchange_entropy(&params, &state).unwrap(), oracle, epsilon = 1e-10);
    }
}

#[test]
fn two_use_product_and_entangled_inputs() {
    let single = SpinBosonParams::new(1.0, 1.0, 1.0, 1.0, 1).unwrap();
    let product = DensityMatrix::from_populations(&ProbVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    for idle in 0..4 {
        assert_eq!(two_use_forgetfulness(&single, idle, &product).unwrap().distance, 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::pure(&[c(s), c(0.0), c(0.0), c(s)]).unwrap();
    let g = (-(-1.0f64).exp()).exp();
    let report = two_use_forgetfulness(&single, 0, &bell).unwrap();
    assert!(report.distance <= 4.0 * g * g * (1.0 - (-1.0f64).exp()).powi(2) * (-1.0f64).exp());
    // Only the |00><11| coherence changes: distance = |exact - g^2| / 2.
    let pair = BathOracle::new(1.0, 1.0, 1.0, 1.0, 2);
    let exact = pair.factor(&[1, 1]);
    assert_abs_diff_eq!(report.distance, (g * g - exact).abs() / 2.0, epsilon = 1e-10);
}
