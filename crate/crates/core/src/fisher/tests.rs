use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::criteria::gamma_factor;
use crate::estimation::evolve;
use crate::qstate::{collective_spin, j_n, local_generator, Axis, SpinDirection, Tensor};
use crate::statezoo::{dicke, duer, ghz, ones, plus, psi_s4, random_pure_state, smolin, Sign};

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn assert_gamma(g: &GammaC, expected: [[f64; 3]; 3], tol: f64) {
    for i in 0..3 {
        for j in 0..3 {
            assert_close(g.entry(i, j), expected[i][j], tol);
        }
    }
}

fn diag(x: f64, y: f64, z: f64) -> [[f64; 3]; 3] {
    [[x, 0.0, 0.0], [0.0, y, 0.0], [0.0, 0.0, z]]
}

fn random_direction<R: Rng>(rng: &mut R) -> SpinDirection {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if let Ok(d) = SpinDirection::normalized(v) {
            return d;
        }
    }
}

/// Mixture of `rank` Haar-random pure states with random weights.
fn random_mixed<R: Rng>(n: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let mut rho = random_pure_state(n, rng).unwrap().to_density();
    let mut total = 1.0;
    for _ in 1..rank {
        let w: f64 = rng.random_range(0.1..1.0);
        let next = random_pure_state(n, rng).unwrap().to_density();
        rho = rho.mix(&next, total / (total + w)).unwrap();
        total += w;
    }
    rho
}

#[test]
fn qfi_of_ghz_is_n_squared() {
    for n in 2..=8 {
        let rho = ghz(n, 0.0).unwrap().to_density();
        let f = qfi(&rho, &collective_spin(n, Axis::Z)).unwrap();
        assert_close(f, (n * n) as f64, 1e-8);
    }
}

#[test]
fn qfi_of_eigenstate_vanishes() {
    for n in 1..=5 {
        let rho = ones(n).unwrap().to_density();
        assert_close(qfi(&rho, &collective_spin(n, Axis::Z)).unwrap(), 0.0, 1e-12);
    }
}

#[test]
fn qfi_of_noisy_ghz_follows_gamma_factor() {
    let psi = ghz(4, 0.0).unwrap();
    for p in [0.3, 0.5, 0.9] {
        let rho = DensityMatrix::mix_with_identity(&psi, p).unwrap();
        let f = qfi(&rho, &collective_spin(4, Axis::Z)).unwrap();
        // closed form p² 2^{N−1} / (p(2^{N−1} − 1) + 1) times N²
        let expected = 16.0 * p * p * 8.0 / (p * 7.0 + 1.0);
        assert_close(f, expected, 1e-8);
        assert_close(f, 16.0 * gamma_factor(p, 4).unwrap(), 1e-8);
    }
}

#[test]
fn qfi_rejects_dimension_mismatch() {
    let rho = ghz(3, 0.0).unwrap().to_density();
    assert!(matches!(qfi(&rho, &collective_spin(2, Axis::Z)), Err(Error::DimensionMismatch(8, 4))));
}

#[test]
fn gamma_c_table_entries() {
    for n in 1..=5 {
        let nf = n as f64;
        assert_gamma(&gamma_c(&ones(n).unwrap().to_density()), diag(nf, nf, 0.0), 1e-9);
        assert_gamma(&gamma_c_pure(&ones(n).unwrap()), diag(nf, nf, 0.0), 1e-9);
    }
    assert_gamma(&gamma_c(&dicke(4, 2).unwrap().to_density()), diag(12.0, 12.0, 0.0), 1e-9);
    assert_gamma(&gamma_c_pure(&dicke(4, 2).unwrap()), diag(12.0, 12.0, 0.0), 1e-9);
}

#[test]
fn gamma_c_of_three_qubit_duer_state() {
    // Only GHZ_0–(1_l, 0_l) pairs with weight 1/24 and GHZ_π–(1_l, 0_l) pairs
    // with weight 1/8 contribute to the xx entry: 2·2·6·(1/8)(1/24 + 1/8) = 1/2.
    assert_gamma(&gamma_c(&duer(3, 0.0).unwrap()), diag(0.5, 0.5, 2.25), 1e-9);
}

#[test]
fn gamma_c_of_duer_states() {
    for n in 4..=8 {
        let nf = n as f64;
        let t = nf * (3.0 * nf - 1.0) / (3.0 * nf + 3.0);
        let g = gamma_c(&duer(n, 0.0).unwrap());
        assert_gamma(&g, diag(t, t, nf * nf / (nf + 1.0)), 1e-8);
        assert_close(g.fq_avg(), (9.0 * nf - 2.0) / (9.0 * nf + 9.0) * nf, 1e-8);
    }
}

#[test]
fn gamma_c_diagonal_matches_qfi() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let rho = random_mixed(3, 3, &mut rng);
        let g = gamma_c(&rho);
        for axis in Axis::ALL {
            let f = qfi(&rho, &collective_spin(3, axis)).unwrap();
            assert_close(g.entry(axis.index(), axis.index()), f, 1e-8);
        }
    }
}

#[test]
fn fq_max_examples() {
    let (v, dir) = fq_max(&ghz(4, 0.0).unwrap().to_density());
    assert_close(v, 16.0, 1e-9);
    assert_close(dir.components()[2].abs(), 1.0, 1e-9);

    let g = gamma_c_pure(&psi_s4(Sign::Plus));
    assert_gamma(&g, diag(8.0, 8.0, 8.0), 1e-9);
    assert_close(g.fq_max().0, 8.0, 1e-9);
    assert_close(fq_max(&smolin(2).unwrap()).0, 4.0, 1e-9);
}

#[test]
fn fq_max_is_at_least_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let rho = random_mixed(3, 2, &mut rng);
        assert!(fq_max(&rho).0 >= fq_avg(&rho) - 1e-12);
    }
}

#[test]
fn fq_avg_examples() {
    assert_close(fq_avg(&ghz(4, 0.0).unwrap().to_density()), 8.0, 1e-9);
    assert_close(fq_avg(&ones(4).unwrap().to_density()), 8.0 / 3.0, 1e-9);
    assert_close(fq_avg(&duer(4, 0.0).unwrap()), 136.0 / 45.0, 1e-9);
}

#[test]
fn montecarlo_average_converges() {
    let rho = ghz(4, 0.0).unwrap().to_density();
    let mc = fq_avg_montecarlo(&rho, 10_000, 1).unwrap();
    assert_close(mc, 8.0, 0.3);
}

#[test]
fn montecarlo_average_is_exact_for_isotropic_states() {
    let rho = psi_s4(Sign::Minus).to_density();
    for k in [1, 7, 100] {
        assert_close(fq_avg_montecarlo(&rho, k, 3).unwrap(), 8.0, 1e-9);
    }
}

#[test]
fn montecarlo_average_is_reproducible() {
    let rho = dicke(3, 1).unwrap().to_density();
    let a = fq_avg_montecarlo(&rho, 1, 42).unwrap();
    let b = fq_avg_montecarlo(&rho, 1, 42).unwrap();
    assert_eq!(a, b);
    assert!(fq_avg_montecarlo(&rho, 0, 42).is_err());
}

#[test]
fn parity_readout_of_ghz_saturates_qfi() {
    for n in 2..=6 {
        let rho = ghz(n, 0.0).unwrap().to_density();
        let h = collective_spin(n, Axis::Z);
        let povm = Povm::parity(n, Axis::X);
        let theta = std::f64::consts::PI / (4.0 * n as f64);
        let f = classical_fisher(&rho, &h, &povm, theta, DEFAULT_DTHETA).unwrap();
        let n2 = (n * n) as f64;
        assert_close(f, n2, 1e-5 * n2);
    }
}

#[test]
fn computational_readout_carries_no_phase_information() {
    let rho = ghz(3, 0.0).unwrap().to_density();
    let f = classical_fisher(&rho, &collective_spin(3, Axis::Z), &Povm::computational(3), 0.4, DEFAULT_DTHETA).unwrap();
    assert_close(f, 0.0, 1e-9);
}

#[test]
fn product_state_readout_is_shot_noise_bounded() {
    for n in 1..=4 {
        let rho = plus(n).unwrap().to_density();
        let h = collective_spin(n, Axis::Z);
        let f = classical_fisher(&rho, &h, &Povm::product_basis(n, Axis::X), 0.1, DEFAULT_DTHETA).unwrap();
        assert!(f <= n as f64 + 1e-6, "{f}");
        assert!(f <= qfi(&rho, &h).unwrap() + 1e-4);
    }
}

#[test]
fn classical_fisher_matches_explicit_evolution() {
    // probabilities from evolving the density matrix directly
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rho = random_mixed(2, 2, &mut rng);
    let h = collective_spin(2, Axis::Y);
    let povm = Povm::product_basis(2, Axis::X);
    let (theta, dt) = (0.7, 1e-5);
    let p0 = povm.probabilities(&evolve(&rho, &h, theta).unwrap()).unwrap();
    let pp = povm.probabilities(&evolve(&rho, &h, theta + dt).unwrap()).unwrap();
    let pm = povm.probabilities(&evolve(&rho, &h, theta - dt).unwrap()).unwrap();
    let expected: f64 = (0..p0.len())
        .filter(|&i| p0[i] >= MIN_PROBABILITY)
        .map(|i| ((pp[i] - pm[i]) / (2.0 * dt)).powi(2) / p0[i])
        .sum();
    let f = classical_fisher(&rho, &h, &povm, theta, dt).unwrap();
    assert_close(f, expected, 1e-6 * (1.0 + expected));
    assert!(classical_fisher(&rho, &h, &povm, theta, 0.0).is_err());
}

#[test]
fn local_optimum_for_ghz_is_collective() {
    for n in 2..=5 {
        let opt = optimize_local_directions(&ghz(n, 0.0).unwrap(), &SeeSawOptions::default(), 1);
        assert_close(opt.value, (n * n) as f64, 1e-8);
        // for N = 2 any pair of directions with n_2 the reflection of n_1 works
        if n == 2 {
            continue;
        }
        for d in &opt.directions {
            assert_close(d.components()[2].abs(), 1.0, 1e-6);
        }
    }
}

#[test]
fn local_optimum_for_product_state() {
    let psi = plus(1).unwrap().tensor(&ones(1).unwrap()).unwrap();
    let opt = optimize_local_directions(&psi, &SeeSawOptions::default(), 2);
    assert_close(opt.value, 2.0, 1e-8);
    // fq_max is smaller: no common direction is orthogonal to both Bloch vectors' optimum
    assert!(fq_max(&psi.to_density()).0 <= opt.value + 1e-12);
}

#[test]
fn local_optimum_equals_collective_for_symmetric_states() {
    let states = [dicke(4, 2).unwrap(), dicke(3, 1).unwrap(), psi_s4(Sign::Plus), ghz(3, 0.7).unwrap(), plus(3).unwrap()];
    for psi in &states {
        let opt = optimize_local_directions(psi, &SeeSawOptions::default(), 9);
        assert_close(opt.value, gamma_c_pure(psi).fq_max().0, 1e-8);
    }
}

#[test]
fn local_optimum_value_is_attained() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let psi = random_pure_state(3, &mut rng).unwrap();
        let opt = optimize_local_directions(&psi, &SeeSawOptions::default(), 4);
        let h = local_generator(&opt.directions).unwrap();
        assert_close(opt.value, qfi_pure(&psi, &h).unwrap(), 1e-8);
        assert!(opt.value >= gamma_c_pure(&psi).fq_max().0 - 1e-8);
    }
    let rho = random_mixed(2, 2, &mut rng);
    assert!(optimize_local_directions_mixed(&rho, &SeeSawOptions::default(), 0).is_err());
}

#[test]
fn pure_and_mixed_gamma_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 1..=4 {
        let psi = random_pure_state(n, &mut rng).unwrap();
        let a = gamma_c_pure(&psi);
        let b = gamma_c(&psi.to_density());
        assert!(a.max_deviation(&b) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qfi_is_convex(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = random_mixed(2, 2, &mut rng);
        let r2 = random_mixed(2, 3, &mut rng);
        let h = j_n(2, &random_direction(&mut rng));
        let mix = r1.mix(&r2, p).unwrap();
        let lhs = qfi(&mix, &h).unwrap();
        let rhs = p * qfi(&r1, &h).unwrap() + (1.0 - p) * qfi(&r2, &h).unwrap();
        prop_assert!(lhs <= rhs + 1e-8);
    }

    #[test]
    fn qfi_reduces_to_variance_for_pure_states(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure_state(3, &mut rng).unwrap();
        let dirs: Vec<SpinDirection> = (0..3).map(|_| random_direction(&mut rng)).collect();
        let h = local_generator(&dirs).unwrap();
        let f = qfi(&psi.to_density(), &h).unwrap();
        prop_assert!((f - 4.0 * psi.variance(&h).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn quadratic_form_gives_directional_qfi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(3, 2, &mut rng);
        let n = random_direction(&mut rng);
        let f = qfi(&rho, &j_n(3, &n)).unwrap();
        prop_assert!((f - gamma_c(&rho).quadratic_form(&n)).abs() < 1e-8);
    }

    #[test]
    fn collective_rotations_preserve_fq_max(seed in any::<u64>(), angle in 0.0f64..6.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(3, 2, &mut rng);
        let axis = random_direction(&mut rng);
        let u = crate::estimation::phase_unitary(&j_n(3, &axis), angle);
        let rotated = rho.conjugate_by(&u);
        prop_assert!((fq_max(&rotated).0 - fq_max(&rho).0).abs() < 1e-8);
        prop_assert!((fq_avg(&rotated) - fq_avg(&rho)).abs() < 1e-8);
    }

    #[test]
    fn white_noise_scales_gamma(seed in any::<u64>(), p in 0.0f64..=1.0, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure_state(n, &mut rng).unwrap();
        let noisy = gamma_c(&DensityMatrix::mix_with_identity(&psi, p).unwrap());
        let scaled = gamma_c_pure(&psi).scaled(gamma_factor(p, n).unwrap());
        prop_assert!(noisy.max_deviation(&scaled) < 1e-8);
    }

    #[test]
    fn gamma_trace_is_bounded(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gamma_c(&random_mixed(n, 2, &mut rng));
        let nf = n as f64;
        prop_assert!(g.trace() <= nf * nf + 2.0 * nf + 1e-6);
        prop_assert!(g.eigenvalues().iter().all(|&l| l >= -1e-9));
    }
}
