//! Randomized invariant suites: every physical identity the library relies
//! on, checked over seeded random draws so failures reproduce exactly.

use lra_core::ent::{
    entanglement_entropy, relative_entropy_strict, relative_entropy_support_projected,
    von_neumann_entropy,
};
use lra_core::locc::{simulate, simulate_density, Answer};
use lra_core::lra::{product_authentication_protocol, verify_authentication, LraScenario};
use lra_core::measure::{validate_povm, Instrument, Povm};
use lra_core::qcore::{
    is_psd, kron, max_abs, phi_plus, schmidt_decomposition, Bipartition, CMatrix, DensityOperator,
    PartyLayout, PureState,
};
use lra_core::random::{
    haar_unitary, orthogonal_completion, random_instrument, random_orthonormal_set,
    random_product_state, random_state, random_tree, rng_from_seed,
};
use num_complex::Complex64;
use rand::Rng;

/// Layout pool with total dimension at most 36.
fn random_layout<R: Rng + ?Sized>(rng: &mut R, max_parties: usize, max_dim: usize) -> PartyLayout {
    loop {
        let parties = rng.random_range(1..=max_parties);
        let dims: Vec<usize> = (0..parties).map(|_| rng.random_range(2..=4)).collect();
        if dims.iter().product::<usize>() <= max_dim {
            return PartyLayout::new(dims).expect("dims at least 2");
        }
    }
}

#[test]
fn maximally_entangled_state_absorbs_u_tensor_u_conjugate() {
    let mut rng = rng_from_seed(70);
    for d in [2usize, 3, 4, 6] {
        let layout = PartyLayout::new(vec![d, d]).unwrap();
        let state = phi_plus(&layout).unwrap();
        for _ in 0..50 {
            let u = haar_unitary(&mut rng, d);
            let u_conj = u.map(|z| z.conj());
            let moved = kron(&u, &u_conj) * state.amplitudes();
            let distance = (moved - state.amplitudes()).norm();
            assert!(distance < 1e-9, "dimension {d}: distance {distance}");
        }
    }
}

#[test]
fn schmidt_decomposition_reconstructs_random_states() {
    let mut rng = rng_from_seed(71);
    for _ in 0..1000 {
        let layout = random_layout(&mut rng, 3, 36);
        if layout.num_parties() < 2 {
            continue;
        }
        let state = random_state(&mut rng, &layout);
        let party = rng.random_range(0..layout.num_parties());
        let cut = Bipartition::single_party(&layout, party).unwrap();
        let decomposition = schmidt_decomposition(&state, &cut).unwrap();
        // reconstruction lives on the (left, right) party ordering
        let order: Vec<usize> = std::iter::once(party)
            .chain((0..layout.num_parties()).filter(|&p| p != party))
            .collect();
        let permuted = state.permute_parties(&order).unwrap();
        let reconstructed = decomposition.reconstruct();
        assert!(permuted.max_amplitude_distance(&reconstructed) < 1e-9);
        let weight: f64 = decomposition.coefficients.iter().map(|c| c * c).sum();
        assert!((weight - 1.0).abs() < 1e-9);
        for pair in decomposition.coefficients.windows(2) {
            assert!(pair[0] >= pair[1] - 1e-12, "coefficients must descend");
        }
    }
}

#[test]
fn born_distributions_of_random_trees_are_normalized() {
    let mut rng = rng_from_seed(72);
    for _ in 0..1000 {
        let layout = random_layout(&mut rng, 3, 24);
        let tree = random_tree(&mut rng, &layout, 4);
        let state = random_state(&mut rng, &layout);
        let simulation = simulate(&tree, &state).unwrap();
        let total = simulation.distribution.total() + simulation.pruned_mass;
        assert!((total - 1.0).abs() < 1e-9, "total mass {total}");
        // transcripts and the distribution are two views of the same runs
        for answer in [Answer::Bit(0), Answer::Bit(1)] {
            let from_transcripts: f64 = simulation
                .transcripts
                .iter()
                .filter(|t| t.answer == answer)
                .map(|t| t.probability)
                .sum();
            let from_distribution = simulation.distribution.probability(&answer);
            assert!((from_transcripts - from_distribution).abs() < 1e-9);
        }
    }
}

#[test]
fn density_simulation_is_linear_in_the_mixture() {
    let mut rng = rng_from_seed(73);
    for _ in 0..100 {
        let layout = random_layout(&mut rng, 2, 12);
        let tree = random_tree(&mut rng, &layout, 3);
        let a = random_state(&mut rng, &layout);
        let b = random_state(&mut rng, &layout);
        let weight = rng.random_range(0.1..0.9);
        let mixture =
            DensityOperator::mixture(&[(weight, a.clone()), (1.0 - weight, b.clone())]).unwrap();
        let mixed = simulate_density(&tree, &mixture).unwrap();
        let from_a = simulate(&tree, &a).unwrap().distribution;
        let from_b = simulate(&tree, &b).unwrap().distribution;
        for answer in [Answer::Bit(0), Answer::Bit(1)] {
            let expected =
                weight * from_a.probability(&answer) + (1.0 - weight) * from_b.probability(&answer);
            assert!((mixed.probability(&answer) - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn random_instruments_form_valid_povms() {
    let mut rng = rng_from_seed(74);
    for _ in 0..500 {
        let dim = rng.random_range(2..=6);
        let outcomes = rng.random_range(2..=4);
        let instrument = random_instrument(&mut rng, dim, outcomes).unwrap();
        let effects: Vec<CMatrix> = instrument.kraus().iter().map(|k| k.adjoint() * k).collect();
        let povm = Povm::new(effects).unwrap();
        let validation = validate_povm(&povm);
        assert!(validation.is_valid(), "{:?}", validation.violations);
    }
}

#[test]
fn projective_measurements_are_repeatable() {
    let mut rng = rng_from_seed(75);
    for _ in 0..100 {
        let layout = random_layout(&mut rng, 2, 12);
        let party = rng.random_range(0..layout.num_parties());
        let dim = layout.dims()[party];
        let basis_layout = PartyLayout::new(vec![dim]).unwrap();
        let vectors: Vec<_> = random_orthonormal_set(&mut rng, &basis_layout, dim)
            .unwrap()
            .into_iter()
            .map(|s| s.amplitudes().clone())
            .collect();
        let instrument = Instrument::rank_one_projectors(&vectors, dim).unwrap();
        let state = random_state(&mut rng, &layout);
        let first = lra_core::measure::born_probabilities(&instrument, party, &state).unwrap();
        for branch in first {
            let Some(post) = branch.post_state else {
                continue;
            };
            // measuring again leaves the state in the same branch
            let again = lra_core::measure::born_probabilities(&instrument, party, &post).unwrap();
            for repeat in again {
                let expected = if repeat.label == branch.label {
                    1.0
                } else {
                    0.0
                };
                assert!(
                    (repeat.probability - expected).abs() < 1e-9,
                    "outcome {} after {}: probability {}",
                    repeat.label,
                    branch.label,
                    repeat.probability
                );
            }
        }
    }
}

#[test]
fn relative_entropy_is_nonnegative_and_faithful() {
    let mut rng = rng_from_seed(76);
    for _ in 0..200 {
        let d = rng.random_range(2..=5);
        let layout = PartyLayout::new(vec![d]).unwrap();
        // full-rank sigma: mixture over a random orthonormal basis
        let basis = random_orthonormal_set(&mut rng, &layout, d).unwrap();
        let weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let sigma_components: Vec<(f64, PureState)> = basis
            .iter()
            .zip(&weights)
            .map(|(s, &w)| (w / total, s.clone()))
            .collect();
        let sigma = DensityOperator::mixture(&sigma_components).unwrap();
        let rho = random_state(&mut rng, &layout).density();

        let strict = relative_entropy_strict(&rho, &sigma).unwrap();
        assert!(!strict.support_violation, "sigma is full rank");
        assert!(strict.value > -1e-9, "Klein inequality: {}", strict.value);
        let projected = relative_entropy_support_projected(&rho, &sigma).unwrap();
        assert!((strict.value - projected.value).abs() < 1e-9);

        let self_distance = relative_entropy_strict(&sigma, &sigma).unwrap();
        assert!(self_distance.value.abs() < 1e-9);
    }
}

#[test]
fn entanglement_entropy_matches_the_reduced_spectrum() {
    let mut rng = rng_from_seed(77);
    for _ in 0..500 {
        let layout = random_layout(&mut rng, 3, 36);
        if layout.num_parties() < 2 {
            continue;
        }
        let state = random_state(&mut rng, &layout);
        let party = rng.random_range(0..layout.num_parties());
        let cut = Bipartition::single_party(&layout, party).unwrap();
        let from_schmidt = entanglement_entropy(&state, &cut).unwrap();
        let reduced = state.density().partial_trace(&[party]).unwrap();
        let from_spectrum = von_neumann_entropy(&reduced);
        assert!(
            (from_schmidt - from_spectrum).abs() < 1e-9,
            "schmidt {from_schmidt} vs spectrum {from_spectrum}"
        );
        assert!(is_psd(reduced.matrix(), 1e-9));
    }
}

#[test]
fn authentication_reports_match_direct_simulation() {
    let mut rng = rng_from_seed(78);
    let layout = PartyLayout::qubits(2).unwrap();
    for _ in 0..100 {
        let count = rng.random_range(2..=4);
        let states = random_orthonormal_set(&mut rng, &layout, count).unwrap();
        let scenario = LraScenario::new(states.clone()).unwrap();
        let tree = random_tree(&mut rng, &layout, 2);
        let question = rng.random_range(0..count);
        let report = verify_authentication(&scenario, question, &tree).unwrap();
        for (j, state) in states.iter().enumerate() {
            let direct = simulate(&tree, state)
                .unwrap()
                .distribution
                .probability(&Answer::Bit(1));
            assert!((report.answer_one_probabilities[j] - direct).abs() < 1e-12);
        }
        let claimed = report.verified;
        let recomputed =
            report.target_probability() >= 1.0 - 1e-9 && report.max_off_target() <= 1e-9;
        assert_eq!(claimed, recomputed);
    }
}

#[test]
fn product_members_of_random_completions_authenticate() {
    let mut rng = rng_from_seed(79);
    for _ in 0..50 {
        let layout = random_layout(&mut rng, 3, 16);
        let product = random_product_state(&mut rng, &layout);
        let count = rng.random_range(2..=layout.total_dim().min(4));
        let basis = orthogonal_completion(&mut rng, &[product]).unwrap();
        let scenario = LraScenario::new(basis[..count].to_vec()).unwrap();
        let tree = product_authentication_protocol(&scenario, 0).unwrap();
        let report = verify_authentication(&scenario, 0, &tree).unwrap();
        assert!(
            report.verified,
            "target {} off {}",
            report.target_probability(),
            report.max_off_target()
        );
    }
}

#[test]
fn two_copy_ensembles_stay_positive_under_mixing() {
    let mut rng = rng_from_seed(80);
    let layout = PartyLayout::new(vec![3, 3]).unwrap();
    for _ in 0..20 {
        let states = random_orthonormal_set(&mut rng, &layout, 4).unwrap();
        let ensemble = lra_core::ent::randomized_two_copy_ensemble(&states).unwrap();
        assert!(is_psd(ensemble.matrix(), 1e-9));
        assert!((ensemble.trace().re - 1.0).abs() < 1e-9);
        assert!(ensemble.trace().im.abs() < 1e-12);
        assert_eq!(ensemble.layout().dims(), &[3, 3, 3, 3]);
    }
}

#[test]
fn haar_moments_match_the_uniform_measure() {
    // E |u_00|^2 = 1/d for a Haar unitary; a cheap distributional check
    let mut rng = rng_from_seed(81);
    let d = 3;
    let samples = 2000;
    let mean: f64 = (0..samples)
        .map(|_| haar_unitary(&mut rng, d)[(0, 0)].norm_sqr())
        .sum::<f64>()
        / samples as f64;
    assert!(
        (mean - 1.0 / d as f64).abs() < 0.02,
        "mean |u00|^2 = {mean}, expected {}",
        1.0 / d as f64
    );
}

#[test]
fn local_unitaries_preserve_born_statistics_elsewhere() {
    // measuring party 0 commutes with a unitary rotation applied on party 1
    let mut rng = rng_from_seed(82);
    for _ in 0..50 {
        let layout = PartyLayout::new(vec![2, 3]).unwrap();
        let state = random_state(&mut rng, &layout);
        let u = haar_unitary(&mut rng, 3);
        let rotated_amplitudes = kron(&CMatrix::identity(2, 2), &u) * state.amplitudes();
        let rotated = PureState::from_vector(layout.clone(), rotated_amplitudes).unwrap();
        let instrument = random_instrument(&mut rng, 2, 2).unwrap();
        let before = lra_core::measure::born_probabilities(&instrument, 0, &state).unwrap();
        let after = lra_core::measure::born_probabilities(&instrument, 0, &rotated).unwrap();
        for (b, a) in before.iter().zip(&after) {
            assert!((b.probability - a.probability).abs() < 1e-9);
        }
    }
}

#[test]
fn answer_relabeling_preserves_total_mass() {
    let mut rng = rng_from_seed(83);
    for _ in 0..50 {
        let layout = random_layout(&mut rng, 2, 9);
        let tree = random_tree(&mut rng, &layout, 3);
        let state = random_state(&mut rng, &layout);
        let relabeled = tree.map_answers(&|a| match a {
            Answer::Bit(1) => Answer::Label("hit".into()),
            _ => Answer::Inconclusive,
        });
        let original = simulate(&tree, &state).unwrap();
        let mapped = simulate(&relabeled, &state).unwrap();
        let one = original.distribution.probability(&Answer::Bit(1));
        let hit = mapped
            .distribution
            .probability(&Answer::Label("hit".into()));
        assert!((one - hit).abs() < 1e-12);
        assert!((original.distribution.total() - mapped.distribution.total()).abs() < 1e-12);
    }
}

#[test]
fn phi_plus_reduced_state_is_maximally_mixed() {
    for d in [2usize, 3, 5] {
        let layout = PartyLayout::new(vec![d, d]).unwrap();
        let state = phi_plus(&layout).unwrap();
        let reduced = state.density().partial_trace(&[0]).unwrap();
        let flat = CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        assert!(max_abs(&(reduced.matrix().clone() - flat)) < 1e-12);
    }
}
