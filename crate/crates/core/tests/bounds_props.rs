mod common;

use common::{random_bases, random_unit_axis, rng, weighted_entropy};
use proptest::prelude::*;
use rand::Rng;
use weur_core::bounds::{
    bound_q_alpha, bound_q_lmf, bound_q_lmf_best_order, bound_q_one, bound_q_s, bound_q_s_qubit, bound_q_scb,
    numerical_optimal_bound, pure_state_i_com,
};
use weur_core::ensembles::{mub_bases, mub_family, random_density_state, random_weights};
use weur_core::entropy::{binary_entropy, RenyiOrder};
use weur_core::qmat::{invariant_information, von_neumann_entropy, Povm, WeightedEnsemble};

fn random_ensemble<R: Rng>(d: usize, count: usize, r: &mut R) -> WeightedEnsemble {
    let bases = random_bases(d, count, r);
    let w = random_weights(count, r);
    WeightedEnsemble::new(bases, w).unwrap()
}

#[test]
fn dominance_chain_for_mubs() {
    for (d, theta) in [(2usize, 3usize), (3, 4), (5, 6)] {
        let e = mub_family(d, theta).unwrap();
        let i_com = pure_state_i_com(d);
        let t = theta as f64;
        let q_s = bound_q_s(e.povms(), i_com).unwrap();
        let q_1 = t * bound_q_one(&e, i_com).unwrap();
        let q_2 = t * bound_q_alpha(&e, i_com, RenyiOrder::Finite(2.0)).unwrap();
        let scb = bound_q_scb(e.povms(), 0.0).unwrap();
        let lmf = bound_q_lmf(e.povms(), 0.0).unwrap();
        let chain = [q_s, q_1, q_2, scb, lmf];
        assert!(chain.windows(2).all(|w| w[0] >= w[1] - 1e-9), "d={d} theta={theta}: {chain:?}");
    }
}

#[test]
fn named_qubit_sets_favour_the_sum_bound() {
    let (h, s3) = (0.5, 3f64.sqrt() / 2.0);
    let sets: [[[f64; 3]; 3]; 4] = [
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [h, 0.0, s3]],
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [s3, 0.0, h]],
        [[1.0, 0.0, 0.0], [s3, h, 0.0], [s3, 0.0, h]],
    ];
    for (i, axes) in sets.iter().enumerate() {
        let bases: Vec<Povm> = axes.iter().map(|&a| Povm::qubit_axis(a).unwrap()).collect();
        for k in 0..=100 {
            let radius = k as f64 / 100.0;
            let i_com = radius * radius / 2.0;
            let s_rho = binary_entropy((1.0 + radius) / 2.0).unwrap();
            let q_s = bound_q_s(&bases, i_com).unwrap();
            let scb = bound_q_scb(&bases, s_rho).unwrap();
            assert!(q_s >= scb - 1e-9, "set {} at r = {radius}: q_S {q_s} < q_SCB {scb}", i + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn realised_entropies_respect_every_bound(d in 2usize..=3, count in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_ensemble(d, count, &mut r);
        let s = random_density_state(d, &mut r);
        let i_com = invariant_information(&s).max(0.0);
        let s_rho = von_neumann_entropy(&s);
        for order in [RenyiOrder::Finite(2.0), RenyiOrder::Finite(3.0), RenyiOrder::Infinity] {
            prop_assert!(weighted_entropy(&e, &s, order) >= bound_q_alpha(&e, i_com, order).unwrap() - 1e-7);
        }
        prop_assert!(weighted_entropy(&e, &s, RenyiOrder::Shannon) >= bound_q_one(&e, i_com).unwrap() - 1e-7);
        let equal = WeightedEnsemble::equal_weights(e.povms().to_vec()).unwrap();
        let sum = count as f64 * weighted_entropy(&equal, &s, RenyiOrder::Shannon);
        prop_assert!(sum >= bound_q_s(e.povms(), i_com).unwrap() - 1e-7);
        prop_assert!(sum >= bound_q_lmf_best_order(e.povms(), s_rho).unwrap() - 1e-7);
        prop_assert!(sum >= bound_q_scb(e.povms(), s_rho).unwrap() - 1e-7);
    }

    #[test]
    fn sum_bound_decreases_with_information(d in 2usize..=4, count in 2usize..=4, seed in any::<u64>()) {
        let bases = random_bases(d, count, &mut rng(seed));
        let max = pure_state_i_com(d);
        let values: Vec<f64> = (0..=40).map(|k| bound_q_s(&bases, max * k as f64 / 40.0).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{values:?}");
    }

    #[test]
    fn qubit_closed_form_agrees(count in 2usize..=5, radius in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut r = rng(seed);
        let bases: Vec<Povm> = (0..count).map(|_| Povm::qubit_axis(random_unit_axis(&mut r)).unwrap()).collect();
        let i_com = radius * radius / 2.0;
        let general = bound_q_s(&bases, i_com).unwrap();
        let closed = bound_q_s_qubit(&bases, i_com).unwrap();
        prop_assert!((general - closed).abs() < 1e-9, "{general} vs {closed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimal_bound_dominates_closed_forms(d in 2usize..=3, count in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_ensemble(d, count, &mut r);
        let i_com = pure_state_i_com(d);
        let b1 = numerical_optimal_bound(&e, RenyiOrder::Shannon, 16, seed).unwrap().value;
        let b2 = numerical_optimal_bound(&e, RenyiOrder::Finite(2.0), 16, seed).unwrap().value;
        prop_assert!(b1 >= bound_q_one(&e, i_com).unwrap() - 1e-6);
        prop_assert!(b2 >= bound_q_alpha(&e, i_com, RenyiOrder::Finite(2.0)).unwrap() - 1e-6);

        let equal = WeightedEnsemble::equal_weights(e.povms().to_vec()).unwrap();
        let sum = count as f64 * numerical_optimal_bound(&equal, RenyiOrder::Shannon, 16, seed).unwrap().value;
        prop_assert!(sum >= bound_q_s(e.povms(), i_com).unwrap() - 1e-6);
        prop_assert!(sum >= bound_q_lmf_best_order(e.povms(), 0.0).unwrap() - 1e-6);
        prop_assert!(sum >= bound_q_scb(e.povms(), 0.0).unwrap() - 1e-6);
    }
}

#[test]
fn optimal_bound_is_tight_for_qubit_mubs() {
    let bases = mub_bases(2, 3).unwrap();
    let e = WeightedEnsemble::equal_weights(bases).unwrap();
    let b = numerical_optimal_bound(&e, RenyiOrder::Shannon, 16, 3).unwrap();
    assert!((3.0 * b.value - 2.0).abs() < 1e-4, "{}", b.value);
}
