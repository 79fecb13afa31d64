mod common;

use common::{random_bases, rng};
use proptest::prelude::*;
use rand::Rng;
use weur_core::bounds::weighted_information_gain;
use weur_core::ensembles::{add_white_noise, haar_random_unitary, mub_bases, random_density_state, random_weights};
use weur_core::qmat::{invariant_information, ComplexMatrix, Povm, WeightedEnsemble};
use weur_core::viewop::{average_view, operator_norm, overlap_matrix, symmetric_spectrum, view_operator};

/// Rank-one POVM `|u_i><u_i|` from the first `d` rows of an `l x l` unitary; generally not equal-trace.
fn compressed_povm<R: Rng>(d: usize, l: usize, r: &mut R) -> Povm {
    let u = haar_random_unitary(l, r);
    let effects = (0..l)
        .map(|i| {
            let col: Vec<_> = (0..d).map(|k| u[(k, i)]).collect();
            ComplexMatrix::outer(&col)
        })
        .collect();
    Povm::new(effects).unwrap()
}

/// Equal mixture of two bases, an equal-trace POVM with `2d` outcomes.
fn two_basis_mixture(a: &Povm, b: &Povm) -> Povm {
    Povm::new(a.effects().iter().chain(b.effects()).map(|e| e.scale_real(0.5)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn view_operators_are_positive(d in 2usize..5, extra in 0usize..3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = compressed_povm(d, d + extra, &mut r);
        let spec = view_operator(&m).spectrum();
        prop_assert!(spec.iter().all(|&x| x >= -1e-9), "{spec:?}");
    }

    #[test]
    fn norm_lies_between_largest_weight_and_one(d in 2usize..5, count in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let bases = random_bases(d, count, &mut r);
        let w = random_weights(count, &mut r);
        let e = WeightedEnsemble::new(bases, w.clone()).unwrap();
        let g = operator_norm(&average_view(&e));
        let wmax = w.iter().copied().fold(0.0, f64::max);
        prop_assert!(g >= wmax - 1e-8 && g <= 1.0 + 1e-8, "g = {g}, wmax = {wmax}");
    }

    #[test]
    fn norm_matches_second_overlap_eigenvalue(d in 2usize..5, eta in 0.05f64..1.0, mix in any::<bool>(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let bases = random_bases(d, 2, &mut r);
        let m = if mix { two_basis_mixture(&bases[0], &bases[1]) } else { add_white_noise(&bases[0], eta).unwrap() };
        prop_assert!(m.is_equal_trace());
        let w = overlap_matrix(std::slice::from_ref(&m)).unwrap();
        let lambda2 = symmetric_spectrum(&w).unwrap()[1];
        prop_assert!((operator_norm(&view_operator(&m)) - lambda2).abs() < 1e-8);
    }

    #[test]
    fn information_gain_is_bounded_by_view_norm(d in 2usize..5, count in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let povms: Vec<Povm> = (0..count).map(|_| compressed_povm(d, d + r.random_range(0..2), &mut r)).collect();
        let l = povms[0].outcomes();
        let povms: Vec<Povm> = povms.into_iter().filter(|p| p.outcomes() == l).collect();
        let w = random_weights(povms.len(), &mut r);
        let e = WeightedEnsemble::new(povms, w).unwrap();
        let s = random_density_state(d, &mut r);
        let gain = weighted_information_gain(&e, &s).unwrap();
        prop_assert!(gain <= operator_norm(&average_view(&e)) * invariant_information(&s) + 1e-9);
    }

    #[test]
    fn noise_scales_view_norm_quadratically(d in 2usize..5, eta in 0.0f64..=1.0, seed in any::<u64>()) {
        let m = random_bases(d, 1, &mut rng(seed)).pop().unwrap();
        let clean = operator_norm(&view_operator(&m));
        let noisy = operator_norm(&view_operator(&add_white_noise(&m, eta).unwrap()));
        prop_assert!((noisy - eta * eta * clean).abs() < 1e-9);
    }
}

#[test]
fn mub_view_operators_are_orthogonal() {
    for d in [2, 3, 5] {
        let views: Vec<_> = mub_bases(d, d + 1).unwrap().iter().map(view_operator).collect();
        for a in 0..views.len() {
            for b in (a + 1)..views.len() {
                let overlap = views[a].matrix().hs_inner(views[b].matrix()).norm();
                assert!(overlap < 1e-9, "d={d} ({a},{b}): {overlap}");
            }
        }
    }
}
