mod common;

use proptest::prelude::*;
use std::f64::consts::FRAC_PI_4;
use weur_core::ensembles::{
    haar_random_bases, mub_family, pauli_triple, qubit_family, qutrit_four_bases, BasisSpec, QutritPhase,
};
use weur_core::qmat::{validate_ensemble, ComplexMatrix, WeightedEnsemble};

fn assert_valid(e: &WeightedEnsemble) {
    let raw: Vec<Vec<ComplexMatrix>> = e.povms().iter().map(|m| m.effects().to_vec()).collect();
    let diag = validate_ensemble(&raw, e.weights());
    assert!(diag.is_valid(), "{:?}", diag.violations);
    assert!(diag.equal_trace.iter().all(|&b| b));
}

#[test]
fn fixed_constructors_validate() {
    assert_valid(&pauli_triple());
    for d in [2usize, 3, 5, 7, 11] {
        for count in 1..=d + 1 {
            assert_valid(&mub_family(d, count).unwrap());
        }
    }
    let bases = mub_family(11, 12).unwrap();
    let mut max_dev = 0.0f64;
    for (a, ma) in bases.povms().iter().enumerate() {
        for mb in &bases.povms()[a + 1..] {
            for ea in ma.effects() {
                for eb in mb.effects() {
                    max_dev = max_dev.max((ea.trace_product(eb).re - 1.0 / 11.0).abs());
                }
            }
        }
    }
    assert!(max_dev < 1e-10, "{max_dev}");
}

#[test]
fn basis_specs_build_their_families() {
    let specs = [
        BasisSpec::Pauli,
        BasisSpec::QubitFamily { beta1: 0.2, beta2: 1.0 },
        BasisSpec::Mub { d: 5, count: 3 },
        BasisSpec::QutritFour { beta: FRAC_PI_4, phase: QutritPhase::Quadratic },
        BasisSpec::Haar { d: 4, count: 3, seed: 9 },
    ];
    for spec in specs {
        assert_valid(&spec.build().unwrap());
    }
    assert!(BasisSpec::Mub { d: 6, count: 2 }.build().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parametric_families_validate(b1 in -3.2f64..3.2, b2 in -3.2f64..3.2, beta in 0.0f64..=FRAC_PI_4) {
        assert_valid(&qubit_family(b1, b2));
        assert_valid(&qutrit_four_bases(beta).unwrap());
    }

    #[test]
    fn haar_bases_are_seed_deterministic(d in 2usize..6, count in 1usize..5, seed in any::<u64>()) {
        let a = haar_random_bases(d, count, seed).unwrap();
        assert_valid(&a);
        prop_assert_eq!(&a, &haar_random_bases(d, count, seed).unwrap());
        prop_assert_ne!(&a, &haar_random_bases(d, count, seed.wrapping_add(1)).unwrap());
    }
}
