mod common;

use common::{ic, random_distribution, rng, saturating_configuration, shannon, shannon_sum_bruteforce};
use proptest::prelude::*;
use rand::Rng;
use weur_core::entropy::{
    q_alpha_estimate, q_one_estimate, renyi_entropy, shannon_floor_h, shannon_floor_multi, RenyiOrder,
};

const ORDERS: [RenyiOrder; 4] =
    [RenyiOrder::Finite(2.0), RenyiOrder::Finite(3.0), RenyiOrder::Finite(5.0), RenyiOrder::Infinity];

/// Dirichlet sample raised to a power and renormalised, to reach near-deterministic corners.
fn sharpened(l: usize, power: f64, seed: u64) -> Vec<f64> {
    let p: Vec<f64> = random_distribution(l, &mut rng(seed)).into_iter().map(|x| x.powf(power)).collect();
    let s: f64 = p.iter().sum();
    p.into_iter().map(|x| x / s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn estimates_lower_bound_entropies(l in 2usize..=6, power in 0.2f64..6.0, seed in any::<u64>()) {
        let p = sharpened(l, power, seed);
        let c = ic(&p);
        for order in ORDERS {
            let q = q_alpha_estimate(l, c, order).unwrap();
            prop_assert!(renyi_entropy(&p, order) >= q - 1e-9, "{order}: {p:?}");
        }
        prop_assert!(shannon(&p) >= q_one_estimate(c) - 1e-9);
        prop_assert!(shannon(&p) >= shannon_floor_h(c) - 1e-9);
    }

    #[test]
    fn estimates_are_convex_in_ic(l in 2usize..=6, a in 0.0f64..1.0, b in 0.0f64..1.0, t in 0.0f64..1.0) {
        let lo = 1.0 / l as f64;
        let (c1, c3) = (lo + a.min(b) * (1.0 - lo), lo + a.max(b) * (1.0 - lo));
        let c2 = (1.0 - t) * c1 + t * c3;
        for order in ORDERS {
            let q = |c| q_alpha_estimate(l, c, order).unwrap();
            prop_assert!(q(c2) <= (1.0 - t) * q(c1) + t * q(c3) + 1e-9, "{order}");
        }
        let q1 = |c| q_one_estimate(c);
        prop_assert!(q1(c2) <= (1.0 - t) * q1(c1) + t * q1(c3) + 1e-9);
    }
}

#[test]
fn shannon_floor_dominates_its_chord_estimate_and_decreases() {
    let grid: Vec<f64> = (0..=20000).map(|i| 0.01 + 0.99 * i as f64 / 20000.0).collect();
    let mut prev = f64::INFINITY;
    for &c in &grid {
        let h = shannon_floor_h(c);
        assert!(h >= q_one_estimate(c) - 1e-9, "c = {c}");
        assert!(h <= prev + 1e-12, "c = {c}");
        prev = h;
    }
}

#[test]
fn shannon_floor_is_concave_between_inverse_integers() {
    for k in 1..=8 {
        let (lo, hi) = (1.0 / (k + 1) as f64, 1.0 / k as f64);
        for i in 0..50 {
            for j in (i + 2)..=50 {
                let c1 = lo + (hi - lo) * i as f64 / 50.0;
                let c3 = lo + (hi - lo) * j as f64 / 50.0;
                let mid = 0.5 * (c1 + c3);
                assert!(shannon_floor_h(mid) >= 0.5 * (shannon_floor_h(c1) + shannon_floor_h(c3)) - 1e-9, "k={k}");
            }
        }
        assert!((shannon_floor_h(hi) - (k as f64).log2()).abs() < 1e-12);
    }
}

#[test]
fn exchange_inequalities_hold() {
    let h = shannon_floor_h;
    for k1 in 2..=8usize {
        for k2 in 1..k1 {
            let (f1, f2) = (k1 as f64, k2 as f64);
            for i in 0..=40 {
                let s = (1.0 / (f1 - 1.0) - 1.0 / f1) * i as f64 / 40.0;
                // h is defined for IC at most one, so the k2 = 1 instance of the first inequality is empty
                if k2 > 1 {
                    assert!(h(1.0 / f1) + h(1.0 / f2 + s) >= h(1.0 / f1 + s) + h(1.0 / f2) - 1e-9, "prop1 {k1} {k2} {s}");
                }
                let s = (1.0 / f1 - 1.0 / (f1 + 1.0)) * i as f64 / 40.0;
                assert!(h(1.0 / f1 - s) + h(1.0 / f2) >= h(1.0 / f1) + h(1.0 / f2 - s) - 1e-9, "prop2 {k1} {k2} {s}");
            }
        }
    }
}

#[test]
fn multi_floor_matches_brute_force_minimum() {
    let mut r = rng(7);
    for theta in [2usize, 3] {
        for l in [2usize, 3] {
            let lo = theta as f64 / l as f64;
            for case in 0..3 {
                let c_tot = lo + r.random::<f64>() * (theta as f64 - lo);
                let d = shannon_floor_multi(theta, l, c_tot).unwrap();
                let config = saturating_configuration(theta, l, c_tot);
                let total_ic: f64 = config.iter().map(|p| ic(p)).sum();
                let total_h: f64 = config.iter().map(|p| shannon(p)).sum();
                assert!((total_ic - c_tot).abs() < 1e-9 && (total_h - d).abs() < 1e-9, "{theta} {l} {c_tot}");
                let brute = shannon_sum_bruteforce(theta, l, c_tot, 24, case);
                assert!(brute >= d - 1e-6, "{theta} {l} {c_tot}: brute {brute} < {d}");
                assert!(brute <= d + 1e-3, "{theta} {l} {c_tot}: search stalled at {brute} vs {d}");
            }
        }
    }
}
