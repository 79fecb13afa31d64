//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use weur_core::ensembles::haar_random_unitary;
use weur_core::entropy::{renyi_entropy, RenyiOrder};
use weur_core::optim::{nelder_mead, NelderMeadOptions};
use weur_core::qmat::{born_probabilities, DensityState, Povm, WeightedEnsemble};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

pub fn ic(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum()
}

/// Uniformly random point of the probability simplex.
pub fn random_distribution<R: Rng>(l: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..l).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

pub fn random_bases<R: Rng>(d: usize, count: usize, rng: &mut R) -> Vec<Povm> {
    (0..count).map(|_| Povm::from_unitary(&haar_random_unitary(d, rng)).unwrap()).collect()
}

pub fn random_unit_axis<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Realised weighted-average entropy `sum_theta w_theta H_alpha(M_theta)`.
pub fn weighted_entropy(e: &WeightedEnsemble, s: &DensityState, order: RenyiOrder) -> f64 {
    e.povms()
        .iter()
        .zip(e.weights())
        .map(|(m, w)| w * renyi_entropy(&born_probabilities(m, s).unwrap(), order))
        .sum()
}

/// Moves `p` along a monotone IC path (towards uniform or towards its largest vertex) to IC `target`.
fn with_ic(p: &[f64], target: f64) -> Vec<f64> {
    let l = p.len();
    let c = ic(p);
    let toward: Vec<f64> = if target < c {
        vec![1.0 / l as f64; l]
    } else {
        let i = (0..l).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        (0..l).map(|j| if j == i { 1.0 } else { 0.0 }).collect()
    };
    // IC((1-t) p + t q) = a t^2 + b t + c
    let diff: Vec<f64> = toward.iter().zip(p).map(|(q, x)| q - x).collect();
    let a = ic(&diff);
    let b = 2.0 * p.iter().zip(&diff).map(|(x, d)| x * d).sum::<f64>();
    let rhs = target - c;
    let t = if a < 1e-300 {
        0.0
    } else {
        let disc = (b * b + 4.0 * a * rhs).max(0.0);
        let roots = [(-b + disc.sqrt()) / (2.0 * a), (-b - disc.sqrt()) / (2.0 * a)];
        roots.into_iter().filter(|r| (-1e-12..=1.0 + 1e-12).contains(r)).fold(f64::NAN, f64::min)
    };
    let t = if t.is_nan() { 1.0 } else { t.clamp(0.0, 1.0) };
    p.iter().zip(&toward).map(|(x, q)| (1.0 - t) * x + t * q).collect()
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Distributions with shapes decoded from logits and ICs `1/l + ext_theta`.
fn decode(x: &[f64], l: usize, ext: &[f64]) -> Vec<Vec<f64>> {
    ext.iter().enumerate().map(|(t, e)| with_ic(&softmax(&x[t * l..(t + 1) * l]), 1.0 / l as f64 + e)).collect()
}

/// All splits of `total` into `parts` nonnegative multiples of `total / grid`.
fn compositions(parts: usize, grid: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![grid]];
    }
    (0..=grid)
        .flat_map(|i| {
            compositions(parts - 1, grid - i).into_iter().map(move |mut rest| {
                rest.push(i);
                rest
            })
        })
        .collect()
}

/// Brute-force minimum of `sum_theta H(p_theta)` subject to `sum_theta IC(p_theta) = c_tot`:
/// exhaustive grid over the IC split (the objective is concave in it, so local search would stall
/// at vertices), then a multi-start shape search for each split.
pub fn shannon_sum_bruteforce(theta: usize, l: usize, c_tot: f64, grid: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let excess = c_tot - theta as f64 / l as f64;
    let cap = 1.0 - 1.0 / l as f64;
    // split whichever is smaller, the excess IC or the slack below the cap, so the equal split is feasible
    let slack = theta as f64 * cap - excess;
    let ext_of = |f: &[f64]| -> Option<Vec<f64>> {
        let total: f64 = f.iter().map(|v| v.abs()).sum();
        if !(total > 0.0) {
            return None;
        }
        let ext: Vec<f64> = if excess <= slack {
            f.iter().map(|v| excess * v.abs() / total).collect()
        } else {
            f.iter().map(|v| cap - slack * v.abs() / total).collect()
        };
        ext.iter().all(|&e| (-1e-12..=cap + 1e-12).contains(&e)).then_some(ext)
    };
    let mut best = (f64::INFINITY, Vec::new());
    for split in compositions(theta, grid) {
        let fractions: Vec<f64> = split.iter().map(|&i| i as f64 / grid as f64).collect();
        let Some(ext) = ext_of(&fractions) else { continue };
        let objective = |x: &[f64]| -> f64 { decode(x, l, &ext).iter().map(|p| shannon(p)).sum() };
        for _ in 0..2 {
            let mut x: Vec<f64> = (0..theta * l).map(|_| r.random_range(-6.0..6.0)).collect();
            // warm restarts re-inflate a collapsed simplex
            for step in [2.0, 0.5] {
                let m = nelder_mead(objective, &x, NelderMeadOptions { initial_step: step, max_evaluations: 1500, ..Default::default() });
                x = m.x;
                if m.value < best.0 {
                    best = (m.value, x.iter().copied().chain(fractions.iter().copied()).collect());
                }
            }
        }
    }
    // joint polish of shapes and split around the best grid point
    let joint = |y: &[f64]| -> f64 {
        match ext_of(&y[theta * l..]) {
            Some(ext) => decode(&y[..theta * l], l, &ext).iter().map(|p| shannon(p)).sum(),
            None => f64::INFINITY,
        }
    };
    let (mut value, mut y) = best;
    for step in [0.5 / grid as f64, 0.1 / grid as f64, 0.02 / grid as f64] {
        let m = nelder_mead(joint, &y, NelderMeadOptions { initial_step: step, max_evaluations: 4000, ..Default::default() });
        if m.value < value {
            value = m.value;
            y = m.x;
        }
    }
    value
}

/// `(theta-k-1)` uniform distributions of length `n`, `k` of length `n-1`, and one two-level
/// distribution (`m-1` entries `p_a`, one `p_b`) carrying the remaining IC.
pub fn saturating_configuration(theta: usize, l: usize, c_tot: f64) -> Vec<Vec<f64>> {
    let t = theta as f64;
    let n = (t / c_tot - 1e-12).ceil();
    let k = ((n * (n - 1.0) * (c_tot - t / n)) + 1e-12).floor().clamp(0.0, t - 1.0);
    let uniform = |m: f64| {
        let mut v = vec![0.0; l];
        v[..m as usize].iter_mut().for_each(|x| *x = 1.0 / m);
        v
    };
    let mut out = Vec::new();
    for _ in 0..(theta - k as usize - 1) {
        out.push(uniform(n));
    }
    for _ in 0..k as usize {
        out.push(uniform(n - 1.0));
    }
    let r = c_tot - (t - k - 1.0) / n - k / (n - 1.0);
    let m = (1.0 / r - 1e-12).ceil();
    let mut last = vec![0.0; l];
    if m <= 1.0 {
        last[0] = 1.0;
    } else {
        let pa = 1.0 / m + ((r * m - 1.0).max(0.0) / (m - 1.0)).sqrt() / m;
        let pb = 1.0 - (m - 1.0) * pa;
        last[..m as usize - 1].iter_mut().for_each(|x| *x = pa);
        last[m as usize - 1] = pb.max(0.0);
    }
    out.push(last);
    out
}

