//! Entropic steering test from Alice to Bob:
//! `sum_theta w_theta H_alpha(B_theta | A_theta) >= q_alpha({B_theta, w_theta})` holds for every
//! unsteerable state, so a violation certifies steerability.
//!
//! Noise thresholds use the two-qubit state `(|00> - |11>)/sqrt(2)` with Alice measuring the same
//! observable as Bob. By default Alice's measurements carry the white noise and the bound comes from
//! Bob's clean set; [`NoiseSide::Bob`] instead smears Bob's measurements and bounds them directly.
//! Both give the same joint distribution, only the bound differs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::bounds::{bound_q_alpha, bound_q_one, pure_state_i_com, q_alpha_from_norm};
use crate::ensembles::seeded_rng;
use crate::entropy::RenyiOrder;
use crate::num::neg_xlogx;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qmat::{normalize_probabilities, ComplexMatrix, DensityState, Povm, WeightedEnsemble};
use crate::viewop::{average_view, operator_norm};
use crate::{Error, Result};

/// Margin below the bound required to report a violation.
pub const VIOLATION_MARGIN: f64 = 1e-12;

/// Density matrix on `H_A (x) H_B` (A is the left tensor factor).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    d_a: usize,
    d_b: usize,
    state: DensityState,
}

impl BipartiteState {
    pub fn new(d_a: usize, d_b: usize, state: DensityState) -> Result<Self> {
        if state.dim() != d_a * d_b {
            return Err(Error::DimensionMismatch { expected: d_a * d_b, found: state.dim() });
        }
        Ok(BipartiteState { d_a, d_b, state })
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        BipartiteState { d_a, d_b, state: DensityState::maximally_mixed(d_a * d_b) }
    }

    pub fn product(a: &DensityState, b: &DensityState) -> Self {
        let m = a.matrix().kron(b.matrix());
        BipartiteState { d_a: a.dim(), d_b: b.dim(), state: DensityState::from_matrix_unchecked(m) }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn state(&self) -> &DensityState {
        &self.state
    }
}

/// `(|00> - |11>)/sqrt(2)`.
pub fn maximally_entangled_qubits() -> BipartiteState {
    let a = core::f64::consts::FRAC_1_SQRT_2;
    let psi = [Complex64::new(a, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-a, 0.0)];
    BipartiteState { d_a: 2, d_b: 2, state: DensityState::pure(&psi).expect("normalised vector") }
}

/// `p(a, b) = Re Tr[(A_a (x) B_b) rho]`, indexed `[a][b]`.
pub fn joint_distribution(s: &BipartiteState, alice: &Povm, bob: &Povm) -> Result<Vec<Vec<f64>>> {
    if alice.dim() != s.d_a {
        return Err(Error::DimensionMismatch { expected: s.d_a, found: alice.dim() });
    }
    if bob.dim() != s.d_b {
        return Err(Error::DimensionMismatch { expected: s.d_b, found: bob.dim() });
    }
    let rho = s.state.matrix();
    let lb = bob.outcomes();
    let mut flat = Vec::with_capacity(alice.outcomes() * lb);
    for ea in alice.effects() {
        for eb in bob.effects() {
            flat.push(ea.kron(eb).trace_product(rho).re);
        }
    }
    let flat = normalize_probabilities(flat)?;
    Ok(flat.chunks(lb).map(<[f64]>::to_vec).collect())
}

fn check_joint(p: &[Vec<f64>]) -> Result<()> {
    let Some(first) = p.first() else {
        return Err(Error::InvalidArgument("empty joint distribution".into()));
    };
    let mut total = 0.0;
    for row in p {
        if row.len() != first.len() {
            return Err(Error::DimensionMismatch { expected: first.len(), found: row.len() });
        }
        for &x in row {
            if !(x >= -crate::qmat::CLAMP_TOL) {
                return Err(Error::InvalidArgument(format!("joint probability {x} is negative")));
            }
            total += x;
        }
    }
    if (total - 1.0).abs() > crate::qmat::PROB_SUM_TOL {
        return Err(Error::InvalidArgument(format!("joint distribution sums to {total}")));
    }
    Ok(())
}

fn conditional_unchecked(p: &[Vec<f64>], order: RenyiOrder) -> f64 {
    let h = match order {
        RenyiOrder::Shannon => p
            .iter()
            .map(|row| {
                let pa: f64 = row.iter().map(|x| x.max(0.0)).sum();
                row.iter().map(|x| neg_xlogx(x.max(0.0))).sum::<f64>() - neg_xlogx(pa)
            })
            .sum(),
        RenyiOrder::Infinity => -p.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).sum::<f64>().log2(),
        RenyiOrder::Finite(a) => {
            // sum_j p_A(j) ||p(.|j)||_a = sum_j ||p(j, .)||_a
            let s: f64 = p.iter().map(|row| row.iter().map(|x| x.max(0.0).powf(a)).sum::<f64>().powf(1.0 / a)).sum();
            a / (1.0 - a) * s.log2()
        }
    };
    h.max(0.0)
}

/// Conditional Rényi entropy `H_alpha(B|A)` of a joint distribution indexed `[a][b]`:
/// `alpha/(1-alpha) log2 sum_a p_A(a) ||p(.|a)||_alpha`, with the Shannon and min-entropy limits.
pub fn conditional_renyi(p: &[Vec<f64>], order: RenyiOrder) -> Result<f64> {
    check_joint(p)?;
    Ok(conditional_unchecked(p, order))
}

/// Operands of the steering inequality.
#[derive(Debug, Clone)]
pub struct SteeringScenario {
    pub state: BipartiteState,
    pub alice: Vec<Povm>,
    /// Bob's measurements and the weights of the inequality.
    pub bob: WeightedEnsemble,
    pub order: RenyiOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SteeringResult {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    /// `lhs - rhs`.
    pub margin: f64,
}

impl SteeringResult {
    fn new(lhs: f64, rhs: f64) -> Self {
        SteeringResult { lhs, rhs, violated: lhs < rhs - VIOLATION_MARGIN, margin: lhs - rhs }
    }
}

/// State-independent bound for Bob's measurements at the requested order.
pub fn steering_bound(bob: &WeightedEnsemble, order: RenyiOrder) -> Result<f64> {
    let i_com = pure_state_i_com(bob.dim());
    match order {
        RenyiOrder::Shannon => bound_q_one(bob, i_com),
        o if o.has_ic_estimate() => bound_q_alpha(bob, i_com, o),
        o => Err(Error::InvalidArgument(format!("steering bound needs alpha = 1 or alpha >= 2, got {o}"))),
    }
}

pub fn evaluate_criterion(sc: &SteeringScenario) -> Result<SteeringResult> {
    if sc.alice.len() != sc.bob.len() {
        return Err(Error::DimensionMismatch { expected: sc.bob.len(), found: sc.alice.len() });
    }
    let rhs = steering_bound(&sc.bob, sc.order)?;
    let mut lhs = 0.0;
    for ((a, b), w) in sc.alice.iter().zip(sc.bob.povms()).zip(sc.bob.weights()) {
        let joint = joint_distribution(&sc.state, a, b)?;
        lhs += w * conditional_unchecked(&joint, sc.order);
    }
    Ok(SteeringResult::new(lhs, rhs))
}

/// Which party's measurements carry the white noise in threshold searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NoiseSide {
    /// Alice's measurements are noisy; the bound uses Bob's clean measurements.
    #[default]
    Alice,
    /// Bob's measurements are noisy and bounded as such.
    Bob,
}

#[derive(Debug, Clone, Copy)]
pub struct ThresholdOptions {
    pub order: RenyiOrder,
    /// Bisection width in `eta`.
    pub tol: f64,
    pub noise_side: NoiseSide,
    /// Points of the monotonicity scan run before bisecting.
    pub scan_points: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { order: RenyiOrder::Infinity, tol: 1e-4, noise_side: NoiseSide::Alice, scan_points: 50 }
    }
}

type Joint = Vec<Vec<f64>>;

/// Joint distributions of one measurement family at `eta`, exploiting that they are affine in `eta`.
#[derive(Debug, Clone)]
pub struct NoisyFamily {
    clean: WeightedEnsemble,
    /// Per measurement: joint with no noise and joint with the noisy side fully smeared.
    joints: Vec<(Joint, Joint)>,
    side: NoiseSide,
}

impl NoisyFamily {
    /// Qubit family measured on `(|00> - |11>)/sqrt(2)`, Alice measuring the same observables as Bob.
    pub fn new(bob: &WeightedEnsemble, side: NoiseSide) -> Result<Self> {
        if bob.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: bob.dim() });
        }
        if let Some(index) = bob.first_unequal_trace() {
            return Err(Error::NotEqualTrace { index });
        }
        let state = maximally_entangled_qubits();
        let mut joints = Vec::with_capacity(bob.len());
        for m in bob.povms() {
            let clean = joint_distribution(&state, m, m)?;
            let smeared = crate::ensembles::add_white_noise(m, 0.0)?;
            let noise = match side {
                NoiseSide::Alice => joint_distribution(&state, &smeared, m)?,
                NoiseSide::Bob => joint_distribution(&state, m, &smeared)?,
            };
            joints.push((clean, noise));
        }
        Ok(NoisyFamily { clean: bob.clone(), joints, side })
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    fn lhs(&self, weights: &[f64], eta: f64, order: RenyiOrder) -> f64 {
        self.joints
            .iter()
            .zip(weights)
            .map(|((clean, noise), w)| {
                let p: Vec<Vec<f64>> = clean
                    .iter()
                    .zip(noise)
                    .map(|(rc, rn)| rc.iter().zip(rn).map(|(c, n)| eta * c + (1.0 - eta) * n).collect())
                    .collect();
                w * conditional_unchecked(&p, order)
            })
            .sum()
    }

    fn view_norm(&self, weights: &[f64]) -> Result<f64> {
        Ok(operator_norm(&average_view(&self.clean.reweighted(weights.to_vec())?)))
    }

    fn rhs(&self, clean_norm: f64, eta: f64, order: RenyiOrder) -> Result<f64> {
        // smearing scales the view operator by eta^2
        let g = match self.side {
            NoiseSide::Alice => clean_norm,
            NoiseSide::Bob => eta * eta * clean_norm,
        };
        let l = self.clean.outcomes();
        match order {
            RenyiOrder::Shannon => q_alpha_from_norm(l, g, pure_state_i_com(2), order),
            o if o.has_ic_estimate() => q_alpha_from_norm(l, g, pure_state_i_com(2), o),
            o => Err(Error::InvalidArgument(format!("steering bound needs alpha = 1 or alpha >= 2, got {o}"))),
        }
    }

    /// Criterion at visibility `eta` with the given weights.
    pub fn evaluate(&self, weights: &[f64], eta: f64, order: RenyiOrder) -> Result<SteeringResult> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: weights.len() });
        }
        let norm = self.view_norm(weights)?;
        Ok(SteeringResult::new(self.lhs(weights, eta, order), self.rhs(norm, eta, order)?))
    }

    /// Smallest violating visibility, or `None` when even `eta = 1` does not violate.
    pub fn threshold(&self, weights: &[f64], opts: &ThresholdOptions) -> Result<Option<f64>> {
        if !(opts.tol > 0.0 && opts.tol <= 1e-4) {
            return Err(Error::InvalidArgument(format!("tolerance {} outside (0, 1e-4]", opts.tol)));
        }
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: weights.len() });
        }
        let order = opts.order;
        let norm = self.view_norm(weights)?;
        let violated = |eta: f64| -> Result<(bool, f64)> {
            let r = SteeringResult::new(self.lhs(weights, eta, order), self.rhs(norm, eta, order)?);
            Ok((r.violated, r.lhs))
        };

        let n = opts.scan_points.max(2);
        let mut first_violation = None;
        let mut prev_lhs = f64::INFINITY;
        for k in 0..n {
            let eta = k as f64 / (n - 1) as f64;
            let (v, lhs) = violated(eta)?;
            if lhs > prev_lhs + 1e-9 {
                return Err(Error::Numerical(format!("left-hand side increases in eta near {eta}")));
            }
            prev_lhs = lhs;
            match (first_violation, v) {
                (None, true) => first_violation = Some(k),
                (Some(_), false) => {
                    return Err(Error::Numerical(format!("violation predicate is not monotone in eta near {eta}")))
                }
                _ => {}
            }
        }
        let Some(k) = first_violation else { return Ok(None) };
        if k == 0 {
            return Ok(Some(0.0));
        }
        let (mut lo, mut hi) = ((k - 1) as f64 / (n - 1) as f64, k as f64 / (n - 1) as f64);
        while hi - lo > opts.tol {
            let mid = 0.5 * (lo + hi);
            if violated(mid)?.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }
}

/// Noise threshold of a qubit family with its own weights (`eta_equ` for equal weights).
pub fn noise_threshold(bob: &WeightedEnsemble, opts: &ThresholdOptions) -> Result<Option<f64>> {
    NoisyFamily::new(bob, opts.noise_side)?.threshold(bob.weights(), opts)
}

#[derive(Debug, Clone, Copy)]
pub struct WeightSearchOptions {
    pub threshold: ThresholdOptions,
    pub restarts: usize,
    pub min_weight: f64,
    pub seed: u64,
}

impl Default for WeightSearchOptions {
    fn default() -> Self {
        WeightSearchOptions { threshold: ThresholdOptions::default(), restarts: 32, min_weight: 1e-4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightSearch {
    pub weights: Vec<f64>,
    /// `eta_opt`.
    pub threshold: Option<f64>,
    /// `eta_equ`.
    pub equal_weights_threshold: Option<f64>,
}

fn logits_to_weights(x: &[f64], min_weight: f64) -> Vec<f64> {
    let m = x.iter().copied().fold(0.0, f64::max);
    let mut w: Vec<f64> = x.iter().map(|v| (v - m).exp()).chain(core::iter::once((-m).exp())).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v = (*v / s).max(min_weight));
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Minimises the noise threshold over weights in the simplex interior (`eta_opt`), by multi-start
/// Nelder–Mead on softmax logits. Equal weights are always a candidate, so `eta_opt <= eta_equ`.
pub fn optimize_weights(family: &[Povm], opts: &WeightSearchOptions) -> Result<WeightSearch> {
    if opts.restarts < 1 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let theta = family.len();
    let equal = WeightedEnsemble::equal_weights(family.to_vec())?;
    let fam = NoisyFamily::new(&equal, opts.threshold.noise_side)?;
    let equal_threshold = fam.threshold(equal.weights(), &opts.threshold)?;
    let mut best = (equal.weights().to_vec(), equal_threshold);
    if theta < 2 {
        return Ok(WeightSearch { weights: best.0, threshold: best.1, equal_weights_threshold: equal_threshold });
    }

    // Finer bisection inside the search keeps the objective from being flat at the tolerance scale.
    let inner = ThresholdOptions { tol: opts.threshold.tol.min(1e-7), ..opts.threshold };
    let score = |t: Option<f64>| t.unwrap_or(2.0);
    let mut failure = None;
    let mut objective = |x: &[f64]| -> f64 {
        match fam.threshold(&logits_to_weights(x, opts.min_weight), &inner) {
            Ok(t) => score(t),
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let mut rng = seeded_rng(opts.seed);
    let mut best_score = f64::INFINITY;
    let mut best_x = vec![0.0; theta - 1];
    for r in 0..opts.restarts {
        let x0: Vec<f64> = if r == 0 { vec![0.0; theta - 1] } else { (0..theta - 1).map(|_| rng.random_range(-2.0..2.0)).collect() };
        let m = nelder_mead(&mut objective, &x0, NelderMeadOptions { initial_step: 0.5, f_tol: 1e-10, x_tol: 1e-8, max_evaluations: 600 });
        if m.value < best_score {
            best_score = m.value;
            best_x = m.x;
        }
    }
    if let Some(e) = failure {
        if !best_score.is_finite() {
            return Err(e);
        }
    }
    let weights = logits_to_weights(&best_x, opts.min_weight);
    let found = fam.threshold(&weights, &opts.threshold)?;
    if score(found) < score(best.1) {
        best = (weights, found);
    }
    Ok(WeightSearch { weights: best.0, threshold: best.1, equal_weights_threshold: equal_threshold })
}

/// Steering scenario on `(|00> - |11>)/sqrt(2)` with Alice measuring Bob's observables, white noise
/// of visibility `eta` on the chosen side.
pub fn noisy_scenario(bob: &WeightedEnsemble, eta: f64, side: NoiseSide, order: RenyiOrder) -> Result<SteeringScenario> {
    let noisy: Vec<Povm> =
        bob.povms().iter().map(|m| crate::ensembles::add_white_noise(m, eta)).collect::<Result<_>>()?;
    let (alice, bob) = match side {
        NoiseSide::Alice => (noisy, bob.clone()),
        NoiseSide::Bob => (bob.povms().to_vec(), WeightedEnsemble::new(noisy, bob.weights().to_vec())?),
    };
    Ok(SteeringScenario { state: maximally_entangled_qubits(), alice, bob, order })
}

/// Identity on `H_A (x) H_B` scaled to a maximally mixed bipartite state.
pub fn maximally_mixed_matrix(d_a: usize, d_b: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d_a * d_b).scale_real(1.0 / (d_a * d_b) as f64)
}
