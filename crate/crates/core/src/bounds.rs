//! Lower bounds on (weighted) entropy sums of measurement ensembles.
//!
//! IC-based bounds take the state through `i_com = Tr(rho^2) - 1/d`; overlap-based
//! competitor bounds take the von Neumann entropy `s_rho`. The state-independent forms use
//! `i_com = 1 - 1/d` and `s_rho = 0`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::entropy::{hbin, q_alpha_estimate, q_one_estimate, renyi_entropy, RenyiOrder};
use crate::num::{neg_xlogx, snapped_ceil, snapped_floor};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::optim::{gradient_descent, nelder_mead, DescentOptions, NelderMeadOptions};
use crate::qmat::{born_probabilities, ComplexMatrix, DensityState, Povm, WeightedEnsemble};
use crate::viewop::{average_view, operator_norm, total_view, view_report, ViewReport};
use crate::{Error, Result};

/// Tolerance used to recognise rank-1 projectors.
pub const PROJECTIVE_TOL: f64 = 1e-9;
const I_COM_TOL: f64 = 1e-10;

fn checked_i_com(d: usize, i_com: f64) -> Result<f64> {
    let max = 1.0 - 1.0 / d as f64;
    if !(i_com >= -I_COM_TOL && i_com <= max + I_COM_TOL) {
        return Err(Error::InvalidArgument(format!("i_com = {i_com} outside [0, {max}]")));
    }
    Ok(i_com.clamp(0.0, max))
}

/// Largest `i_com` over states of dimension `d`, attained by pure states.
pub fn pure_state_i_com(d: usize) -> f64 {
    1.0 - 1.0 / d as f64
}

fn require_equal_trace(povms: &[Povm]) -> Result<()> {
    match povms.iter().position(|p| !p.is_equal_trace()) {
        Some(index) => Err(Error::NotEqualTrace { index }),
        None => Ok(()),
    }
}

fn require_projective(povms: &[Povm]) -> Result<()> {
    match povms.iter().position(|p| !p.is_rank_one_projective(PROJECTIVE_TOL)) {
        Some(index) => Err(Error::NotProjective { index }),
        None => Ok(()),
    }
}

fn ensemble_probabilities(e: &WeightedEnsemble, s: &DensityState) -> Result<Vec<Vec<f64>>> {
    e.povms().iter().map(|m| born_probabilities(m, s).map(|p| p.into_inner())).collect()
}

/// Weighted information gain `sum_{i,theta} w_theta (p_{i|theta} - Tr(M_{i|theta})/d)^2`.
pub fn weighted_information_gain(e: &WeightedEnsemble, s: &DensityState) -> Result<f64> {
    let d = e.dim() as f64;
    let probs = ensemble_probabilities(e, s)?;
    Ok(e.povms()
        .iter()
        .zip(&probs)
        .zip(e.weights())
        .map(|((m, p), w)| {
            w * m.effects().iter().zip(p).map(|(eff, pi)| (pi - eff.trace().re / d).powi(2)).sum::<f64>()
        })
        .sum())
}

/// Weighted index of coincidence `sum_{i,theta} w_theta p_{i|theta}^2`.
pub fn weighted_ic(e: &WeightedEnsemble, s: &DensityState) -> Result<f64> {
    require_equal_trace(e.povms())?;
    let probs = ensemble_probabilities(e, s)?;
    Ok(probs.iter().zip(e.weights()).map(|(p, w)| w * p.iter().map(|x| x * x).sum::<f64>()).sum())
}

/// IC upper bound `c_bar = 1/l + ||g|| i_com`, capped at 1.
pub fn ic_upper_bound(l: usize, g_norm: f64, i_com: f64) -> f64 {
    (1.0 / l as f64 + g_norm * i_com).min(1.0)
}

/// Weighted Rényi bound from a precomputed `||g||`; Shannon order uses `Q_1`.
pub fn q_alpha_from_norm(l: usize, g_norm: f64, i_com: f64, order: RenyiOrder) -> Result<f64> {
    let c_bar = ic_upper_bound(l, g_norm, i_com);
    match order {
        RenyiOrder::Shannon => Ok(q_one_estimate(c_bar)),
        _ => q_alpha_estimate(l, c_bar, order),
    }
}

/// `q_alpha = Q_alpha(l, 1/l + ||g|| i_com)` for `alpha >= 2` (including `+inf`).
pub fn bound_q_alpha(e: &WeightedEnsemble, i_com: f64, order: RenyiOrder) -> Result<f64> {
    require_equal_trace(e.povms())?;
    if order == RenyiOrder::Shannon || !order.has_ic_estimate() {
        return Err(Error::InvalidArgument(format!("q_alpha needs alpha >= 2, got {order}")));
    }
    let i_com = checked_i_com(e.dim(), i_com)?;
    q_alpha_from_norm(e.outcomes(), operator_norm(&average_view(e)), i_com, order)
}

/// `q_1 = Q_1(1/l + ||g|| i_com)`.
pub fn bound_q_one(e: &WeightedEnsemble, i_com: f64) -> Result<f64> {
    require_equal_trace(e.povms())?;
    let i_com = checked_i_com(e.dim(), i_com)?;
    q_alpha_from_norm(e.outcomes(), operator_norm(&average_view(e)), i_com, RenyiOrder::Shannon)
}

/// Sum-form Shannon bound from a precomputed `||G_tot||`.
///
/// With `c_bar = 1/l + ||G_tot|| i_com / theta`, `n = ceil(1/c_bar)` and
/// `k = floor(n (n-1) (c_bar - 1/n) theta)`, the bound is
/// `k log(n-1) + (theta-k-1) log n - (1-p) log((1-p)/(n-1)) - p log p`, where `p` in `[0, 1/n]`
/// solves `(1-p)^2/(n-1) + p^2 = theta c_bar - k/(n-1) - (theta-k-1)/n`.
pub fn q_s_from_norm(theta: usize, l: usize, g_tot_norm: f64, i_com: f64) -> Result<f64> {
    if theta == 0 {
        return Err(Error::InvalidArgument("no measurements".into()));
    }
    let t = theta as f64;
    let c_bar = ic_upper_bound(l, g_tot_norm / t, i_com);
    let n = snapped_ceil(1.0 / c_bar);
    if n <= 1.0 {
        return Ok(0.0);
    }
    let k = snapped_floor(n * (n - 1.0) * (c_bar - 1.0 / n) * t).clamp(0.0, t - 1.0);
    let rhs = t * c_bar - k / (n - 1.0) - (t - k - 1.0) / n;
    // n p^2 - 2 p + 1 - rhs (n - 1) = 0
    let disc = (n - 1.0) * (n * rhs - 1.0);
    if disc < -1e-9 {
        return Err(Error::Numerical(format!("no real root for the mixing probability (discriminant {disc:e})")));
    }
    let root = disc.max(0.0).sqrt();
    let slack = 1e-9;
    let p = [(1.0 - root) / n, (1.0 + root) / n]
        .into_iter()
        .find(|p| *p >= -slack && *p <= 1.0 / n + slack)
        .ok_or_else(|| Error::Numerical(format!("mixing probability root outside [0, 1/{n}]")))?
        .clamp(0.0, 1.0 / n);
    let tail = neg_xlogx(1.0 - p) + (1.0 - p) * (n - 1.0).log2() + neg_xlogx(p);
    Ok(k * (n - 1.0).log2() + (t - k - 1.0) * n.log2() + tail)
}

/// Sum-form Shannon bound `q_S` for equal-trace measurements.
pub fn bound_q_s(povms: &[Povm], i_com: f64) -> Result<f64> {
    require_equal_trace(povms)?;
    let g_tot = total_view(povms)?;
    let d = povms[0].dim();
    let l = povms[0].outcomes();
    if let Some(bad) = povms.iter().find(|p| p.outcomes() != l) {
        return Err(Error::DimensionMismatch { expected: l, found: bad.outcomes() });
    }
    let i_com = checked_i_com(d, i_com)?;
    q_s_from_norm(povms.len(), l, operator_norm(&g_tot), i_com)
}

/// Closed qubit form `h_bin(1/2 + sqrt(2 ||G_tot|| i_com - k)/2) + theta - 1 - k`, `k = floor(2 ||G_tot|| i_com)`.
pub fn q_s_qubit_from_norm(theta: usize, g_tot_norm: f64, i_com: f64) -> f64 {
    let x = 2.0 * g_tot_norm * i_com;
    let t = theta as f64;
    let k = snapped_floor(x).clamp(0.0, t - 1.0);
    if k >= t - 1.0 && x >= t {
        return 0.0;
    }
    hbin(0.5 + 0.5 * (x - k).clamp(0.0, 1.0).sqrt()) + t - 1.0 - k
}

pub fn bound_q_s_qubit(povms: &[Povm], i_com: f64) -> Result<f64> {
    if let Some(p) = povms.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    require_projective(povms)?;
    let i_com = checked_i_com(2, i_com)?;
    Ok(q_s_qubit_from_norm(povms.len(), operator_norm(&total_view(povms)?), i_com))
}

/// Overlaps `c_{ij} = Tr(P_i Q_j) = |<i|j>|^2` between two bases.
pub fn basis_overlaps(a: &Povm, b: &Povm) -> Vec<Vec<f64>> {
    a.effects().iter().map(|ea| b.effects().iter().map(|eb| ea.trace_product(eb).re.max(0.0)).collect()).collect()
}

fn max_overlap(a: &Povm, b: &Povm) -> f64 {
    basis_overlaps(a, b).iter().flatten().copied().fold(0.0, f64::max)
}

/// Two-basis bound `-log2 c_max`.
pub fn bound_q_mu(a: &Povm, b: &Povm) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    require_projective(&[a.clone(), b.clone()])?;
    Ok((-max_overlap(a, b).min(1.0).log2()).max(0.0))
}

fn check_bases(bases: &[Povm]) -> Result<()> {
    if bases.len() < 2 {
        return Err(Error::InvalidArgument("overlap bounds need at least two bases".into()));
    }
    let d = bases[0].dim();
    if let Some(b) = bases.iter().find(|b| b.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: b.dim() });
    }
    require_projective(bases)
}

fn lmf_chain(bases: &[Povm]) -> f64 {
    let first = basis_overlaps(&bases[0], &bases[1]);
    let d = first.len();
    let mut v: Vec<f64> = (0..d).map(|j| (0..d).map(|i| first[i][j]).fold(0.0, f64::max)).collect();
    for pair in bases[1..].windows(2) {
        let c = basis_overlaps(&pair[0], &pair[1]);
        v = (0..d).map(|j| (0..d).map(|i| v[i] * c[i][j]).sum()).collect();
    }
    v.into_iter().fold(0.0, f64::max)
}

/// Chained-overlap bound `-log2 b + (theta - 1) s_rho`, using the bases in the given order.
pub fn bound_q_lmf(bases: &[Povm], s_rho: f64) -> Result<f64> {
    check_bases(bases)?;
    let b = lmf_chain(bases).min(1.0);
    Ok((-b.log2()).max(0.0) + (bases.len() - 1) as f64 * s_rho)
}

/// Largest chained-overlap bound over all orderings (exhaustive for up to five bases,
/// otherwise the given order).
pub fn bound_q_lmf_best_order(bases: &[Povm], s_rho: f64) -> Result<f64> {
    check_bases(bases)?;
    if bases.len() > 5 {
        return bound_q_lmf(bases, s_rho);
    }
    let mut idx: Vec<usize> = (0..bases.len()).collect();
    let mut best = f64::NEG_INFINITY;
    loop {
        let ordered: Vec<Povm> = idx.iter().map(|&i| bases[i].clone()).collect();
        best = best.max(bound_q_lmf(&ordered, s_rho)?);
        if !next_permutation(&mut idx) {
            break;
        }
    }
    Ok(best)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Pairwise bound `-(1/(theta-1)) sum_{pairs} log2 c_max + (theta/2) s_rho`.
pub fn bound_q_scb(bases: &[Povm], s_rho: f64) -> Result<f64> {
    check_bases(bases)?;
    let t = bases.len();
    let mut acc = 0.0;
    for i in 0..t {
        for j in (i + 1)..t {
            acc -= max_overlap(&bases[i], &bases[j]).min(1.0).log2();
        }
    }
    Ok((acc / (t - 1) as f64).max(0.0) + t as f64 / 2.0 * s_rho)
}

/// Best value found by the pure-state search together with the minimising state.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalBound {
    /// Minimum of `sum_theta w_theta H_alpha` (weighted-average form).
    pub value: f64,
    pub state: Vec<Complex64>,
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    // splitmix64 finaliser
    let mut z = seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn params_to_state(x: &[f64]) -> Vec<Complex64> {
    let v: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn expectation(m: &ComplexMatrix, psi: &[Complex64]) -> f64 {
    let d = psi.len();
    let mut acc = 0.0;
    for r in 0..d {
        let row = m.row(r);
        let mut s = Complex64::new(0.0, 0.0);
        for c in 0..d {
            s += row[c] * psi[c];
        }
        acc += (psi[r].conj() * s).re;
    }
    acc
}

/// Weighted-average entropy `sum_theta w_theta H_alpha(M_theta)` for a pure state vector.
pub fn pure_state_entropy(e: &WeightedEnsemble, order: RenyiOrder, psi: &[Complex64]) -> f64 {
    let mut probs = vec![0.0; e.outcomes()];
    e.povms()
        .iter()
        .zip(e.weights())
        .map(|(m, w)| {
            for (p, eff) in probs.iter_mut().zip(m.effects()) {
                *p = expectation(eff, psi).max(0.0);
            }
            let s: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= s);
            w * renyi_entropy(&probs, order)
        })
        .sum()
}

/// Numerically optimal bound `B_alpha`: minimum over pure states of the weighted-average entropy,
/// by multi-start gradient descent polished with Nelder–Mead. Deterministic for a given seed.
pub fn numerical_optimal_bound(
    e: &WeightedEnsemble,
    order: RenyiOrder,
    restarts: usize,
    seed: u64,
) -> Result<OptimalBound> {
    if restarts < 1 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let d = e.dim();
    let objective = |x: &[f64]| {
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        if !(norm2 > 1e-300) {
            return f64::INFINITY;
        }
        pure_state_entropy(e, order, &params_to_state(x))
    };
    let mut best: Option<OptimalBound> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r));
        let x0: Vec<f64> = (0..2 * d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let descent = gradient_descent(objective, &x0, DescentOptions::default());
        let polish = nelder_mead(
            objective,
            &descent.x,
            NelderMeadOptions { initial_step: 1e-3, max_evaluations: 200 * (2 * d + 1), ..Default::default() },
        );
        let (x, value) = if polish.value < descent.value { (polish.x, polish.value) } else { (descent.x, descent.value) };
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(OptimalBound { value, state: params_to_state(&x) });
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// How the state enters the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateDescriptor {
    pub i_com: f64,
    pub s_rho: f64,
    pub state_independent: bool,
}

impl StateDescriptor {
    /// Pure-state values `i_com = 1 - 1/d`, `s_rho = 0`, valid for every state.
    pub fn state_independent(d: usize) -> Self {
        StateDescriptor { i_com: pure_state_i_com(d), s_rho: 0.0, state_independent: true }
    }

    pub fn from_state(s: &DensityState) -> Self {
        StateDescriptor {
            i_com: crate::qmat::invariant_information(s).max(0.0),
            s_rho: crate::qmat::von_neumann_entropy(s),
            state_independent: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderedBound {
    /// Rényi order label (`"1"`, `"2"`, `"inf"`, ...).
    pub alpha: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairBound {
    pub first: usize,
    pub second: usize,
    pub value: f64,
}

/// Every applicable bound for one scenario. Average-form entries (`q_alpha`, `q_1`, `b_alpha`)
/// bound `sum w H`; sum-form entries (`q_s`, `q_mu`, `q_lmf`, `q_scb`) bound `sum H`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub dim: usize,
    pub outcomes: usize,
    pub theta: usize,
    pub weights: Vec<f64>,
    pub state: StateDescriptor,
    pub view: ViewReport,
    pub q_alpha: Vec<OrderedBound>,
    pub q_1: Option<f64>,
    pub q_s: Option<f64>,
    pub q_mu: Vec<PairBound>,
    pub q_lmf: Option<f64>,
    pub q_lmf_best_order: Option<f64>,
    pub q_scb: Option<f64>,
    pub b_alpha: Vec<OrderedBound>,
    pub notes: Vec<String>,
}

impl BoundReport {
    /// Checks every bound lies in `[0, log2 l]` (average form) or `[0, theta log2 l]` (sum form).
    pub fn check_ranges(&self) -> Result<()> {
        let cap = (self.outcomes as f64).log2();
        let tol = 1e-9;
        let avg = self.q_alpha.iter().chain(&self.b_alpha).map(|b| b.value).chain(self.q_1);
        let sum_cap = self.theta as f64 * cap;
        let sums = self.q_s.into_iter().chain(self.q_lmf).chain(self.q_lmf_best_order).chain(self.q_scb);
        for v in avg {
            if !(v >= -tol && v <= cap + tol) {
                return Err(Error::Numerical(format!("average-form bound {v} outside [0, {cap}]")));
            }
        }
        // overlap bounds carry the s_rho terms, so they are capped by the entropy sum they bound
        let sum_cap = sum_cap + self.theta as f64 * self.state.s_rho;
        for v in sums.chain(self.q_mu.iter().map(|p| p.value)) {
            if !(v >= -tol && v <= sum_cap + tol) {
                return Err(Error::Numerical(format!("sum-form bound {v} outside [0, {sum_cap}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub orders: Vec<RenyiOrder>,
    /// Restarts for `B_alpha`; `None` skips the numerical search.
    pub optimal_restarts: Option<usize>,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { orders: vec![RenyiOrder::Finite(2.0)], optimal_restarts: None, seed: 0 }
    }
}

/// Evaluates every bound that applies to the ensemble and records why others were skipped.
pub fn bound_report(e: &WeightedEnsemble, state: StateDescriptor, opts: &ReportOptions) -> Result<BoundReport> {
    let d = e.dim();
    let l = e.outcomes();
    let i_com = checked_i_com(d, state.i_com)?;
    let view = view_report(e);
    let mut notes = Vec::new();
    let ete = e.first_unequal_trace().is_none();
    let projective = e.povms().iter().all(|p| p.is_rank_one_projective(PROJECTIVE_TOL));

    let mut q_alpha = Vec::new();
    let mut q_1 = None;
    let mut q_s = None;
    if ete {
        for &order in &opts.orders {
            if order == RenyiOrder::Shannon || !order.has_ic_estimate() {
                if order != RenyiOrder::Shannon {
                    notes.push(format!("no IC estimate for alpha = {order}"));
                }
                continue;
            }
            q_alpha.push(OrderedBound {
                alpha: order.to_string(),
                value: q_alpha_from_norm(l, view.g_avg_norm, i_com, order)?,
            });
        }
        q_1 = Some(q_alpha_from_norm(l, view.g_avg_norm, i_com, RenyiOrder::Shannon)?);
        q_s = Some(q_s_from_norm(e.len(), l, view.g_tot_norm, i_com)?);
    } else {
        notes.push("IC bounds skipped: measurements do not have equal-trace effects".into());
    }

    let mut q_mu = Vec::new();
    let (mut q_lmf, mut q_lmf_best, mut q_scb) = (None, None, None);
    if projective && e.len() >= 2 {
        let bases = e.povms();
        for i in 0..bases.len() {
            for j in (i + 1)..bases.len() {
                q_mu.push(PairBound { first: i, second: j, value: bound_q_mu(&bases[i], &bases[j])? });
            }
        }
        q_lmf = Some(bound_q_lmf(bases, state.s_rho)?);
        q_lmf_best = Some(bound_q_lmf_best_order(bases, state.s_rho)?);
        q_scb = Some(bound_q_scb(bases, state.s_rho)?);
    } else if !projective {
        notes.push("overlap bounds skipped: measurements are not rank-1 projective".into());
    }

    let mut b_alpha = Vec::new();
    if let Some(restarts) = opts.optimal_restarts {
        if !state.state_independent {
            notes.push("b_alpha is a minimum over pure states, independent of the given state".into());
        }
        let mut orders = vec![RenyiOrder::Shannon];
        orders.extend(opts.orders.iter().copied().filter(|o| *o != RenyiOrder::Shannon));
        for order in orders {
            let b = numerical_optimal_bound(e, order, restarts, opts.seed)?;
            b_alpha.push(OrderedBound { alpha: order.to_string(), value: b.value });
        }
    }

    let report = BoundReport {
        dim: d,
        outcomes: l,
        theta: e.len(),
        weights: e.weights().to_vec(),
        state: StateDescriptor { i_com, ..state },
        view,
        q_alpha,
        q_1,
        q_s,
        q_mu,
        q_lmf,
        q_lmf_best_order: q_lmf_best,
        q_scb,
        b_alpha,
        notes,
    };
    report.check_ranges()?;
    Ok(report)
}
