//! Entropies of outcome distributions and their lower bounds in terms of the index of
//! coincidence (IC) `c(p) = sum_i p_i^2`.
//!
//! Two different `(p_a, p_b)` pairs appear here and are deliberately kept apart:
//! [`q_alpha_estimate`] uses one large probability and `l - 1` equal small ones, while
//! [`shannon_floor_h`] uses `n - 1` equal large probabilities and one small one, with
//! `n = ceil(1/c)`.

use core::fmt;

use crate::num::{neg_xlogx, snapped_ceil, snapped_floor};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::{Error, Result};

/// Slack allowed on the IC range `[1/l, 1]`.
pub const IC_RANGE_TOL: f64 = 1e-12;

/// Rényi order. `alpha = 1` is the Shannon limit and `alpha = +inf` the min-entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RenyiOrder {
    Shannon,
    Finite(f64),
    Infinity,
}

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidArgument(alloc::format!("Renyi order must be positive, got {alpha}")));
        }
        Ok(if alpha == 1.0 {
            RenyiOrder::Shannon
        } else if alpha.is_infinite() {
            RenyiOrder::Infinity
        } else {
            RenyiOrder::Finite(alpha)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            RenyiOrder::Shannon => 1.0,
            RenyiOrder::Finite(a) => a,
            RenyiOrder::Infinity => f64::INFINITY,
        }
    }

    /// Whether an IC-based estimation function exists for this order (`alpha = 1` or `alpha >= 2`).
    pub fn has_ic_estimate(self) -> bool {
        match self {
            RenyiOrder::Shannon | RenyiOrder::Infinity => true,
            RenyiOrder::Finite(a) => a >= 2.0,
        }
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenyiOrder::Shannon => write!(f, "1"),
            RenyiOrder::Finite(a) => write!(f, "{a}"),
            RenyiOrder::Infinity => write!(f, "inf"),
        }
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| neg_xlogx(x)).sum::<f64>().max(0.0)
}

/// Rényi entropy `H_alpha(p) = log2(sum p_i^alpha) / (1 - alpha)` with its two limits.
pub fn renyi_entropy(p: &[f64], order: RenyiOrder) -> f64 {
    let h = match order {
        RenyiOrder::Shannon => shannon_entropy(p),
        RenyiOrder::Infinity => -p.iter().copied().fold(0.0, f64::max).log2(),
        RenyiOrder::Finite(a) => {
            let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(a)).sum();
            s.log2() / (1.0 - a)
        }
    };
    h.max(0.0)
}

/// Index of coincidence of a distribution with `len` outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcValue {
    pub c: f64,
    pub len: usize,
}

impl IcValue {
    pub fn new(c: f64, len: usize) -> Result<Self> {
        Ok(IcValue { c: checked_ic(len, c)?, len })
    }
}

pub fn index_of_coincidence(p: &[f64]) -> IcValue {
    IcValue { c: p.iter().map(|x| x * x).sum(), len: p.len() }
}

fn checked_ic(l: usize, c: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidArgument("outcome count must be positive".into()));
    }
    let lo = 1.0 / l as f64;
    if !(c >= lo - IC_RANGE_TOL && c <= 1.0 + IC_RANGE_TOL) {
        return Err(Error::InvalidArgument(alloc::format!("IC {c} outside [1/{l}, 1]")));
    }
    Ok(c.clamp(lo, 1.0))
}

/// Convex lower estimate `Q_alpha(l, c)` of the Rényi entropy at fixed IC, for `alpha >= 2`.
pub fn q_alpha_estimate(l: usize, c: f64, order: RenyiOrder) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidArgument("estimation needs at least two outcomes".into()));
    }
    let c = checked_ic(l, c)?;
    let lf = l as f64;
    let spread = (lf * c - 1.0).max(0.0);
    let p_a = (1.0 + (spread * (lf - 1.0)).sqrt()) / lf;
    let p_b = ((1.0 - (spread / (lf - 1.0)).sqrt()) / lf).max(0.0);
    let q = match order {
        RenyiOrder::Infinity => -p_a.log2(),
        RenyiOrder::Finite(alpha) if alpha >= 2.0 => {
            let k = (lf - 1.0).powf(2.0 / alpha);
            let ratio = p_b / p_a;
            alpha * p_a.log2() / (1.0 - alpha)
                + lf.log2() * (1.0 + k * ratio * ratio).log2() / ((1.0 - alpha) * (1.0 + k).log2())
        }
        other => {
            return Err(Error::InvalidArgument(alloc::format!(
                "IC estimate for Renyi order {other} is not available (needs alpha >= 2)"
            )))
        }
    };
    Ok(q.max(0.0))
}

/// Piecewise-linear lower estimate `Q_1(c)` of the Shannon entropy at fixed IC.
pub fn q_one_estimate(c: f64) -> f64 {
    let c = c.clamp(f64::MIN_POSITIVE, 1.0);
    let n = snapped_floor(1.0 / c);
    (n.log2() - (n + 1.0) * (n * c - 1.0) * (1.0 + 1.0 / n).log2()).max(0.0)
}

/// Minimal Shannon entropy over all distributions with IC `c`.
pub fn shannon_floor_h(c: f64) -> f64 {
    let c = c.clamp(f64::MIN_POSITIVE, 1.0);
    let n = snapped_ceil(1.0 / c);
    if n <= 1.0 {
        return 0.0;
    }
    let spread = (c * n - 1.0).max(0.0);
    let p_a = 1.0 / n + (spread / (n - 1.0)).sqrt() / n;
    let p_b = (1.0 / n - (spread * (n - 1.0)).sqrt() / n).max(0.0);
    ((n - 1.0) * neg_xlogx(p_a) + neg_xlogx(p_b)).max(0.0)
}

/// Minimal total Shannon entropy of `theta` length-`l` distributions whose ICs sum to `c_tot`.
pub fn shannon_floor_multi(theta: usize, l: usize, c_tot: f64) -> Result<f64> {
    if theta == 0 || l < 2 {
        return Err(Error::InvalidArgument("need theta >= 1 and l >= 2".into()));
    }
    let t = theta as f64;
    let lo = t / l as f64;
    if !(c_tot >= lo - IC_RANGE_TOL * t && c_tot <= t + IC_RANGE_TOL * t) {
        return Err(Error::InvalidArgument(alloc::format!("total IC {c_tot} outside [{lo}, {t}]")));
    }
    let c_tot = c_tot.clamp(lo, t);
    let n = snapped_ceil(t / c_tot);
    if n <= 1.0 {
        return Ok(0.0);
    }
    let k = snapped_floor(n * (n - 1.0) * (c_tot - t / n)).clamp(0.0, t - 1.0);
    let rest = c_tot - (t - k - 1.0) / n - k / (n - 1.0);
    Ok((t - k - 1.0) * n.log2() + k * (n - 1.0).log2() + shannon_floor_h(rest))
}

/// Binary entropy `h_bin(p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(alloc::format!("binary entropy argument {p} outside [0, 1]")));
    }
    Ok(hbin(p))
}

pub(crate) fn hbin(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    neg_xlogx(p) + neg_xlogx(1.0 - p)
}
