use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use super::{hermitian_eigs, ComplexMatrix, HERMITIAN_TOL};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::{Error, Result};

/// Lowest admissible eigenvalue of an effect or state.
pub const PSD_TOL: f64 = 1e-10;
/// Entrywise tolerance of `sum_i M_i = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Effects with traces closer than this are considered equal.
pub const EQUAL_TRACE_TOL: f64 = 1e-9;
/// Tolerance of `sum_theta w_theta = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A single invariant violation found while validating a measurement ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Violation {
    EmptyEnsemble,
    NoEffects { povm: usize },
    EffectShape { povm: usize, effect: usize, rows: usize, cols: usize },
    NonFiniteEffect { povm: usize, effect: usize },
    EffectNotHermitian { povm: usize, effect: usize, deviation: f64 },
    EffectNotPsd { povm: usize, effect: usize, min_eigenvalue: f64 },
    Incomplete { povm: usize, deviation: f64 },
    DimensionMismatch { povm: usize, expected: usize, found: usize },
    OutcomeCountMismatch { povm: usize, expected: usize, found: usize },
    WeightCountMismatch { expected: usize, found: usize },
    NonPositiveWeight { index: usize, weight: f64 },
    WeightSum { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyEnsemble => write!(f, "ensemble has no measurements"),
            Violation::NoEffects { povm } => write!(f, "POVM {povm} has no effects"),
            Violation::EffectShape { povm, effect, rows, cols } => {
                write!(f, "POVM {povm} effect {effect} has shape {rows}x{cols}")
            }
            Violation::NonFiniteEffect { povm, effect } => write!(f, "POVM {povm} effect {effect} has non-finite entries"),
            Violation::EffectNotHermitian { povm, effect, deviation } => {
                write!(f, "POVM {povm} effect {effect} is not Hermitian (deviation {deviation:e})")
            }
            Violation::EffectNotPsd { povm, effect, min_eigenvalue } => {
                write!(f, "POVM {povm} effect {effect} has negative eigenvalue {min_eigenvalue:e}")
            }
            Violation::Incomplete { povm, deviation } => {
                write!(f, "POVM {povm} effects do not sum to identity (deviation {deviation:e})")
            }
            Violation::DimensionMismatch { povm, expected, found } => {
                write!(f, "POVM {povm} acts on dimension {found}, expected {expected}")
            }
            Violation::OutcomeCountMismatch { povm, expected, found } => {
                write!(f, "POVM {povm} has {found} outcomes, expected {expected}")
            }
            Violation::WeightCountMismatch { expected, found } => write!(f, "{found} weights given for {expected} POVMs"),
            Violation::NonPositiveWeight { index, weight } => write!(f, "weight {index} is {weight}, must be positive"),
            Violation::WeightSum { sum } => write!(f, "weights sum to {sum}, expected 1"),
        }
    }
}

/// Result of [`validate_ensemble`]: every violation found plus the equal-trace status per POVM.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleDiagnostics {
    pub violations: Vec<Violation>,
    pub equal_trace: Vec<bool>,
}

impl EnsembleDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_povm(index: usize, effects: &[ComplexMatrix], out: &mut Vec<Violation>) -> bool {
    let before = out.len();
    let Some(first) = effects.first() else {
        out.push(Violation::NoEffects { povm: index });
        return false;
    };
    let d = first.rows();
    for (k, e) in effects.iter().enumerate() {
        if e.rows() != d || e.cols() != d || d == 0 {
            out.push(Violation::EffectShape { povm: index, effect: k, rows: e.rows(), cols: e.cols() });
            continue;
        }
        if !e.is_finite() {
            out.push(Violation::NonFiniteEffect { povm: index, effect: k });
            continue;
        }
        let deviation = e.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            out.push(Violation::EffectNotHermitian { povm: index, effect: k, deviation });
            continue;
        }
        let min_eigenvalue = hermitian_eigs(e).map(|x| x.values[d - 1]).unwrap_or(f64::NAN);
        if !(min_eigenvalue >= -PSD_TOL) {
            out.push(Violation::EffectNotPsd { povm: index, effect: k, min_eigenvalue });
        }
    }
    if out.len() > before {
        return false;
    }
    let mut sum = ComplexMatrix::zeros(d, d);
    for e in effects {
        sum = &sum + e;
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(d));
    if deviation > COMPLETENESS_TOL {
        out.push(Violation::Incomplete { povm: index, deviation });
    }
    out.len() == before
}

fn has_equal_traces(effects: &[ComplexMatrix]) -> bool {
    let traces: Vec<f64> = effects.iter().map(|e| e.trace().re).collect();
    let lo = traces.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = traces.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo < EQUAL_TRACE_TOL
}

/// Checks raw POVM effects and weights against every ensemble invariant without aborting early.
pub fn validate_ensemble(povms: &[Vec<ComplexMatrix>], weights: &[f64]) -> EnsembleDiagnostics {
    let mut violations = Vec::new();
    if povms.is_empty() {
        violations.push(Violation::EmptyEnsemble);
    }
    let mut shape: Option<(usize, usize)> = None;
    let mut equal_trace = Vec::with_capacity(povms.len());
    for (i, effects) in povms.iter().enumerate() {
        let ok = check_povm(i, effects, &mut violations);
        equal_trace.push(ok && has_equal_traces(effects));
        if !ok {
            continue;
        }
        let (d, l) = (effects[0].rows(), effects.len());
        match shape {
            None => shape = Some((d, l)),
            Some((d0, l0)) => {
                if d != d0 {
                    violations.push(Violation::DimensionMismatch { povm: i, expected: d0, found: d });
                }
                if l != l0 {
                    violations.push(Violation::OutcomeCountMismatch { povm: i, expected: l0, found: l });
                }
            }
        }
    }
    if weights.len() != povms.len() {
        violations.push(Violation::WeightCountMismatch { expected: povms.len(), found: weights.len() });
    }
    for (index, &weight) in weights.iter().enumerate() {
        if !(weight > 0.0) || !weight.is_finite() {
            violations.push(Violation::NonPositiveWeight { index, weight });
        }
    }
    let sum: f64 = weights.iter().sum();
    if !weights.is_empty() && !((sum - 1.0).abs() <= WEIGHT_SUM_TOL) {
        violations.push(Violation::WeightSum { sum });
    }
    EnsembleDiagnostics { violations, equal_trace }
}

fn describe(violations: &[Violation]) -> String {
    violations.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join("; ")
}

/// A measurement: PSD effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
    equal_trace: bool,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let mut violations = Vec::new();
        if !check_povm(0, &effects, &mut violations) {
            return Err(Error::InvalidPovm(describe(&violations)));
        }
        let equal_trace = has_equal_traces(&effects);
        let effects = effects.iter().map(ComplexMatrix::hermitian_part).collect();
        Ok(Povm { effects, equal_trace })
    }

    /// Rank-1 projective measurement onto the given basis vectors (normalized here).
    pub fn from_basis(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let effects = vectors
            .iter()
            .map(|v| {
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let unit: Vec<Complex64> = v.iter().map(|z| z / n).collect();
                ComplexMatrix::outer(&unit)
            })
            .collect();
        Self::new(effects)
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        let cols: Vec<Vec<Complex64>> = (0..u.cols()).map(|c| u.column(c)).collect();
        Self::from_basis(&cols)
    }

    /// Qubit measurement of the observable `n . sigma`: effects `(I + n.sigma)/2`, `(I - n.sigma)/2`.
    pub fn qubit_axis(n: [f64; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(len > 0.0) {
            return Err(Error::InvalidArgument("zero Bloch axis".into()));
        }
        let [x, y, z] = n.map(|v| v / len);
        let effect = |s: f64| {
            ComplexMatrix::from_row_major(
                2,
                2,
                alloc::vec![
                    Complex64::new((1.0 + s * z) / 2.0, 0.0),
                    Complex64::new(s * x / 2.0, -s * y / 2.0),
                    Complex64::new(s * x / 2.0, s * y / 2.0),
                    Complex64::new((1.0 - s * z) / 2.0, 0.0),
                ],
            )
        };
        Self::new(alloc::vec![effect(1.0)?, effect(-1.0)?])
    }

    pub(crate) fn from_effects_unchecked(effects: Vec<ComplexMatrix>) -> Self {
        let equal_trace = has_equal_traces(&effects);
        Povm { effects, equal_trace }
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Equal-trace-effects flag.
    pub fn is_equal_trace(&self) -> bool {
        self.equal_trace
    }

    /// True when every effect is a rank-1 projector and there are exactly `d` of them.
    pub fn is_rank_one_projective(&self, tol: f64) -> bool {
        self.outcomes() == self.dim()
            && self.effects.iter().all(|e| {
                let tr_ok = (e.trace().re - 1.0).abs() < tol;
                let sq = e * e;
                tr_ok && sq.max_abs_diff(e) < tol
            })
    }
}

/// Measurements `M_theta` chosen with positive probabilities `w_theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEnsemble {
    povms: Vec<Povm>,
    weights: Vec<f64>,
}

impl WeightedEnsemble {
    pub fn new(povms: Vec<Povm>, weights: Vec<f64>) -> Result<Self> {
        let raw: Vec<Vec<ComplexMatrix>> = povms.iter().map(|p| p.effects.clone()).collect();
        let diag = validate_ensemble(&raw, &weights);
        if !diag.is_valid() {
            return Err(Error::InvalidEnsemble(diag.violations));
        }
        Ok(WeightedEnsemble { povms, weights })
    }

    pub fn equal_weights(povms: Vec<Povm>) -> Result<Self> {
        let n = povms.len().max(1);
        Self::new(povms, alloc::vec![1.0 / n as f64; n])
    }

    pub fn from_raw(povms: Vec<Vec<ComplexMatrix>>, weights: Vec<f64>) -> Result<Self> {
        let diag = validate_ensemble(&povms, &weights);
        if !diag.is_valid() {
            return Err(Error::InvalidEnsemble(diag.violations));
        }
        let povms = povms.into_iter().map(Povm::new).collect::<Result<Vec<_>>>()?;
        Ok(WeightedEnsemble { povms, weights })
    }

    /// Same measurements, new weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.povms.clone(), weights)
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.povms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.povms[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.povms[0].outcomes()
    }

    pub fn has_equal_weights(&self) -> bool {
        let w0 = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - w0).abs() < 1e-12)
    }

    /// Index of the first POVM without equal-trace effects.
    pub fn first_unequal_trace(&self) -> Option<usize> {
        self.povms.iter().position(|p| !p.is_equal_trace())
    }
}
