use alloc::format;
use alloc::vec::Vec;
use core::ops::Deref;

use num_complex::Complex64;

use super::{hermitian_eigs, ComplexMatrix, Povm, PSD_TOL};
use crate::num::neg_xlogx;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::{Error, Result};

/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Normalization tolerance for probability vectors.
pub const PROB_SUM_TOL: f64 = 1e-10;
/// Negative Born probabilities above `-CLAMP_TOL` are treated as zero.
pub const CLAMP_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace `d x d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
}

impl DensityState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = matrix.hermiticity_deviation();
        if dev > super::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {} + {}i", tr.re, tr.im)));
        }
        let min_eig = hermitian_eigs(&matrix)?.values.last().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(DensityState { matrix: matrix.hermitian_part() })
    }

    /// `|psi><psi|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize state vector (norm {norm})")));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(DensityState { matrix: ComplexMatrix::outer(&unit) })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityState { matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    /// Qubit state `(I + r . sigma) / 2` for a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector has length {len}")));
        }
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            alloc::vec![
                Complex64::new((1.0 + r[2]) / 2.0, 0.0),
                Complex64::new(r[0] / 2.0, -r[1] / 2.0),
                Complex64::new(r[0] / 2.0, r[1] / 2.0),
                Complex64::new((1.0 - r[2]) / 2.0, 0.0),
            ],
        )?;
        Ok(DensityState { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.hs_inner(&self.matrix).re
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        let m = &(u * &self.matrix) * &u.adjoint();
        Ok(DensityState { matrix: m.hermitian_part() })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        DensityState { matrix }
    }
}

/// Nonnegative probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty probability vector".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidArgument(format!("invalid probability {bad}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}")));
        }
        Ok(ProbVector(probs))
    }

    pub fn uniform(l: usize) -> Self {
        ProbVector(alloc::vec![1.0 / l as f64; l])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Clamps tiny negative probabilities and renormalizes.
pub(crate) fn normalize_probabilities(mut probs: Vec<f64>) -> Result<ProbVector> {
    for p in probs.iter_mut() {
        if *p < 0.0 {
            if *p < -CLAMP_TOL {
                return Err(Error::Numerical(format!("negative probability {p:e}")));
            }
            *p = 0.0;
        }
    }
    let sum: f64 = probs.iter().sum();
    if !(sum > 0.0) || (sum - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("probabilities sum to {sum}")));
    }
    probs.iter_mut().for_each(|p| *p /= sum);
    Ok(ProbVector(probs))
}

/// Born-rule outcome distribution `p_i = Re Tr(M_i rho)`.
pub fn born_probabilities(m: &Povm, s: &DensityState) -> Result<ProbVector> {
    if m.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: s.dim() });
    }
    let probs = m.effects().iter().map(|e| e.trace_product(s.matrix()).re).collect();
    normalize_probabilities(probs)
}

/// Operationally invariant information `Tr(rho^2) - 1/d`.
pub fn invariant_information(s: &DensityState) -> f64 {
    s.purity() - 1.0 / s.dim() as f64
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(s: &DensityState) -> f64 {
    // The matrix was validated Hermitian at construction.
    hermitian_eigs(s.matrix())
        .map(|e| e.values.iter().map(|&l| neg_xlogx(l.max(0.0))).sum::<f64>())
        .unwrap_or(f64::NAN)
        .max(0.0)
}
