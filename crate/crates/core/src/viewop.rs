//! View operators of measurements on the doubled space `H_d (x) H_d`.
//!
//! For an effect `M` with traceless part `M~ = M - Tr(M)/d I`, the vector
//! `|M~> = sqrt(d) (M~ (x) I)|psi_d>` with `|psi_d> = d^{-1/2} sum_i |i>|i>*` is the row-major
//! vectorisation of `M~`. The view operator of a POVM is `sum_i |M~_i><M~_i|`.
//! Operators are stored densely on the full `d^2` space; they annihilate `|psi_d>`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::qmat::{hermitian_eigs, hermitian_eigvals, ComplexMatrix, Povm, WeightedEnsemble};
use crate::{Error, Result};

/// Positive semidefinite operator on `H_d (x) H_d` built from measurement effects.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ViewOperator {
    pub fn zero(dim: usize) -> Self {
        ViewOperator { dim, matrix: ComplexMatrix::zeros(dim * dim, dim * dim) }
    }

    /// Local dimension `d` (the operator itself is `d^2 x d^2`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Descending spectrum.
    pub fn spectrum(&self) -> Vec<f64> {
        // View operators are Hermitian by construction.
        hermitian_eigvals(&self.matrix).expect("view operator is Hermitian")
    }

    fn accumulate(&mut self, other: &ViewOperator, weight: f64) {
        self.matrix = &self.matrix + &other.matrix.scale_real(weight);
    }
}

/// `|psi_d> = d^{-1/2} sum_i |i> (x) |i>*` in the computational basis.
pub fn maximally_entangled_vector(d: usize) -> Vec<Complex64> {
    let mut v = alloc::vec![Complex64::new(0.0, 0.0); d * d];
    let amp = 1.0 / crate::num::Float::sqrt(d as f64);
    for i in 0..d {
        v[i * d + i] = Complex64::new(amp, 0.0);
    }
    v
}

fn traceless_vector(effect: &ComplexMatrix) -> Vec<Complex64> {
    let d = effect.rows();
    let shift = effect.trace() / d as f64;
    let mut v = effect.as_slice().to_vec();
    for i in 0..d {
        v[i * d + i] -= shift;
    }
    v
}

/// View operator `G(M) = sum_i |M~_i><M~_i|`.
pub fn view_operator(m: &Povm) -> ViewOperator {
    let d = m.dim();
    let mut g = ViewOperator::zero(d);
    let n = d * d;
    for effect in m.effects() {
        let v = traceless_vector(effect);
        for r in 0..n {
            if v[r].norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..n {
                g.matrix[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    g
}

/// Weighted average view operator `g = sum_theta w_theta G(M_theta)`.
pub fn average_view(e: &WeightedEnsemble) -> ViewOperator {
    let mut g = ViewOperator::zero(e.dim());
    for (m, &w) in e.povms().iter().zip(e.weights()) {
        g.accumulate(&view_operator(m), w);
    }
    g
}

/// Total view operator `G_tot = sum_theta G(M_theta)`.
pub fn total_view(povms: &[Povm]) -> Result<ViewOperator> {
    let Some(first) = povms.first() else {
        return Err(Error::InvalidArgument("no measurements".into()));
    };
    let d = first.dim();
    let mut g = ViewOperator::zero(d);
    for m in povms {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.dim() });
        }
        g.accumulate(&view_operator(m), 1.0);
    }
    Ok(g)
}

/// Largest eigenvalue, clamped at zero.
pub fn operator_norm(v: &ViewOperator) -> f64 {
    v.spectrum().first().copied().unwrap_or(0.0).max(0.0)
}

/// Effect overlaps `W_{(i,theta),(j,theta')} = Tr(M_{i|theta} M_{j|theta'})`, ordered by POVM then outcome.
pub fn overlap_matrix(povms: &[Povm]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = povms.first() else {
        return Ok(Vec::new());
    };
    let d = first.dim();
    if let Some(bad) = povms.iter().find(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    let effects: Vec<&ComplexMatrix> = povms.iter().flat_map(|m| m.effects()).collect();
    Ok(effects.iter().map(|a| effects.iter().map(|b| a.trace_product(b).re).collect()).collect())
}

/// Descending eigenvalues of a real symmetric matrix given as rows.
pub fn symmetric_spectrum(w: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = w.len();
    let m = ComplexMatrix::from_fn(n, n, |r, c| Complex64::new(w[r][c], 0.0));
    Ok(hermitian_eigs(&m)?.values)
}

/// Norms and spectra summarising the informational content of an ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ViewReport {
    /// `||g||`.
    pub g_avg_norm: f64,
    /// `||G_tot||`.
    pub g_tot_norm: f64,
    /// `Theta - ||G_tot||`.
    pub exclusivity: f64,
    pub g_avg_spectrum: Vec<f64>,
    pub g_tot_spectrum: Vec<f64>,
}

pub fn view_report(e: &WeightedEnsemble) -> ViewReport {
    let g_avg_spectrum = average_view(e).spectrum();
    let g_tot_spectrum = total_view(e.povms()).expect("ensemble is non-empty with common dimension").spectrum();
    let g_avg_norm = g_avg_spectrum[0].max(0.0);
    let g_tot_norm = g_tot_spectrum[0].max(0.0);
    ViewReport {
        g_avg_norm,
        g_tot_norm,
        exclusivity: e.len() as f64 - g_tot_norm,
        g_avg_spectrum,
        g_tot_spectrum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn z_basis() -> Povm {
        Povm::qubit_axis([0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn trivial_povm_has_zero_view() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let m = Povm::new(vec![half.clone(), half]).unwrap();
        assert_eq!(operator_norm(&view_operator(&m)), 0.0);
        assert!(view_operator(&m).matrix().frobenius_norm() < 1e-15);
    }

    #[test]
    fn qubit_basis_view_is_rank_one_projector() {
        let g = view_operator(&z_basis());
        let spec = g.spectrum();
        assert!((spec[0] - 1.0).abs() < 1e-14);
        assert!(spec[1..].iter().all(|x| x.abs() < 1e-14));
        let psi = maximally_entangled_vector(2);
        assert!(g.matrix().mul_vec(&psi).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn noisy_povm_view_scales_quadratically() {
        let eta = 0.3;
        let clean = Povm::qubit_axis([0.2, -0.5, 0.7]).unwrap();
        let noisy = Povm::new(
            clean
                .effects()
                .iter()
                .map(|e| &e.scale_real(eta) + &ComplexMatrix::identity(2).scale_real((1.0 - eta) / 2.0))
                .collect(),
        )
        .unwrap();
        let expect = view_operator(&clean).matrix().scale_real(eta * eta);
        assert!(view_operator(&noisy).matrix().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn identical_bases_have_total_norm_two() {
        let g = total_view(&[z_basis(), z_basis()]).unwrap();
        assert!((operator_norm(&g) - 2.0).abs() < 1e-14);
        let e = WeightedEnsemble::new(vec![z_basis(), z_basis()], vec![0.3, 0.7]).unwrap();
        assert!(average_view(&e).matrix().max_abs_diff(view_operator(&z_basis()).matrix()) < 1e-15);
    }

    #[test]
    fn overlap_matrix_of_two_mubs() {
        let w = overlap_matrix(&[z_basis(), Povm::qubit_axis([1.0, 0.0, 0.0]).unwrap()]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((w[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
                assert!((w[i][2 + j] - 0.5).abs() < 1e-15);
                assert!((w[2 + i][j] - 0.5).abs() < 1e-15);
            }
        }
        assert!(total_view(&[]).is_err());
    }
}
