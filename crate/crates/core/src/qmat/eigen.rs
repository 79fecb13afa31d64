//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slower than tridiagonal QR for large inputs but yields eigenvalues with
//! small relative error and orthonormal eigenvectors to machine precision, which the
//! norm comparisons elsewhere in the crate rely on.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::ComplexMatrix;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::{Error, Result};

/// Entrywise Hermiticity tolerance for inputs to [`hermitian_eigs`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| self.vectors[(r, k)] * self.values[k] * self.vectors[(c, k)].conj()).sum()
        })
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigs(m).map(|e| e.values)
}

/// Annihilates `a[(p, q)]` with `a <- U^dagger a U`, `v <- v U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if r < 1e-300 || (app.abs() + r == app.abs() && aqq.abs() + r == aqq.abs() && r < 1e-18) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * u_qp;
        a[(k, q)] = akp * s + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * u_qp.conj();
        a[(q, k)] = apk * s + aqk * u_qq.conj();
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
}

/// Real power `U^t` of a unitary matrix, with eigenphases on the principal branch (-pi, pi].
///
/// The unitary is diagonalised through the Hermitian combination `H1 + sqrt(2) H2` of its
/// commuting Hermitian and anti-Hermitian parts.
pub fn unitary_power(u: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let n = u.rows();
    let unitarity = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(n));
    if unitarity > 1e-9 {
        return Err(Error::InvalidArgument(alloc::format!("matrix is not unitary (deviation {unitarity:e})")));
    }
    let ud = u.adjoint();
    let mix = core::f64::consts::SQRT_2;
    let h = ComplexMatrix::from_fn(n, n, |r, c| {
        let re_part = (u[(r, c)] + ud[(r, c)]) * 0.5;
        let im_part = (u[(r, c)] - ud[(r, c)]) * Complex64::new(0.0, -0.5);
        re_part + im_part * mix
    });
    let eig = hermitian_eigs(&h)?;
    let vecs = &eig.vectors;
    let mut powered = Vec::with_capacity(n);
    for k in 0..n {
        let col = vecs.column(k);
        let ucol = u.mul_vec(&col);
        let lambda: Complex64 = col.iter().zip(&ucol).map(|(a, b)| a.conj() * b).sum();
        let mut phi = lambda.arg();
        if phi <= -core::f64::consts::PI {
            phi += 2.0 * core::f64::consts::PI;
        }
        powered.push(Complex64::from_polar(1.0, t * phi));
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| (0..n).map(|k| vecs[(r, k)] * powered[k] * vecs[(c, k)].conj()).sum()))
}
