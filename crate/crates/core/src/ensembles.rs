//! Constructors for the measurement families used throughout the crate.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use crate::num::Float;
use crate::qmat::{unitary_power, ComplexMatrix, DensityState, Povm, WeightedEnsemble};
use crate::{Error, Result};

/// Deterministic generator used for every seeded construction.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn equal(povms: Vec<Povm>) -> WeightedEnsemble {
    WeightedEnsemble::equal_weights(povms).expect("constructed POVMs share dimension and outcome count")
}

/// Eigenbases of `sigma_x`, `sigma_y`, `sigma_z` with equal weights.
pub fn pauli_triple() -> WeightedEnsemble {
    equal(qubit_bases(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
}

fn qubit_bases(axes: &[[f64; 3]]) -> Vec<Povm> {
    axes.iter().map(|&n| Povm::qubit_axis(n).expect("unit Bloch axis")).collect()
}

/// Bloch axes of `{cos b1 X + sin b1 Z, cos b2 Y + sin b2 Z, Z}`.
///
/// The family is usually restricted to `b1 = 0, 0 <= b2 < pi/2` or `b2 = pi/2, 0 < b1 <= pi/2`;
/// any angles are accepted.
pub fn qubit_family_axes(beta1: f64, beta2: f64) -> [[f64; 3]; 3] {
    [[beta1.cos(), 0.0, beta1.sin()], [0.0, beta2.cos(), beta2.sin()], [0.0, 0.0, 1.0]]
}

pub fn qubit_family(beta1: f64, beta2: f64) -> WeightedEnsemble {
    equal(qubit_bases(&qubit_family_axes(beta1, beta2)))
}

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

/// The first `count` mutually unbiased bases of a prime dimension: the computational basis,
/// then the quadratic-phase Fourier bases (for `d = 2`: Z, X, Y eigenbases).
pub fn mub_bases(d: usize, count: usize) -> Result<Vec<Povm>> {
    if !is_prime(d) {
        return Err(Error::InvalidArgument(alloc::format!("MUB construction needs a prime dimension, got {d}")));
    }
    if count < 1 || count > d + 1 {
        return Err(Error::InvalidArgument(alloc::format!("between 1 and {} MUBs exist for d = {d}", d + 1)));
    }
    if d == 2 {
        return Ok(qubit_bases(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]][..count]));
    }
    let mut bases = vec![Povm::from_unitary(&ComplexMatrix::identity(d))?];
    for k in 0..count - 1 {
        let vectors: Vec<Vec<Complex64>> = (0..d)
            .map(|j| {
                (0..d)
                    .map(|n| {
                        let phase = (k * n * n + j * n) % d;
                        Complex64::from_polar(1.0 / (d as f64).sqrt(), TAU * phase as f64 / d as f64)
                    })
                    .collect()
            })
            .collect();
        bases.push(Povm::from_basis(&vectors)?);
    }
    Ok(bases)
}

pub fn mub_family(d: usize, count: usize) -> Result<WeightedEnsemble> {
    Ok(equal(mub_bases(d, count)?))
}

/// Diagonal phase gate used by the four-basis qutrit family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QutritPhase {
    /// `diag(1, w, w)`, `w = e^{2 pi i/3}`; equals the quadratic phase `w^{j^2}`.
    #[default]
    Quadratic,
    /// `diag(1, w, w^2)`.
    Linear,
}

impl QutritPhase {
    fn gate(self) -> ComplexMatrix {
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            QutritPhase::Quadratic => ComplexMatrix::diagonal(&[one, w, w]),
            QutritPhase::Linear => ComplexMatrix::diagonal(&[one, w, w * w]),
        }
    }
}

/// `d x d` discrete Fourier transform `F_jk = d^{-1/2} e^{2 pi i jk/d}`.
pub fn fourier_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |j, k| {
        Complex64::from_polar(1.0 / (d as f64).sqrt(), TAU * ((j * k) % d) as f64 / d as f64)
    })
}

/// Computational basis plus the columns of `F^t`, `E F^t`, `E^2 F^t` with `t = 4 beta / pi`.
pub fn qutrit_four_bases_with(beta: f64, phase: QutritPhase) -> Result<WeightedEnsemble> {
    if !(0.0..=FRAC_PI_4 + 1e-12).contains(&beta) {
        return Err(Error::InvalidArgument(alloc::format!("beta = {beta} outside [0, pi/4]")));
    }
    let ft = unitary_power(&fourier_matrix(3), beta / FRAC_PI_4)?;
    let e = phase.gate();
    let e2 = &e * &e;
    let unitaries = [ComplexMatrix::identity(3), ft.clone(), &e * &ft, &e2 * &ft];
    let povms = unitaries.iter().map(Povm::from_unitary).collect::<Result<Vec<_>>>()?;
    Ok(equal(povms))
}

pub fn qutrit_four_bases(beta: f64) -> Result<WeightedEnsemble> {
    qutrit_four_bases_with(beta, QutritPhase::default())
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary from Gram–Schmidt on a complex Ginibre matrix.
///
/// Gram–Schmidt leaves a positive real diagonal in the implied `R` factor, which is the phase
/// convention that makes the resulting `Q` exactly Haar distributed.
pub fn haar_random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..d).map(|_| (0..d).map(|_| complex_gaussian(rng)).collect()).collect();
    for j in 0..d {
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for i in 0..j {
                let proj: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let prev = cols[i].clone();
                for (x, p) in cols[j].iter_mut().zip(&prev) {
                    *x -= proj * p;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    ComplexMatrix::from_fn(d, d, |r, c| cols[c][r])
}

/// `count` Haar-random orthonormal bases with equal weights, fully determined by `seed`.
pub fn haar_random_bases(d: usize, count: usize, seed: u64) -> Result<WeightedEnsemble> {
    if d < 2 || count < 1 {
        return Err(Error::InvalidArgument("need d >= 2 and count >= 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let povms = (0..count)
        .map(|_| Povm::from_unitary(&haar_random_unitary(d, &mut rng)))
        .collect::<Result<Vec<_>>>()?;
    Ok(equal(povms))
}

/// Haar-random pure state vector.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityState {
    let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    DensityState::pure(&v).expect("Gaussian vector is nonzero")
}

/// Random full-rank mixed state `G G^dagger / Tr(G G^dagger)` from a Ginibre matrix.
pub fn random_density_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityState {
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    DensityState::from_matrix_unchecked(rho.scale_real(1.0 / tr).hermitian_part())
}

/// Uniform (flat Dirichlet) random weights.
pub fn random_weights<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| Distribution::<f64>::sample(&Exp1, rng) + 1e-12).collect();
    let s: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / s).collect();
    // push the rounding residue into the largest weight so the sum is 1 to the last ulp
    let residue = 1.0 - w.iter().sum::<f64>();
    if let Some(m) = (0..count).max_by(|&i, &j| w[i].total_cmp(&w[j])) {
        w[m] += residue;
    }
    w
}

/// White-noise smearing `eta M_i + (1 - eta) Tr(M_i)/d I`.
pub fn add_white_noise(m: &Povm, eta: f64) -> Result<Povm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(alloc::format!("noise visibility {eta} outside [0, 1]")));
    }
    let d = m.dim();
    let id = ComplexMatrix::identity(d);
    let effects = m
        .effects()
        .iter()
        .map(|e| &e.scale_real(eta) + &id.scale_real((1.0 - eta) * e.trace().re / d as f64))
        .collect();
    Ok(Povm::from_effects_unchecked(effects))
}

/// Descriptor of a measurement family, as found in scenario files.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum BasisSpec {
    Pauli,
    QubitFamily {
        beta1: f64,
        beta2: f64,
    },
    Mub {
        d: usize,
        count: usize,
    },
    QutritFour {
        beta: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        phase: QutritPhase,
    },
    Haar {
        d: usize,
        count: usize,
        seed: u64,
    },
}

impl BasisSpec {
    /// The family's measurements with equal weights.
    pub fn build(&self) -> Result<WeightedEnsemble> {
        match *self {
            BasisSpec::Pauli => Ok(pauli_triple()),
            BasisSpec::QubitFamily { beta1, beta2 } => Ok(qubit_family(beta1, beta2)),
            BasisSpec::Mub { d, count } => mub_family(d, count),
            BasisSpec::QutritFour { beta, phase } => qutrit_four_bases_with(beta, phase),
            BasisSpec::Haar { d, count, seed } => haar_random_bases(d, count, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::viewop::{operator_norm, total_view, view_operator};

    fn max_cross_overlap_deviation(bases: &[Povm], d: usize) -> f64 {
        let mut dev = 0.0f64;
        for (a, ma) in bases.iter().enumerate() {
            for mb in &bases[a + 1..] {
                for ea in ma.effects() {
                    for eb in mb.effects() {
                        dev = dev.max((ea.trace_product(eb).re - 1.0 / d as f64).abs());
                    }
                }
            }
        }
        dev
    }

    #[test]
    fn mubs_are_unbiased() {
        for d in [2, 3, 5, 7] {
            let bases = mub_bases(d, d + 1).unwrap();
            assert!(max_cross_overlap_deviation(&bases, d) < 1e-10, "d = {d}");
        }
        assert!(mub_family(4, 2).is_err());
        assert!(mub_family(3, 5).is_err());
    }

    #[test]
    fn complete_mubs_total_view_is_unit() {
        for d in [2, 3, 5] {
            let g = total_view(&mub_bases(d, d + 1).unwrap()).unwrap();
            assert!((operator_norm(&g) - 1.0).abs() < 1e-9, "d = {d}");
        }
    }

    #[test]
    fn qubit_family_reduces_to_paulis() {
        let fam = qubit_family(0.0, 0.0);
        let pauli = pauli_triple();
        for (a, b) in fam.povms().iter().zip(pauli.povms()) {
            assert!(view_operator(a).matrix().max_abs_diff(view_operator(b).matrix()) < 1e-15);
        }
    }

    #[test]
    fn qutrit_family_endpoints() {
        let e = qutrit_four_bases(FRAC_PI_4).unwrap();
        assert!(max_cross_overlap_deviation(e.povms(), 3) < 1e-8);
        let lin = qutrit_four_bases_with(FRAC_PI_4, QutritPhase::Linear).unwrap();
        assert!(max_cross_overlap_deviation(lin.povms(), 3) > 0.1);
        let e0 = qutrit_four_bases(0.0).unwrap();
        assert!((operator_norm(&total_view(e0.povms()).unwrap()) - 4.0).abs() < 1e-9);
        assert!(qutrit_four_bases(1.0).is_err());
    }

    #[test]
    fn haar_bases_are_deterministic() {
        let a = haar_random_bases(3, 2, 42).unwrap();
        let b = haar_random_bases(3, 2, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, haar_random_bases(3, 2, 43).unwrap());
    }

    #[test]
    fn white_noise_endpoints() {
        let z = Povm::qubit_axis([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(add_white_noise(&z, 1.0).unwrap().effects(), z.effects());
        let trivial = add_white_noise(&z, 0.0).unwrap();
        assert_eq!(operator_norm(&view_operator(&trivial)), 0.0);
        let half = add_white_noise(&z, 0.5).unwrap();
        assert!((operator_norm(&view_operator(&half)) - 0.25).abs() < 1e-14);
        assert!(add_white_noise(&z, 1.5).is_err());
    }

    #[test]
    fn random_weights_sum_to_one() {
        let mut rng = seeded_rng(7);
        for n in 1..6 {
            let w = random_weights(n, &mut rng);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }
}
