//! Weighted entropic uncertainty bounds for equal-trace POVM ensembles.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the numerical side only:
//!
//! - [`qmat`]: dense complex matrices, a Hermitian eigensolver, states, POVMs and
//!   weighted measurement ensembles.
//! - [`viewop`]: view operators on the doubled Hilbert space, their norms and the
//!   total measurement exclusivity.
//! - [`entropy`]: Rényi/Shannon entropies, index of coincidence, and the estimation
//!   functions that turn an IC bound into an entropy bound.
//! - [`bounds`]: every uncertainty bound (IC-based and overlap-based) plus the
//!   numerically optimal bound over pure states.
//! - [`ensembles`]: constructors for the measurement families used in practice.
//! - [`steering`]: the entropic steering criterion and noise-threshold searches.
//!
//! All logarithms are base 2.
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod num;
pub mod optim;

pub mod bounds;
pub mod ensembles;
pub mod entropy;
pub mod qmat;
pub mod steering;
pub mod viewop;

pub use error::{Error, Result};
pub use num_complex::Complex64;
