//! Complex matrices, quantum states and measurements.

mod eigen;
mod matrix;
mod povm;
mod state;

pub use eigen::{hermitian_eigs, hermitian_eigvals, unitary_power, HermitianEigen, HERMITIAN_TOL};
pub use matrix::ComplexMatrix;
pub use povm::{
    validate_ensemble, EnsembleDiagnostics, Povm, Violation, WeightedEnsemble, COMPLETENESS_TOL, EQUAL_TRACE_TOL,
    PSD_TOL, WEIGHT_SUM_TOL,
};
pub use state::{
    born_probabilities, invariant_information, von_neumann_entropy, DensityState, ProbVector, CLAMP_TOL,
    PROB_SUM_TOL, TRACE_TOL,
};

pub(crate) use state::normalize_probabilities;
