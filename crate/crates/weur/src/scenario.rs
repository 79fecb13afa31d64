//! JSON scenario files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "povms": [[ [[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]] ]],
//!   "weights": [1.0],
//!   "state": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs and matrices are lists of rows. A `family` descriptor
//! (for example `{"family": "mub", "d": 3, "count": 4}`) may replace `povms`. Missing weights
//! mean equal weights.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use weur_core::ensembles::BasisSpec;
use weur_core::qmat::{validate_ensemble, ComplexMatrix, DensityState, EnsembleDiagnostics, WeightedEnsemble};
use weur_core::Complex64;

pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povms: Option<Vec<Vec<MatrixRepr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<MatrixRepr>,
}

/// Malformed or inconsistent scenario input.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub message: String,
    pub diagnostics: Option<EnsembleDiagnostics>,
}

impl ScenarioError {
    fn new(message: impl Into<String>) -> Self {
        ScenarioError { message: message.into(), diagnostics: None }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)?;
        if let Some(d) = &self.diagnostics {
            for v in &d.violations {
                write!(f, "\n  - {v}")?;
            }
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioError {}

/// A parsed scenario: the ensemble and, optionally, the state.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ensemble: WeightedEnsemble,
    pub state: Option<DensityState>,
}

pub fn matrix_from_repr(m: &MatrixRepr, d: usize, what: &str) -> Result<ComplexMatrix, ScenarioError> {
    if m.len() != d || m.iter().any(|row| row.len() != d) {
        return Err(ScenarioError::new(format!("{what} must be a {d}x{d} matrix")));
    }
    let data: Vec<Complex64> = m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    ComplexMatrix::from_row_major(d, d, data).map_err(|e| ScenarioError::new(format!("{what}: {e}")))
}

pub fn matrix_to_repr(m: &ComplexMatrix) -> MatrixRepr {
    (0..m.rows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(format!("parsing {}", path.display())))
    }

    /// Explicit-POVM file describing `scenario`.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let e = &scenario.ensemble;
        ScenarioFile {
            dimension: e.dim(),
            povms: Some(e.povms().iter().map(|m| m.effects().iter().map(matrix_to_repr).collect()).collect()),
            family: None,
            weights: Some(e.weights().to_vec()),
            state: scenario.state.as_ref().map(|s| matrix_to_repr(s.matrix())),
        }
    }

    /// Validates the file and builds the ensemble and state.
    pub fn resolve(&self) -> Result<Scenario, ScenarioError> {
        let d = self.dimension;
        if d == 0 {
            return Err(ScenarioError::new("dimension must be positive"));
        }
        let ensemble = match (&self.povms, &self.family) {
            (Some(_), Some(_)) => return Err(ScenarioError::new("`povms` and `family` are mutually exclusive")),
            (None, None) => return Err(ScenarioError::new("one of `povms` or `family` is required")),
            (None, Some(spec)) => {
                let e = spec.build().map_err(|e| ScenarioError::new(format!("family: {e}")))?;
                if e.dim() != d {
                    return Err(ScenarioError::new(format!("family has dimension {}, file says {d}", e.dim())));
                }
                match &self.weights {
                    Some(w) => e.reweighted(w.clone()).map_err(|e| ScenarioError::new(format!("weights: {e}")))?,
                    None => e,
                }
            }
            (Some(povms), None) => {
                let mut raw = Vec::with_capacity(povms.len());
                for (i, p) in povms.iter().enumerate() {
                    let effects = p
                        .iter()
                        .enumerate()
                        .map(|(j, m)| matrix_from_repr(m, d, &format!("effect {j} of POVM {i}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    raw.push(effects);
                }
                let weights = self.weights.clone().unwrap_or_else(|| vec![1.0 / raw.len().max(1) as f64; raw.len()]);
                let diagnostics = validate_ensemble(&raw, &weights);
                if !diagnostics.is_valid() {
                    return Err(ScenarioError { message: "invalid measurement ensemble".into(), diagnostics: Some(diagnostics) });
                }
                WeightedEnsemble::from_raw(raw, weights).map_err(|e| ScenarioError::new(e.to_string()))?
            }
        };
        let state = match &self.state {
            None => None,
            Some(m) => Some(
                DensityState::new(matrix_from_repr(m, d, "state")?)
                    .map_err(|e| ScenarioError::new(format!("state: {e}")))?,
            ),
        };
        Ok(Scenario { ensemble, state })
    }

    /// Diagnostics for the explicit POVMs (or the built family) without failing on violations.
    pub fn diagnostics(&self) -> Result<EnsembleDiagnostics, ScenarioError> {
        match (&self.povms, &self.family) {
            (Some(povms), None) => {
                let raw = povms
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        p.iter()
                            .enumerate()
                            .map(|(j, m)| matrix_from_repr(m, self.dimension, &format!("effect {j} of POVM {i}")))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let weights = self.weights.clone().unwrap_or_else(|| vec![1.0 / raw.len().max(1) as f64; raw.len()]);
                Ok(validate_ensemble(&raw, &weights))
            }
            _ => {
                let s = self.resolve()?;
                let raw: Vec<Vec<ComplexMatrix>> = s.ensemble.povms().iter().map(|m| m.effects().to_vec()).collect();
                Ok(validate_ensemble(&raw, s.ensemble.weights()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAULI_FAMILY: &str = r#"{"dimension": 2, "family": {"family": "pauli"}}"#;

    #[test]
    fn family_file_resolves() {
        let s = ScenarioFile::from_json(PAULI_FAMILY).unwrap().resolve().unwrap();
        assert_eq!(s.ensemble.len(), 3);
        assert!(s.state.is_none());
    }

    #[test]
    fn explicit_round_trip() {
        let s = ScenarioFile::from_json(PAULI_FAMILY).unwrap().resolve().unwrap();
        let file = ScenarioFile::from_scenario(&s);
        let text = serde_json::to_string(&file).unwrap();
        let back = ScenarioFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        let again = back.resolve().unwrap();
        assert_eq!(again.ensemble, s.ensemble);
    }

    #[test]
    fn conflicting_sources_are_rejected() {
        let s = ScenarioFile::from_json(PAULI_FAMILY).unwrap().resolve().unwrap();
        let mut file = ScenarioFile::from_scenario(&s);
        file.family = Some(BasisSpec::Pauli);
        assert!(file.resolve().unwrap_err().message.contains("mutually exclusive"));
        assert!(ScenarioFile::from_json(r#"{"dimension": 2}"#).unwrap().resolve().is_err());
        assert!(ScenarioFile::from_json(r#"{"dimension": 2, "extra": 1}"#).is_err());
    }

    #[test]
    fn incomplete_povm_reports_violations() {
        let text = r#"{"dimension": 2, "povms": [[ [[[0,0],[0,0]],[[0,0],[0.9,0]]] ]]}"#;
        let err = ScenarioFile::from_json(text).unwrap().resolve().unwrap_err();
        assert!(!err.diagnostics.unwrap().violations.is_empty());
    }
}
