//! Hamiltonian, initial state and target eigenvector of a run.

use qcool::engine::EigenSystem;
use qcool::models::basis_state_n;
use qcool::observable::Observable;
use qcool::pauli::PauliSum;
use serde::Serialize;

use crate::config::{ObservableSection, RunConfig};
use crate::error::{AtPath, ExperimentError, Result};

/// Eigenvalues whose overlap is at most this are ignored when measuring gaps.
pub const GAP_OVERLAP_FLOOR: f64 = 1e-6;
/// Eigenvalues with more overlap than this count as spectral features.
pub const FEATURE_OVERLAP: f64 = 0.01;

pub struct Instance {
    pub hamiltonian: PauliSum<f64>,
    pub es: EigenSystem<f64>,
    pub target: usize,
}

/// One row of the exact spectrum.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct Level {
    pub index: usize,
    pub energy: f64,
    pub energy_shifted: f64,
    pub overlap: f64,
}

impl Instance {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        let model = config
            .model
            .as_ref()
            .ok_or_else(|| ExperimentError::config("model", "missing [model] section"))?;
        let hamiltonian: PauliSum<f64> = model.build().at("model")?;
        let state = config
            .state
            .as_ref()
            .ok_or_else(|| ExperimentError::config("state", "missing [state] section"))?;
        let psi = basis_state_n(&state.bits, hamiltonian.n()).at("state.bits")?;
        let es = EigenSystem::eigendecompose(&hamiltonian, &psi)?;
        let target = match config.target {
            Some(t) if t >= es.dim() => {
                return Err(ExperimentError::config(
                    "target",
                    format!("index {t} out of range for dimension {}", es.dim()),
                ))
            }
            Some(t) => t,
            None => es.largest_overlap_index(),
        };
        Ok(Instance {
            hamiltonian,
            es,
            target,
        })
    }

    pub fn shift(&self) -> f64 {
        self.es.shift()
    }

    pub fn overlap(&self) -> f64 {
        self.es.overlaps()[self.target]
    }

    pub fn energy(&self) -> f64 {
        self.es.energies()[self.target]
    }

    pub fn energy_shifted(&self) -> f64 {
        self.es.shifted_energies()[self.target]
    }

    /// Distance from the target to the nearest other level the initial
    /// state overlaps with.
    pub fn gap(&self) -> Result<f64> {
        self.es.gap(self.target, GAP_OVERLAP_FLOOR).ok_or_else(|| {
            ExperimentError::config(
                "target",
                "the initial state overlaps a single level, so no gap is defined",
            )
        })
    }

    /// Smallest spacing between distinct levels with overlap above
    /// [`FEATURE_OVERLAP`], or 1 when there is at most one such level.
    pub fn feature_spacing(&self) -> f64 {
        let mut e: Vec<f64> = self
            .es
            .energies()
            .iter()
            .zip(self.es.overlaps())
            .filter(|(_, &p)| p > FEATURE_OVERLAP)
            .map(|(&e, _)| e)
            .collect();
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        e.windows(2)
            .map(|w| w[1] - w[0])
            .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.min(d))))
            .unwrap_or(1.0)
    }

    pub fn levels(&self) -> Vec<Level> {
        (0..self.es.dim())
            .map(|i| Level {
                index: i,
                energy: self.es.energies()[i],
                energy_shifted: self.es.shifted_energies()[i],
                overlap: self.es.overlaps()[i],
            })
            .collect()
    }

    /// Builds the observable described by an `[observable]` section.
    pub fn observable(&self, section: &ObservableSection) -> Result<Observable<f64>> {
        let n = self.hamiltonian.n();
        let sources = usize::from(section.terms.is_some())
            + usize::from(section.file.is_some())
            + usize::from(section.projector);
        if sources != 1 {
            return Err(ExperimentError::config(
                "observable",
                "give exactly one of `terms`, `file` or `projector = true`",
            ));
        }
        if section.projector {
            return Ok(Observable::eigen_projector(n, self.target)?);
        }
        let (text, path) = match (&section.terms, &section.file) {
            (Some(lines), _) => (lines.join("\n"), "observable.terms"),
            (_, Some(file)) => (
                std::fs::read_to_string(file).map_err(|e| {
                    ExperimentError::config(
                        "observable.file",
                        format!("cannot read {}: {e}", file.display()),
                    )
                })?,
                "observable.file",
            ),
            _ => unreachable!(),
        };
        let sum = PauliSum::parse(&text).at(path)?;
        if sum.n() != n {
            return Err(ExperimentError::config(
                path,
                format!("observable acts on {} qubits, model has {n}", sum.n()),
            ));
        }
        if sum.is_empty() {
            return Err(ExperimentError::config(path, "observable has no terms"));
        }
        Ok(Observable::from(&sum))
    }
}
