//! Run configuration.
//!
//! Configs are TOML files with top-level keys and one level of sections;
//! the full schema is documented in `docs/config.md`.

use std::path::PathBuf;

use qcool::cooling::CoolingKind;
use qcool::estimators::DenominatorRoute;
use qcool::models::ModelSpec;
use qcool::shots::Mode;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Eigenvector index (ascending energy); defaults to the largest overlap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    /// Also write the raw shot records.
    #[serde(default)]
    pub shot_log: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSection>,
    #[serde(default)]
    pub cooling: CoolingSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateSection>,
}

fn default_mode() -> Mode {
    Mode::Expectation
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    /// Leftmost character is qubit 0; `1` is the `-1` eigenstate of `Z`.
    pub bits: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingSection {
    #[serde(default = "default_kind")]
    pub kind: CoolingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_m: Option<f64>,
    /// Target accuracy for deriving `tau` and `x_m` from the observable budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_shots")]
    pub shots: usize,
}

fn default_kind() -> CoolingKind {
    CoolingKind::Gaussian
}

fn default_shots() -> usize {
    100_000
}

impl Default for CoolingSection {
    fn default() -> Self {
        CoolingSection {
            kind: default_kind(),
            tau: None,
            taus: None,
            x_m: None,
            epsilon: None,
            shots: default_shots(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// Window bounds in the original energy frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// Expected level spacing; defaults to the smallest gap between
    /// eigenvalues carrying more than 1% of the initial state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_guess: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyChoice {
    /// The exact target eigenvalue.
    Exact,
    /// The highest peak of a prior scan.
    Scan,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    /// An energy in the original frame.
    Value(f64),
    Choice(EnergyChoice),
}

impl Default for EnergySpec {
    fn default() -> Self {
        EnergySpec::Choice(EnergyChoice::Exact)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSection {
    /// Lines of the Pauli-sum text format, e.g. `"0.125 ZIIIIIII"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Use the projector onto the target eigenvector.
    #[serde(default)]
    pub projector: bool,
    #[serde(default)]
    pub energy: EnergySpec,
    #[serde(default = "default_route")]
    pub route: DenominatorRoute,
    /// Derive `tau`, `x_m` and the shot count from the observable budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default)]
    pub loose: bool,
}

fn default_route() -> DenominatorRoute {
    DenominatorRoute::Independent
}

fn default_k() -> f64 {
    32.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    /// Target infidelity levels; each gives `tau = g⁻¹(√ε)/Δ`, `x_m = L(ε)`.
    pub epsilons: Vec<f64>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Prepend the `tau = 0` point.
    #[serde(default = "yes")]
    pub include_zero: bool,
}

fn default_repetitions() -> usize {
    10
}

fn yes() -> bool {
    true
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetTarget {
    Observable,
    Energy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub target: BudgetTarget,
    /// Kinds to tabulate; defaults to all realizable kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<CoolingKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Overlap and gap; taken from the model's exact spectrum when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default)]
    pub loose: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    #[serde(default = "default_shots")]
    pub draws: usize,
}

impl RunConfig {
    /// Parses TOML text; errors name the offending field.
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| ExperimentError::config("<document>", e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ExperimentError::config(
                if path.is_empty() {
                    "<document>".into()
                } else {
                    path
                },
                e.into_inner().to_string(),
            )
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ExperimentError::config("--config", format!("cannot read {}: {e}", path.display()))
        })?;
        RunConfig::from_toml(&text)
    }

    /// A config with only defaults, for commands that need no file.
    pub fn empty() -> Self {
        RunConfig::from_toml("").expect("defaults parse")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The seed, required in shot mode and defaulting to 0 otherwise.
    pub fn resolve_seed(&mut self) -> Result<u64> {
        match (self.seed, self.mode) {
            (Some(s), _) => Ok(s),
            (None, Mode::Shot) => Err(ExperimentError::config(
                "seed",
                "a seed is required in shot mode",
            )),
            (None, Mode::Expectation) => {
                self.seed = Some(0);
                Ok(0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"
seed = 1
mode = "expectation"

[model]
family = "heisenberg_xxz"
n = 8
h = 1.0

[state]
bits = "01010101"

[cooling]
kind = "gaussian"
tau = 1.7
x_m = 4.4
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = RunConfig::from_toml(FIG2).unwrap();
        assert_eq!(c.cooling.shots, 100_000);
        assert_eq!(c.mode, Mode::Expectation);
        assert_eq!(
            c.model,
            Some(ModelSpec::HeisenbergXxz {
                n: 8,
                j: 1.0,
                zz_anisotropy: 2.0,
                h: 1.0,
                periodic: true
            })
        );
        let again = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn errors_carry_field_paths() {
        let e = RunConfig::from_toml("[cooling]\nkind = \"boxcar\"\n").unwrap_err();
        assert!(e.to_string().contains("cooling.kind"), "{e}");
        let e = RunConfig::from_toml("[cooling]\nshots = -3\n").unwrap_err();
        assert!(e.to_string().contains("cooling.shots"), "{e}");
        let e = RunConfig::from_toml("[scan]\nspacingg = 0.1\n").unwrap_err();
        assert!(e.to_string().contains("scan"), "{e}");
        assert_eq!(e.exit_code(), 2);
        assert!(RunConfig::from_toml("x = [").is_err());
    }

    #[test]
    fn energy_spec_forms() {
        let c = RunConfig::from_toml("[observable]\nprojector = true\nenergy = -19.1\n").unwrap();
        assert_eq!(c.observable.unwrap().energy, EnergySpec::Value(-19.1));
        let c =
            RunConfig::from_toml("[observable]\nprojector = true\nenergy = \"scan\"\n").unwrap();
        assert_eq!(
            c.observable.unwrap().energy,
            EnergySpec::Choice(EnergyChoice::Scan)
        );
    }

    #[test]
    fn seed_rules() {
        let mut c = RunConfig::from_toml("mode = \"shot\"").unwrap();
        assert!(c.resolve_seed().is_err());
        let mut c = RunConfig::empty();
        assert_eq!(c.resolve_seed().unwrap(), 0);
        assert_eq!(c.seed, Some(0));
    }
}
