//! Resource tables for the observable and energy budgets.

use qcool::budget::{budget_for_energy, budget_for_observable, Budget, Target};
use qcool::cooling::{CoolingFunction, CoolingKind};
use serde::Serialize;

use crate::config::{BudgetTarget, RunConfig};
use crate::error::{AtPath, ExperimentError, Result};
use crate::instance::Instance;
use crate::output::num;

#[derive(Clone, Debug, Serialize)]
pub struct BudgetReport {
    #[serde(skip)]
    pub config: RunConfig,
    pub rows: Vec<Budget<f64>>,
}

pub fn run_budget(config: &RunConfig) -> Result<BudgetReport> {
    let mut config = config.clone();
    let mut section = config
        .budget
        .clone()
        .ok_or_else(|| ExperimentError::config("budget", "missing [budget] section"))?;
    let needs_gap = section.target == BudgetTarget::Observable && section.gap.is_none();
    if section.overlap.is_none() || needs_gap {
        if config.model.is_none() {
            return Err(ExperimentError::config(
                "budget.overlap",
                "give `overlap` (and `gap`) or a [model] to take them from",
            ));
        }
        let inst = Instance::from_config(&config)?;
        section.overlap = Some(section.overlap.unwrap_or_else(|| inst.overlap()));
        if needs_gap {
            section.gap = Some(inst.gap()?);
        }
    }
    let kinds = section
        .kinds
        .clone()
        .unwrap_or_else(|| CoolingKind::REALIZABLE.to_vec());
    let p = section.overlap.unwrap();
    let mut rows = Vec::with_capacity(kinds.len());
    for kind in &kinds {
        let cf = CoolingFunction::<f64>::new(*kind);
        let b = match section.target {
            BudgetTarget::Observable => {
                let eps = section.epsilon.ok_or_else(|| {
                    ExperimentError::config("budget.epsilon", "required for the observable target")
                })?;
                budget_for_observable(&cf, eps, p, section.gap.unwrap(), section.k, section.loose)
                    .at("budget")?
            }
            BudgetTarget::Energy => {
                let kappa = section.kappa.ok_or_else(|| {
                    ExperimentError::config("budget.kappa", "required for the energy target")
                })?;
                budget_for_energy(&cf, kappa, p, section.k, section.loose).at("budget")?
            }
        };
        rows.push(b);
    }
    section.kinds = Some(kinds);
    config.budget = Some(section);
    Ok(BudgetReport { config, rows })
}

impl BudgetReport {
    /// Aligned text table: kind, target, τ, x_m, t_m, N_M, δ.
    pub fn table(&self) -> String {
        let header = ["kind", "target", "tau", "x_m", "t_m", "N_M", "delta"];
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for b in &self.rows {
            let target = match b.target {
                Target::Observable { epsilon, .. } => format!("observable(eps={})", num(epsilon)),
                Target::Energy { kappa, .. } => format!("energy(kappa={})", num(kappa)),
            };
            cells.push(vec![
                b.kind.to_string(),
                target,
                format!("{:.6}", b.tau),
                format!("{:.6}", b.x_m),
                format!("{:.6}", b.t_m),
                b.n_m.to_string(),
                format!("{:.6e}", b.delta),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for r in cells {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        crate::output::json_text(&self.config, self)
    }
}
