//! Infidelity of the cooled target state against the total evolution time.
//!
//! Each target level `ε` fixes `tau = g⁻¹(√ε)/Δ` (so the closest competing
//! level is suppressed to `g² = ε`) and `x_m = L(ε)`. The infidelity
//! `1 - <P_j>` is estimated as `1 - N̂/D̂` for the projector `P_j` onto the
//! target, with the denominator formed on the numerator's time pairs.

use std::path::{Path, PathBuf};

use qcool::cooling::CoolingFunction;
use qcool::estimators::{estimate_observable, DenominatorRoute};
use qcool::observable::Observable;
use qcool::shots::Mode;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{AtPath, ExperimentError, Result};
use crate::instance::Instance;
use crate::output::{csv_text, num, write_text};

#[derive(Copy, Clone, Debug, Serialize)]
pub struct ScalingRow {
    /// Target level `ε` of the schedule; `None` for the `tau = 0` point.
    pub epsilon: Option<f64>,
    pub tau: f64,
    pub x_m: f64,
    pub t_m: f64,
    pub n_m: usize,
    /// Mean over repetitions.
    pub infidelity_estimated: f64,
    /// Sample standard deviation over repetitions (0 for one repetition).
    pub infidelity_std: f64,
    pub repetitions: usize,
    /// `1 - |<u_j|ψ(τ)>|²` for the exactly cooled state.
    pub infidelity_oracle: f64,
    /// `(1 - p_j) g(τΔ)² / p_j`.
    pub theoretical_bound: f64,
}

pub struct ScalingReport {
    pub config: RunConfig,
    pub target: usize,
    pub overlap: f64,
    pub gap: f64,
    pub rows: Vec<ScalingRow>,
}

/// `(tau, x_m)` for target level `epsilon`.
pub fn schedule(
    cf: &CoolingFunction<f64>,
    epsilon: f64,
    gap: f64,
) -> qcool::error::Result<(f64, f64)> {
    Ok((cf.g_inverse(epsilon.sqrt())? / gap, cf.cutoff(epsilon)?))
}

pub fn run_cooling_scaling(config: &RunConfig) -> Result<ScalingReport> {
    let mut config = config.clone();
    let seed = config.resolve_seed()?;
    let inst = Instance::from_config(&config)?;
    let section = config
        .scaling
        .clone()
        .ok_or_else(|| ExperimentError::config("scaling", "missing [scaling] section"))?;
    if section.epsilons.is_empty() {
        return Err(ExperimentError::config("scaling.epsilons", "empty list"));
    }
    let repetitions = match config.mode {
        Mode::Expectation => 1,
        Mode::Shot if section.repetitions >= 1 => section.repetitions,
        Mode::Shot => {
            return Err(ExperimentError::config(
                "scaling.repetitions",
                "must be at least 1",
            ))
        }
    };
    let cf = CoolingFunction::<f64>::new(config.cooling.kind);
    if !cf.is_realizable() {
        return Err(ExperimentError::config(
            "cooling.kind",
            format!("{} is not a realizable cooling function", cf.kind()),
        ));
    }
    let n_m = config.cooling.shots;
    if n_m == 0 {
        return Err(ExperimentError::config(
            "cooling.shots",
            "must be at least 1",
        ));
    }
    let gap = inst.gap()?;
    let p = inst.overlap();
    let j = inst.target;
    let e = inst.energy_shifted();
    let projector = Observable::eigen_projector(inst.hamiltonian.n(), j)?;

    let mut points: Vec<(Option<f64>, f64, f64)> = Vec::new();
    for (i, &eps) in section.epsilons.iter().enumerate() {
        let (tau, x_m) = schedule(&cf, eps, gap).at(&format!("scaling.epsilons[{i}]"))?;
        if i == 0 && section.include_zero {
            points.push((None, 0.0, x_m));
        }
        points.push((Some(eps), tau, x_m));
    }

    let mut rows = Vec::with_capacity(points.len());
    for (epsilon, tau, x_m) in points {
        let mut values = Vec::with_capacity(repetitions);
        for r in 0..repetitions {
            let est = estimate_observable(
                &inst.es,
                cf,
                tau,
                x_m,
                e,
                &projector,
                n_m,
                seed.wrapping_add(r as u64),
                config.mode,
                DenominatorRoute::Paired,
            )?;
            values.push(1.0 - est.value);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        let oracle = inst.es.cooled_state(&cf, tau, e)?.infidelity(j);
        let g = cf.g(tau * gap);
        let row = ScalingRow {
            epsilon,
            tau,
            x_m,
            t_m: tau * x_m,
            n_m,
            infidelity_estimated: mean,
            infidelity_std: std,
            repetitions,
            infidelity_oracle: oracle,
            theoretical_bound: (1.0 - p) * g * g / p,
        };
        log::info!(
            "t_m = {:.3}: infidelity {:.4e} (oracle {:.4e})",
            row.t_m,
            mean,
            oracle
        );
        rows.push(row);
    }
    Ok(ScalingReport {
        config,
        target: j,
        overlap: p,
        gap,
        rows,
    })
}

impl ScalingReport {
    pub const COLUMNS: [&'static str; 9] = [
        "tau",
        "x_m",
        "t_m",
        "N_M",
        "infidelity_estimated",
        "infidelity_oracle",
        "theoretical_bound",
        "infidelity_std",
        "repetitions",
    ];

    pub fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    num(r.tau),
                    num(r.x_m),
                    num(r.t_m),
                    r.n_m.to_string(),
                    num(r.infidelity_estimated),
                    num(r.infidelity_oracle),
                    num(r.theoretical_bound),
                    num(r.infidelity_std),
                    r.repetitions.to_string(),
                ]
            })
            .collect();
        csv_text(&self.config, &Self::COLUMNS, &rows)
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let path = dir.join("scaling.csv");
        write_text(&path, &self.csv())?;
        Ok(vec![path])
    }
}
