//! Eigenstate property estimation `<Ô> = N̂/D̂`.

use std::path::{Path, PathBuf};

use qcool::budget::{budget_for_observable, Budget};
use qcool::cooling::CoolingFunction;
use qcool::estimators::{estimate_observable, find_peaks, scan_energy, ObservableEstimate};
use serde::Serialize;

use crate::config::{EnergyChoice, EnergySpec, RunConfig, ScanSection};
use crate::error::{AtPath, ExperimentError, Result};
use crate::instance::Instance;
use crate::output::{csv_text, json_text, num, write_text};

/// Offset applied to the seed of the prior energy scan so that it does not
/// share shots with the normalization batch of the estimate itself.
const SCAN_SEED_OFFSET: u64 = 0x5CA7;

#[derive(Clone, Debug, Serialize)]
pub struct ObservableReport {
    #[serde(skip)]
    pub config: RunConfig,
    pub target: usize,
    pub overlap: f64,
    pub gap: Option<f64>,
    pub tau: f64,
    pub x_m: f64,
    pub t_m: f64,
    pub n_m: usize,
    /// Energy the estimate was re-weighted at, original frame.
    pub energy: f64,
    pub energy_shifted: f64,
    pub exact_energy: f64,
    pub o_hat: f64,
    pub d_hat: f64,
    pub n_hat: f64,
    pub stderr_d: f64,
    pub stderr_n: f64,
    pub one_norm: f64,
    /// `<u_j|O|u_j>`.
    pub oracle: f64,
    pub abs_error: f64,
    pub budget: Option<Budget<f64>>,
    /// `ε(‖O‖₁ + 1)` when a budget was used.
    pub error_bound: Option<f64>,
    #[serde(skip)]
    pub estimate: ObservableEstimate<f64>,
}

pub fn run_observable(config: &RunConfig) -> Result<ObservableReport> {
    let mut config = config.clone();
    let seed = config.resolve_seed()?;
    let inst = Instance::from_config(&config)?;
    let section = config
        .observable
        .clone()
        .ok_or_else(|| ExperimentError::config("observable", "missing [observable] section"))?;
    let observable = inst.observable(&section)?;
    let cf = CoolingFunction::<f64>::new(config.cooling.kind);
    if !cf.is_realizable() {
        return Err(ExperimentError::config(
            "cooling.kind",
            format!("{} is not a realizable cooling function", cf.kind()),
        ));
    }
    if config.cooling.taus.is_some() {
        return Err(ExperimentError::config(
            "cooling.taus",
            "the observable run takes a single `tau`",
        ));
    }
    let gap = inst.gap().ok();
    let budget = match section.epsilon {
        Some(eps) => {
            let gap = gap.ok_or_else(|| {
                ExperimentError::config("observable.epsilon", "a budget needs a spectral gap")
            })?;
            let b = budget_for_observable(&cf, eps, inst.overlap(), gap, section.k, section.loose)
                .at("observable.epsilon")?;
            config.cooling.tau = Some(config.cooling.tau.unwrap_or(b.tau));
            config.cooling.x_m = Some(config.cooling.x_m.unwrap_or(b.x_m));
            config.cooling.shots = usize::try_from(b.n_m).map_err(|_| {
                ExperimentError::config("observable.epsilon", "shot count overflow")
            })?;
            Some(b)
        }
        None => None,
    };
    let (tau, x_m) = crate::times::resolve_times(&mut config, &inst)?[0];
    let n_m = config.cooling.shots;
    let shift = inst.shift();
    let energy_shifted = match section.energy {
        EnergySpec::Value(v) => v + shift,
        EnergySpec::Choice(EnergyChoice::Exact) => inst.energy_shifted(),
        EnergySpec::Choice(EnergyChoice::Scan) => {
            let scan = scan_section(&config, &inst, tau)?;
            let grid = qcool::estimators::energy_grid(
                scan.e_min.unwrap() + shift,
                scan.e_max.unwrap() + shift,
                scan.spacing.unwrap(),
            )
            .map_err(|e| ExperimentError::config("scan", e.to_string()))?;
            let curve = scan_energy(
                &inst.es,
                cf,
                tau,
                x_m,
                &grid,
                n_m,
                seed.wrapping_add(SCAN_SEED_OFFSET),
                config.mode,
            )?;
            let peaks = find_peaks(
                &curve,
                scan.min_height.unwrap(),
                scan.min_separation.unwrap(),
            );
            config.scan = Some(scan);
            peaks
                .iter()
                .max_by(|a, b| a.height.total_cmp(&b.height))
                .ok_or_else(|| {
                    ExperimentError::config("observable.energy", "the energy scan found no peak")
                })?
                .energy
        }
    };
    let est = estimate_observable(
        &inst.es,
        cf,
        tau,
        x_m,
        energy_shifted,
        &observable,
        n_m,
        seed,
        config.mode,
        section.route,
    )?;
    let oracle = inst.es.eigen_expectation(inst.target, &observable)?;
    let error_bound = section
        .epsilon
        .map(|eps| eps * (observable.one_norm() + 1.0));
    Ok(ObservableReport {
        target: inst.target,
        overlap: inst.overlap(),
        gap,
        tau,
        x_m,
        t_m: tau * x_m,
        n_m,
        energy: energy_shifted - shift,
        energy_shifted,
        exact_energy: inst.energy(),
        o_hat: est.value,
        d_hat: est.d.value,
        n_hat: est.n.value,
        stderr_d: est.d.standard_error,
        stderr_n: est.n.standard_error,
        one_norm: observable.one_norm(),
        oracle,
        abs_error: (est.value - oracle).abs(),
        budget,
        error_bound,
        estimate: est,
        config,
    })
}

/// Scan settings for locating the energy: defaults cover the levels with
/// visible overlap at a spacing of a tenth of the level spacing.
fn scan_section(config: &RunConfig, inst: &Instance, tau: f64) -> Result<ScanSection> {
    let mut s = config.scan.clone().unwrap_or_default();
    let gap = s.gap_guess.unwrap_or_else(|| inst.feature_spacing());
    let pad = if tau > 0.0 { (3.0 / tau).max(1.0) } else { 1.0 };
    let visible: Vec<f64> = inst
        .levels()
        .iter()
        .filter(|l| l.overlap > 1e-3)
        .map(|l| l.energy)
        .collect();
    let lo = visible.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = visible.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    s.gap_guess = Some(gap);
    s.e_min = Some(s.e_min.unwrap_or(lo - pad));
    s.e_max = Some(s.e_max.unwrap_or(hi + pad));
    s.spacing = Some(s.spacing.unwrap_or(gap / 10.0));
    s.min_height = Some(
        s.min_height
            .unwrap_or(qcool::estimators::DEFAULT_MIN_HEIGHT),
    );
    s.min_separation = Some(s.min_separation.unwrap_or(gap / 2.0));
    if !(s.spacing.unwrap() > 0.0 && s.e_max.unwrap() > s.e_min.unwrap()) {
        return Err(ExperimentError::config("scan", "invalid window or spacing"));
    }
    Ok(s)
}

impl ObservableReport {
    pub const COLUMNS: [&'static str; 10] = [
        "tau", "x_m", "t_m", "N_M", "E", "D_hat", "N_hat", "O_hat", "stderr_D", "stderr_N",
    ];

    pub fn csv(&self) -> String {
        let row = vec![
            num(self.tau),
            num(self.x_m),
            num(self.t_m),
            self.n_m.to_string(),
            num(self.energy),
            num(self.d_hat),
            num(self.n_hat),
            num(self.o_hat),
            num(self.stderr_d),
            num(self.stderr_n),
        ];
        csv_text(&self.config, &Self::COLUMNS, &[row])
    }

    pub fn json(&self) -> String {
        json_text(&self.config, self)
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let csv = dir.join("observable.csv");
        let json = dir.join("observable.json");
        write_text(&csv, &self.csv())?;
        write_text(&json, &self.json())?;
        Ok(vec![csv, json])
    }
}
