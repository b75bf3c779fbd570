//! Energy-spectrum search: one reused shot batch per `tau`, scanned over a
//! grid of trial energies, with peak detection and exact overlays.

use std::path::{Path, PathBuf};

use qcool::cooling::CoolingFunction;
use qcool::estimators::{
    energy_grid, find_peaks, scan_energy, Peak, SpectrumCurve, DEFAULT_MIN_HEIGHT,
};
use serde::Serialize;

use crate::config::{RunConfig, ScanSection};
use crate::error::{ExperimentError, Result};
use crate::instance::{Instance, Level};
use crate::output::{csv_text, json_text, num, write_text};
use crate::times::resolve_times;

pub struct SpectrumSweep {
    pub tau: f64,
    pub x_m: f64,
    pub curve: SpectrumCurve<f64>,
    /// Untruncated `D_τ(E)` on the same grid.
    pub exact: Vec<f64>,
    pub peaks: Vec<Peak<f64>>,
    pub max_abs_error: f64,
}

pub struct SpectrumReport {
    pub config: RunConfig,
    pub shift: f64,
    pub levels: Vec<Level>,
    pub sweeps: Vec<SpectrumSweep>,
}

#[derive(Serialize)]
struct PeakRow {
    energy: f64,
    energy_shifted: f64,
    height: f64,
}

#[derive(Serialize)]
struct PeaksDoc {
    tau: f64,
    x_m: f64,
    t_m: f64,
    shift: f64,
    peaks: Vec<PeakRow>,
}

/// Pads the window around the levels with visible overlap.
const WINDOW_OVERLAP: f64 = 1e-3;

pub fn run_spectrum(config: &RunConfig) -> Result<SpectrumReport> {
    let mut config = config.clone();
    let seed = config.resolve_seed()?;
    let inst = Instance::from_config(&config)?;
    let times = resolve_times(&mut config, &inst)?;
    let cf = CoolingFunction::<f64>::new(config.cooling.kind);
    let scan = resolve_scan(config.scan.clone().unwrap_or_default(), &inst, &times)?;
    config.scan = Some(scan.clone());
    let shift = inst.shift();
    let (lo, hi, step) = (
        scan.e_min.unwrap() + shift,
        scan.e_max.unwrap() + shift,
        scan.spacing.unwrap(),
    );
    let grid =
        energy_grid(lo, hi, step).map_err(|e| ExperimentError::config("scan", e.to_string()))?;
    let mut sweeps = Vec::with_capacity(times.len());
    for (tau, x_m) in times {
        let curve = scan_energy(
            &inst.es,
            cf,
            tau,
            x_m,
            &grid,
            config.cooling.shots,
            seed,
            config.mode,
        )?;
        let exact: Vec<f64> = grid.iter().map(|&e| inst.es.exact_d(&cf, tau, e)).collect();
        let peaks = find_peaks(
            &curve,
            scan.min_height.unwrap(),
            scan.min_separation.unwrap(),
        );
        let max_abs_error = curve
            .d_values
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        log::info!(
            "tau = {tau}: {} peaks, max |D_hat - D| = {max_abs_error:.3e}",
            peaks.len()
        );
        sweeps.push(SpectrumSweep {
            tau,
            x_m,
            curve,
            exact,
            peaks,
            max_abs_error,
        });
    }
    Ok(SpectrumReport {
        config,
        shift,
        levels: inst.levels(),
        sweeps,
    })
}

fn resolve_scan(
    mut scan: ScanSection,
    inst: &Instance,
    times: &[(f64, f64)],
) -> Result<ScanSection> {
    let gap = match scan.gap_guess {
        Some(g) if g > 0.0 => g,
        Some(g) => {
            return Err(ExperimentError::config(
                "scan.gap_guess",
                format!("must be positive, got {g}"),
            ))
        }
        None => inst.feature_spacing(),
    };
    scan.gap_guess = Some(gap);
    let tau_min = times.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let pad = if tau_min > 0.0 {
        (3.0 / tau_min).max(1.0)
    } else {
        1.0
    };
    let visible: Vec<f64> = inst
        .levels()
        .iter()
        .filter(|l| l.overlap > WINDOW_OVERLAP)
        .map(|l| l.energy)
        .collect();
    let (vmin, vmax) = visible
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| {
            (a.min(e), b.max(e))
        });
    let e_min = scan.e_min.unwrap_or(vmin - pad);
    let e_max = scan.e_max.unwrap_or(vmax + pad);
    if e_max.partial_cmp(&e_min) != Some(std::cmp::Ordering::Greater) {
        return Err(ExperimentError::config(
            "scan.e_max",
            format!("window [{e_min}, {e_max}] is empty"),
        ));
    }
    let spacing = scan.spacing.unwrap_or(gap / 10.0);
    if spacing.is_nan() || spacing <= 0.0 {
        return Err(ExperimentError::config(
            "scan.spacing",
            format!("must be positive, got {spacing}"),
        ));
    }
    if (e_max - e_min) / spacing > 1e6 {
        return Err(ExperimentError::config(
            "scan.spacing",
            "grid would exceed a million points",
        ));
    }
    scan.e_min = Some(e_min);
    scan.e_max = Some(e_max);
    scan.spacing = Some(spacing);
    scan.min_height = Some(scan.min_height.unwrap_or(DEFAULT_MIN_HEIGHT));
    scan.min_separation = Some(scan.min_separation.unwrap_or(gap / 2.0));
    Ok(scan)
}

impl SpectrumReport {
    fn sweep_files(&self, sweep: &SpectrumSweep) -> Vec<(&'static str, String)> {
        let mode = self.config.mode.to_string();
        let e = &sweep.curve.energies;
        let rows: Vec<Vec<String>> = e
            .iter()
            .zip(&sweep.curve.d_values)
            .map(|(&es, &d)| vec![num(es - self.shift), num(es), num(d), mode.clone()])
            .collect();
        let spectrum = csv_text(
            &self.config,
            &["E_original_frame", "E_shifted", "D_hat", "mode"],
            &rows,
        );
        let rows: Vec<Vec<String>> = e
            .iter()
            .zip(&sweep.exact)
            .map(|(&es, &d)| vec![num(es - self.shift), num(es), num(d)])
            .collect();
        let oracle = csv_text(
            &self.config,
            &["E_original_frame", "E_shifted", "D_exact"],
            &rows,
        );
        let doc = PeaksDoc {
            tau: sweep.tau,
            x_m: sweep.x_m,
            t_m: sweep.tau * sweep.x_m,
            shift: self.shift,
            peaks: sweep
                .peaks
                .iter()
                .map(|p| PeakRow {
                    energy: p.energy - self.shift,
                    energy_shifted: p.energy,
                    height: p.height,
                })
                .collect(),
        };
        let mut files = vec![
            ("spectrum.csv", spectrum),
            ("oracle.csv", oracle),
            ("peaks.json", json_text(&self.config, &doc)),
        ];
        if self.config.shot_log {
            let mut buf = Vec::new();
            sweep
                .curve
                .batch()
                .write_csv(&mut buf)
                .expect("in-memory write");
            let mut text = crate::output::config_header(&self.config);
            text.push_str(&String::from_utf8(buf).expect("ascii"));
            files.push(("shots.csv", text));
        }
        files
    }

    /// Writes the outputs; a `tau` list gets one subdirectory per value plus
    /// a `sweep.csv` summary.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let mut put = |path: PathBuf, text: &str| -> Result<()> {
            write_text(&path, text)?;
            written.push(path);
            Ok(())
        };
        let rows: Vec<Vec<String>> = self
            .levels
            .iter()
            .map(|l| {
                vec![
                    l.index.to_string(),
                    num(l.energy),
                    num(l.energy_shifted),
                    num(l.overlap),
                ]
            })
            .collect();
        put(
            dir.join("eigenvalues.csv"),
            &csv_text(
                &self.config,
                &["index", "E_original_frame", "E_shifted", "overlap"],
                &rows,
            ),
        )?;
        if self.sweeps.len() == 1 {
            for (name, text) in self.sweep_files(&self.sweeps[0]) {
                put(dir.join(name), &text)?;
            }
        } else {
            let mut summary = Vec::new();
            for (i, s) in self.sweeps.iter().enumerate() {
                let sub = dir.join(format!("tau_{i:02}"));
                for (name, text) in self.sweep_files(s) {
                    put(sub.join(name), &text)?;
                }
                summary.push(vec![
                    format!("tau_{i:02}"),
                    num(s.tau),
                    num(s.x_m),
                    num(s.tau * s.x_m),
                    s.peaks.len().to_string(),
                    num(s.max_abs_error),
                ]);
            }
            let cols = [
                "directory",
                "tau",
                "x_m",
                "t_m",
                "peak_count",
                "max_abs_error",
            ];
            put(
                dir.join("sweep.csv"),
                &csv_text(&self.config, &cols, &summary),
            )?;
        }
        Ok(written)
    }
}
