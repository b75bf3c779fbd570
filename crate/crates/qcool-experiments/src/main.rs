use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcool::shots::Mode;
use qcool_experiments::error::{ExperimentError, Result};
use qcool_experiments::{
    run_budget, run_cooling_scaling, run_observable, run_spectrum, run_validate, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "qcool",
    version,
    about = "Simulate algorithmic cooling: spectra, cooling scaling, observables, budgets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan D(E) over trial energies and locate the peaks.
    Spectrum(Common),
    /// Infidelity of the cooled target state against total evolution time.
    Cool(Common),
    /// Estimate an eigenstate observable as N/D.
    Observable(Common),
    /// Tabulate resource budgets.
    Budget(Common),
    /// Check cooling-function closures, norms, tails and samplers.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for all random draws (overrides the config).
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "qcool-out")]
    out: PathBuf,
    /// Shot simulation or exact overlaps (overrides the config).
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Print a machine-readable JSON summary.
    #[arg(long)]
    json: bool,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: qcool::error::Error| e.to_string())
}

impl Common {
    fn load(&self, required: bool) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None if required => {
                return Err(ExperimentError::config(
                    "--config",
                    "this command needs a config file",
                ))
            }
            None => RunConfig::empty(),
        };
        if let Some(s) = self.seed {
            config.seed = Some(s);
        }
        if let Some(m) = self.mode {
            config.mode = m;
        }
        Ok(config)
    }
}

fn list(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| format!("  {}\n", p.display()))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(c) => {
            let report = run_spectrum(&c.load(true)?)?;
            let written = report.write(&c.out)?;
            if c.json {
                let summary: Vec<_> = report
                    .sweeps
                    .iter()
                    .map(|s| {
                        serde_json::json!({
                            "tau": s.tau,
                            "x_m": s.x_m,
                            "max_abs_error": s.max_abs_error,
                            "peaks": s.peaks.iter().map(|p| p.energy - report.shift).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
            } else {
                for s in &report.sweeps {
                    let peaks: Vec<String> = s
                        .peaks
                        .iter()
                        .map(|p| format!("{:.4}", p.energy - report.shift))
                        .collect();
                    println!(
                        "tau {:.4} x_m {:.4}: peaks [{}], max |D_hat - D| {:.3e}",
                        s.tau,
                        s.x_m,
                        peaks.join(", "),
                        s.max_abs_error
                    );
                }
                print!("wrote\n{}", list(&written));
            }
        }
        Command::Cool(c) => {
            let report = run_cooling_scaling(&c.load(true)?)?;
            let written = report.write(&c.out)?;
            if c.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.rows).expect("json")
                );
            } else {
                println!(
                    "target {} overlap {:.4} gap {:.4}",
                    report.target, report.overlap, report.gap
                );
                println!(
                    "{:>10} {:>10} {:>12} {:>14} {:>14}",
                    "tau", "x_m", "t_m", "estimated", "oracle"
                );
                for r in &report.rows {
                    println!(
                        "{:>10.4} {:>10.4} {:>12.4} {:>14.6e} {:>14.6e}",
                        r.tau, r.x_m, r.t_m, r.infidelity_estimated, r.infidelity_oracle
                    );
                }
                print!("wrote\n{}", list(&written));
            }
        }
        Command::Observable(c) => {
            let report = run_observable(&c.load(true)?)?;
            let written = report.write(&c.out)?;
            if c.json {
                print!("{}", report.json());
            } else {
                println!(
                    "<O> = {:.6} (D = {:.6}, N = {:.6}); exact {:.6}, |error| {:.3e}",
                    report.o_hat, report.d_hat, report.n_hat, report.oracle, report.abs_error
                );
                if let Some(b) = report.error_bound {
                    println!("budgeted bound {b:.4}");
                }
                print!("wrote\n{}", list(&written));
            }
        }
        Command::Budget(c) => {
            let report = run_budget(&c.load(true)?)?;
            if c.json {
                print!("{}", report.json());
            } else {
                print!("{}", report.table());
            }
        }
        Command::Validate(c) => {
            let report = run_validate(&c.load(false)?);
            if c.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("json"));
            } else {
                print!("{}", qcool_experiments::validate::table(&report));
            }
            if !report.passed() {
                let failed = report
                    .kinds
                    .iter()
                    .filter(|k| k.realizable != k.kind.is_realizable() || !k.passed())
                    .count();
                return Err(ExperimentError::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
