//! The `validate` command: numerical checks of every cooling function.

use qcool::validation::{validate_functions, Check, ValidationReport};

use crate::config::RunConfig;

pub fn run_validate(config: &RunConfig) -> ValidationReport {
    let draws = config.validate.as_ref().map_or(100_000, |v| v.draws);
    validate_functions(config.seed.unwrap_or(0), draws)
}

fn cell(c: &Option<Check>) -> String {
    match c {
        None => "-".into(),
        Some(c) => format!(
            "{} ({:.2e})",
            if c.passed { "pass" } else { "FAIL" },
            c.measured
        ),
    }
}

/// One line per kind.
pub fn table(report: &ValidationReport) -> String {
    let mut out = format!("seed {} draws {}\n", report.seed, report.draws);
    for k in &report.kinds {
        if !k.realizable {
            out.push_str(&format!(
                "{:<12} not realizable (dual has infinite one-norm)\n",
                k.kind.to_string()
            ));
            continue;
        }
        out.push_str(&format!(
            "{:<12} closure {}  norm {}  tails {}  ks_x {}  ks_y {}\n",
            k.kind.to_string(),
            cell(&k.fourier_closure),
            cell(&k.norm),
            cell(&k.tails),
            cell(&k.ks_x),
            cell(&k.ks_y)
        ));
    }
    out
}
