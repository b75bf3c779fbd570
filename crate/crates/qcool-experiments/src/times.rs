//! Resolution of `(tau, x_m)` from the `[cooling]` section.

use qcool::budget::budget_for_observable;
use qcool::cooling::CoolingFunction;

use crate::config::RunConfig;
use crate::error::{AtPath, ExperimentError, Result};
use crate::instance::Instance;

/// Confidence constant used when the cooling section derives times from
/// `epsilon` and no observable section supplies one.
pub const DEFAULT_K: f64 = 32.0;

/// The `(tau, x_m)` pairs of a run, written back into `config`.
///
/// Explicit `tau`/`taus` and `x_m` are used as given. When `epsilon` is set,
/// missing values come from the observable budget for the target's exact
/// overlap and gap.
pub fn resolve_times(config: &mut RunConfig, inst: &Instance) -> Result<Vec<(f64, f64)>> {
    let cf = CoolingFunction::<f64>::new(config.cooling.kind);
    if !cf.is_realizable() {
        return Err(ExperimentError::config(
            "cooling.kind",
            format!("{} is not a realizable cooling function", cf.kind()),
        ));
    }
    let c = &config.cooling;
    if c.tau.is_some() && c.taus.is_some() {
        return Err(ExperimentError::config(
            "cooling",
            "give either `tau` or `taus`, not both",
        ));
    }
    let auto = match c.epsilon {
        Some(eps) => {
            let k = config.observable.as_ref().map_or(DEFAULT_K, |o| o.k);
            let loose = config.observable.as_ref().is_some_and(|o| o.loose);
            Some(
                budget_for_observable(&cf, eps, inst.overlap(), inst.gap()?, k, loose)
                    .at("cooling.epsilon")?,
            )
        }
        None => None,
    };
    let taus = match (&c.tau, &c.taus, &auto) {
        (Some(t), _, _) => vec![*t],
        (_, Some(ts), _) if !ts.is_empty() => ts.clone(),
        (_, Some(_), _) => return Err(ExperimentError::config("cooling.taus", "empty list")),
        (None, None, Some(b)) => vec![b.tau],
        (None, None, None) => {
            return Err(ExperimentError::config(
                "cooling.tau",
                "set `tau`, `taus` or `epsilon`",
            ))
        }
    };
    let x_m = match (c.x_m, &auto) {
        (Some(x), _) => x,
        (None, Some(b)) => b.x_m,
        (None, None) => {
            return Err(ExperimentError::config(
                "cooling.x_m",
                "set `x_m` or `epsilon`",
            ))
        }
    };
    for (i, &t) in taus.iter().enumerate() {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ExperimentError::config(
                format!("cooling.taus[{i}]"),
                format!("tau must be finite and >= 0, got {t}"),
            ));
        }
    }
    if !(x_m > 0.0 && x_m.is_finite()) {
        return Err(ExperimentError::config(
            "cooling.x_m",
            format!("x_m must be positive, got {x_m}"),
        ));
    }
    if config.cooling.shots == 0 {
        return Err(ExperimentError::config(
            "cooling.shots",
            "must be at least 1",
        ));
    }
    if taus.len() == 1 {
        config.cooling.tau = Some(taus[0]);
        config.cooling.taus = None;
    } else {
        config.cooling.taus = Some(taus.clone());
    }
    config.cooling.x_m = Some(x_m);
    Ok(taus.into_iter().map(|t| (t, x_m)).collect())
}
