//! Acceptance suite. Each criterion prints one `PASS` or `FAIL` line.
//!
//! Run with `cargo test -p qcool-experiments --test acceptance`; a substring
//! argument restricts the run to matching criteria. Criteria listed in
//! `KNOWN_UNATTAINABLE` still run at full tolerance and still print `FAIL`,
//! but do not fail the process.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use qcool::budget::budget_for_observable;
use qcool::engine::{EigenSystem, StateVector};
use qcool::estimators::{
    energy_grid, estimate_d, estimate_n, estimate_observable, find_peaks, SpectrumCurve,
    DEFAULT_MIN_HEIGHT,
};
use qcool::models::{basis_state, heisenberg, random_pauli_hamiltonian};
use qcool::observable::{Observable, Term};
use qcool::pauli::{Pauli, PauliString};
use qcool::shots::{Mode, NormalizationSampler};
use qcool::validation::{dual_norm, fourier_closure_error, sampler_ks, worst_tail_excess};
use qcool::{CoolingFunction, CoolingKind, DenominatorRoute};
use qcool_experiments::{run_cooling_scaling, run_spectrum, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REALIZABLE: [CoolingKind; 4] = [
    CoolingKind::Triangle,
    CoolingKind::Exponential,
    CoolingKind::Gaussian,
    CoolingKind::Sech,
];

/// The triangle dual's one-norm is 2π, so the stated 2π² cannot be met while
/// the Fourier closure holds.
const KNOWN_UNATTAINABLE: &[&str] = &["dual_norms"];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: &[Criterion] = &[
    ("fourier_closure", fourier_closure),
    ("dual_norms", dual_norms),
    ("tail_bounds", tail_bounds),
    ("sampler_fidelity", sampler_fidelity),
    ("estimator_unbiasedness", estimator_unbiasedness),
    ("heisenberg8_spectrum", heisenberg8_spectrum),
    ("tau_sweep_peak_count", tau_sweep_peak_count),
    ("cooling_scaling_trends", cooling_scaling_trends),
    ("energy_error_ladder", energy_error_ladder),
    ("observable_budget_soundness", observable_budget_soundness),
    ("hoeffding_concentration", hoeffding_concentration),
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (name, _) in CRITERIA {
            println!("{name}: test");
        }
        return;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    for (name, run) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        let note = if !outcome.passed && KNOWN_UNATTAINABLE.contains(name) {
            " [known unattainable]"
        } else {
            ""
        };
        println!("{status} {name}: {} ({secs:.1} s){note}", outcome.detail);
        if !outcome.passed && !KNOWN_UNATTAINABLE.contains(name) {
            unexpected.push(*name);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed criteria: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}

fn binomial_limit(p: f64, runs: usize) -> f64 {
    p + 3.0 * (p * (1.0 - p) / runs as f64).sqrt()
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Closed-form densities of one time draw and of the difference of two draws,
/// for the kinds where both are elementary.
fn time_density(kind: CoolingKind, x: f64) -> f64 {
    match kind {
        CoolingKind::Gaussian => (-x * x / 4.0).exp() / (2.0 * PI.sqrt()),
        CoolingKind::Exponential => 1.0 / (PI * (1.0 + x * x)),
        _ => unreachable!("no closed form used for {kind:?}"),
    }
}

fn difference_density(kind: CoolingKind, y: f64) -> f64 {
    match kind {
        CoolingKind::Gaussian => (-y * y / 8.0).exp() / (2.0 * (2.0 * PI).sqrt()),
        CoolingKind::Exponential => 2.0 / (PI * (4.0 + y * y)),
        _ => unreachable!("no closed form used for {kind:?}"),
    }
}

/// `∫_{-X}^{X} density(t) cos(ωt) dt`.
fn truncated_transform(density: impl Fn(f64) -> f64, x_m: f64, omega: f64) -> f64 {
    2.0 * simpson(|t| density(t) * (omega * t).cos(), 0.0, x_m, 8000)
}

/// Truncated normalization factor: `Σ_i p_i ∫_{|y|≤X} p̃(y) cos(yτ(E_i - E)) dy`.
fn d_oracle(es: &EigenSystem<f64>, kind: CoolingKind, tau: f64, x_m: f64, e: f64) -> f64 {
    es.shifted_energies()
        .iter()
        .zip(es.overlaps())
        .filter(|(_, &p)| p > 1e-15)
        .map(|(&ei, &p)| {
            p * truncated_transform(|y| difference_density(kind, y), x_m, tau * (ei - e))
        })
        .sum()
}

/// Truncated unnormalized expectation `<φ|O|φ>` with
/// `φ = Σ_k c_k G(τ(E_k - E)) |u_k>` and `G` the truncated transform of `p`.
fn n_oracle(
    es: &EigenSystem<f64>,
    kind: CoolingKind,
    tau: f64,
    x_m: f64,
    e: f64,
    obs: &[(f64, PauliString)],
) -> f64 {
    let weighted: Vec<Complex64> = es
        .shifted_energies()
        .iter()
        .zip(es.coeffs())
        .map(|(&ek, &c)| c * truncated_transform(|x| time_density(kind, x), x_m, tau * (ek - e)))
        .collect();
    let phi = es.from_eigenbasis(&weighted);
    obs.iter()
        .map(|(w, p)| {
            let o_phi = p.apply(&phi).unwrap();
            let v: Complex64 = phi.iter().zip(&o_phi).map(|(a, b)| a.conj() * b).sum();
            w * v.re
        })
        .sum()
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector<f64> {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(n, amps).unwrap()
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let letters: Vec<Pauli> = (0..n)
            .map(|_| match rng.random_range(0..4) {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        let p = PauliString::new(letters, rng.random_bool(0.5)).unwrap();
        if !p.is_identity() {
            return p;
        }
    }
}

fn as_observable(n: usize, terms: &[(f64, PauliString)]) -> Observable<f64> {
    Observable::new(
        n,
        terms
            .iter()
            .map(|(w, p)| (*w, Term::Pauli(p.clone())))
            .collect(),
    )
    .unwrap()
}

fn fourier_closure() -> Outcome {
    let start = Instant::now();
    let errors: Vec<f64> = REALIZABLE
        .iter()
        .map(|&k| fourier_closure_error(&CoolingFunction::new(k)))
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Outcome::new(
        worst < 1e-4 && secs < 10.0,
        format!("worst closure error {worst:.2e} (< 1e-4), {secs:.2} s (< 10 s)"),
    )
}

fn dual_norms() -> Outcome {
    let expected = [2.0 * PI * PI, 2.0 * PI, 2.0 * PI, 2.0 * PI];
    let mut parts = Vec::new();
    let mut ok = true;
    for (&k, &want) in REALIZABLE.iter().zip(&expected) {
        let got = dual_norm(&CoolingFunction::new(k));
        let good = (got - want).abs() < 1e-6;
        ok &= good;
        parts.push(format!(
            "{} {got:.8} vs {want:.8}{}",
            k.name(),
            if good { "" } else { " MISMATCH" }
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn tail_bounds() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for &k in &REALIZABLE {
        worst = worst.max(worst_tail_excess(&CoolingFunction::new(k)).unwrap());
    }
    let rect = CoolingFunction::<f64>::new(CoolingKind::Rectangular);
    let rejected =
        rect.cutoff(0.1).is_err() && rect.tail_bound(1.0).is_err() && rect.g_inverse(0.5).is_err();
    Outcome::new(
        worst <= 0.0 && rejected,
        format!(
            "worst tail mass minus tolerance {worst:.2e} (<= 0), rectangular rejected: {rejected}"
        ),
    )
}

fn sampler_fidelity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (i, &k) in REALIZABLE.iter().enumerate() {
        let (kx, ky) = sampler_ks(&CoolingFunction::new(k), 100_000, 2024 + i as u64).unwrap();
        worst = worst.max(kx).max(ky);
        parts.push(format!("{} x {kx:.4} y {ky:.4}", k.name()));
    }
    Outcome::new(
        worst < 0.01,
        format!("KS at 1e5 draws: {} (< 0.01)", parts.join(", ")),
    )
}

fn estimator_unbiasedness() -> Outcome {
    let start = Instant::now();
    let runs = 100;
    let shots = 4000;
    let mut within = 0;
    for s in 0..runs as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB1A5 + s);
        let h = random_pauli_hamiltonian::<f64>(3, 6, 500 + s).unwrap();
        let psi = random_state(3, &mut rng);
        let es = EigenSystem::eigendecompose(&h, &psi).unwrap();
        let kind = if s % 2 == 0 {
            CoolingKind::Gaussian
        } else {
            CoolingKind::Exponential
        };
        let cf = CoolingFunction::new(kind);
        let tau = rng.random_range(0.3..1.5);
        let x_m = rng.random_range(1.0..6.0);
        let top = *es.shifted_energies().last().unwrap();
        let e = rng.random_range(0.0..top);
        let terms: Vec<(f64, PauliString)> = (0..3)
            .map(|_| (rng.random_range(0.2..1.0), random_pauli(3, &mut rng)))
            .collect();
        let obs = as_observable(3, &terms);

        let d = estimate_d(&es, cf, tau, x_m, e, shots, s, Mode::Shot).unwrap();
        let n = estimate_n(&es, cf, tau, x_m, e, &obs, shots, s, Mode::Shot).unwrap();
        let d_ok = (d.value - d_oracle(&es, kind, tau, x_m, e)).abs() <= 3.0 * d.standard_error;
        let n_ok =
            (n.value - n_oracle(&es, kind, tau, x_m, e, &terms)).abs() <= 3.0 * n.standard_error;
        within += usize::from(d_ok && n_ok);
    }
    let secs = start.elapsed().as_secs_f64();
    let frac = within as f64 / runs as f64;
    Outcome::new(
        frac >= 0.99 && secs < 120.0,
        format!("{within}/{runs} runs with D and N within 3 se (>= 99%), {secs:.1} s (< 120 s)"),
    )
}

const HEISENBERG8: &str = r#"
mode = "expectation"
seed = 7

[model]
family = "heisenberg_xxz"
n = 8

[state]
bits = "01010101"

[cooling]
kind = "gaussian"
x_m = 4.4
shots = 100000
"#;

fn heisenberg8_spectrum() -> Outcome {
    let start = Instant::now();
    let mut config = RunConfig::from_toml(HEISENBERG8).unwrap();
    config.cooling.tau = Some(1.7);
    let report = run_spectrum(&config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let sweep = &report.sweeps[0];
    let mut missed = Vec::new();
    let mut worst_offset: f64 = 0.0;
    for level in report.levels.iter().filter(|l| l.overlap > 0.01) {
        let nearest = sweep
            .peaks
            .iter()
            .map(|p| (p.energy - level.energy_shifted).abs())
            .fold(f64::INFINITY, f64::min);
        worst_offset = worst_offset.max(nearest);
        if nearest > 0.05 {
            missed.push(format!("{:.4}", level.energy));
        }
    }
    let err = sweep.max_abs_error;
    Outcome::new(
        missed.is_empty() && err < 0.01 && secs < 300.0,
        format!(
            "worst peak offset {worst_offset:.4} (<= 0.05), missed [{}], max |D_hat - D| {err:.4} (< 0.01), {secs:.1} s (< 300 s)",
            missed.join(", ")
        ),
    )
}

fn tau_sweep_peak_count() -> Outcome {
    let mut config = RunConfig::from_toml(HEISENBERG8).unwrap();
    config.cooling.taus = Some(vec![0.9, 1.3, 1.7]);
    let report = run_spectrum(&config).unwrap();
    let counts: Vec<usize> = report.sweeps.iter().map(|s| s.peaks.len()).collect();
    let ok = counts.windows(2).all(|w| w[1] >= w[0]);
    Outcome::new(
        ok,
        format!("peak counts at tau 0.9, 1.3, 1.7: {counts:?} (non-decreasing)"),
    )
}

/// Least-squares slope and coefficient of determination.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, sxy * sxy / (sxx * syy))
}

const SCALING_EPSILONS: &str =
    "[0.3, 0.2, 0.1, 0.05, 0.03, 0.02, 0.01, 0.005, 0.003, 0.001, 3e-4, 1e-4]";

/// `(t_m, estimated infidelity)` for the rows above the sampling floor
/// `3/√N_M`, judged by the oracle infidelity.
fn pre_floor_points(kind: &str) -> Vec<(f64, f64)> {
    let text = format!(
        "mode = \"expectation\"\nseed = 11\n\n[model]\nfamily = \"heisenberg_xxz\"\nn = 8\n\n[state]\nbits = \"01010101\"\n\n\
         [cooling]\nkind = \"{kind}\"\nshots = 100000\n\n[scaling]\nepsilons = {SCALING_EPSILONS}\ninclude_zero = false\n"
    );
    let report = run_cooling_scaling(&RunConfig::from_toml(&text).unwrap()).unwrap();
    report
        .rows
        .iter()
        .filter(|r| {
            r.t_m > 0.0
                && r.infidelity_oracle >= 3.0 / (r.n_m as f64).sqrt()
                && r.infidelity_estimated > 0.0
        })
        .map(|r| (r.t_m, r.infidelity_estimated))
        .collect()
}

fn cooling_scaling_trends() -> Outcome {
    let gauss = pre_floor_points("gaussian");
    let (gx, gy): (Vec<f64>, Vec<f64>) = gauss.iter().map(|&(t, i)| (t, i.ln())).unzip();
    let (g_slope, g_r2) = linear_fit(&gx, &gy);

    let expo = pre_floor_points("exponential");
    let tail = &expo[expo.len().saturating_sub(4)..];
    let (ex, ey): (Vec<f64>, Vec<f64>) = tail.iter().map(|&(t, i)| (t.ln(), i.ln())).unzip();
    let (e_slope, _) = linear_fit(&ex, &ey);

    let ok = gauss.len() >= 3
        && g_slope < 0.0
        && g_r2 > 0.9
        && tail.len() >= 3
        && (-1.5..=-0.6).contains(&e_slope);
    Outcome::new(
        ok,
        format!(
            "gaussian semilog slope {g_slope:.3} (< 0), R^2 {g_r2:.3} (> 0.9) over {} points; \
             exponential log-log tail slope {e_slope:.3} (in [-1.5, -0.6]) over {} points",
            gauss.len(),
            tail.len()
        ),
    )
}

fn energy_error_ladder() -> Outcome {
    let h = heisenberg::<f64>(8, 1.0, 2.0, 0.0, true).unwrap();
    let es = EigenSystem::eigendecompose(&h, &basis_state("01010101").unwrap()).unwrap();
    let target = es.largest_overlap_index();
    let e_target = es.shifted_energies()[target];
    let gap = es.gap(target, 1e-6).unwrap();
    let cf = CoolingFunction::new(CoolingKind::Gaussian);
    let taus = [0.6, 1.2, 2.4];
    let mut errors = Vec::new();
    for &tau in &taus {
        let batch = NormalizationSampler::new(&es, cf, tau, 4.4, Mode::Expectation)
            .unwrap()
            .batch(100_000, 3)
            .unwrap();
        let grid = energy_grid(e_target - 2.0 * gap, e_target + 2.0 * gap, gap / 20.0).unwrap();
        let curve = SpectrumCurve::from_batch(batch, &grid).unwrap();
        let peaks = find_peaks(&curve, DEFAULT_MIN_HEIGHT, gap / 4.0);
        let err = peaks
            .iter()
            .map(|p| (p.energy - e_target).abs())
            .fold(f64::INFINITY, f64::min);
        errors.push(err);
    }
    let ok = errors.windows(2).all(|w| w[1] <= 0.6 * w[0]);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    Outcome::new(
        ok,
        format!(
            "energy errors at tau {taus:?}: [{}] (each <= 0.6 x previous)",
            shown.join(", ")
        ),
    )
}

fn observable_budget_soundness() -> Outcome {
    let start = Instant::now();
    let h = random_pauli_hamiltonian::<f64>(3, 6, 31).unwrap();
    // Initial state: eigenvector 2 with a random admixture, overlap about 0.8.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let basis = EigenSystem::eigendecompose(&h, &StateVector::basis(3, 0).unwrap()).unwrap();
    let noise = random_state(3, &mut rng);
    let amps = basis
        .eigenvector(2)
        .amplitudes()
        .iter()
        .zip(noise.amplitudes())
        .map(|(u, r)| u * 2.0 + r)
        .collect();
    let es = EigenSystem::eigendecompose(&h, &StateVector::normalized(3, amps).unwrap()).unwrap();
    let j = es.largest_overlap_index();
    let p = es.overlaps()[j];
    let gap = es.gap(j, 1e-6).unwrap();
    let terms: Vec<(f64, PauliString)> = (0..3)
        .map(|_| (rng.random_range(0.2..1.0), random_pauli(3, &mut rng)))
        .collect();
    let obs = as_observable(3, &terms);
    let one_norm: f64 = terms.iter().map(|(w, _)| w).sum();
    let u = es.eigenvector(j);
    let exact: f64 = terms
        .iter()
        .map(|(w, pauli)| {
            let v = pauli.apply(u.amplitudes()).unwrap();
            w * u
                .amplitudes()
                .iter()
                .zip(&v)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>()
        })
        .sum();

    let eps = 0.1;
    let cf = CoolingFunction::new(CoolingKind::Gaussian);
    let budget = budget_for_observable(&cf, eps, p, gap, 32.0, false).unwrap();
    let runs = 50;
    let tolerance = eps * (one_norm + 1.0);
    let failures = (0..runs as u64)
        .filter(|&r| {
            match estimate_observable(
                &es,
                cf,
                budget.tau,
                budget.x_m,
                es.shifted_energies()[j],
                &obs,
                budget.n_m as usize,
                1000 + r,
                Mode::Shot,
                DenominatorRoute::Independent,
            ) {
                Ok(est) => (est.value - exact).abs() > tolerance,
                Err(_) => true,
            }
        })
        .count();
    let frac = failures as f64 / runs as f64;
    let limit = binomial_limit(4.0 * (-4.0f64).exp(), runs);
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        frac <= limit,
        format!(
            "overlap {p:.3}, gap {gap:.3}, N_M {} per estimate: {failures}/{runs} runs outside eps(|O|_1+1) = {tolerance:.3}, \
             fraction {frac:.3} (<= {limit:.3}), {secs:.1} s",
            budget.n_m
        ),
    )
}

fn hoeffding_concentration() -> Outcome {
    let h = random_pauli_hamiltonian::<f64>(3, 6, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let es = EigenSystem::eigendecompose(&h, &random_state(3, &mut rng)).unwrap();
    let kind = CoolingKind::Gaussian;
    let (tau, x_m) = (1.0, 3.0);
    let e = es.shifted_energies()[es.largest_overlap_index()];
    let oracle = d_oracle(&es, kind, tau, x_m, e);
    let k = 32.0;
    let eps_n: f64 = 0.1;
    let shots = (k / (eps_n * eps_n)).round() as usize;
    let runs = 200;
    let failures = (0..runs as u64)
        .filter(|&r| {
            let d = estimate_d(
                &es,
                CoolingFunction::new(kind),
                tau,
                x_m,
                e,
                shots,
                5000 + r,
                Mode::Shot,
            )
            .unwrap();
            (d.value - oracle).abs() > eps_n
        })
        .count();
    let frac = failures as f64 / runs as f64;
    let limit = binomial_limit(2.0 * (-k / 8.0).exp(), runs);
    Outcome::new(
        frac <= limit,
        format!("N_M {shots}: {failures}/{runs} runs with |D_hat - D| > {eps_n}, fraction {frac:.3} (<= {limit:.3})"),
    )
}
