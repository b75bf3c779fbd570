//! Numerical checks of the cooling functions: Fourier closure, dual norms,
//! tail masses and sampler fidelity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::cooling::{CoolingFunction, CoolingKind};
use crate::error::Result;
use crate::quadrature::{integrate, integrate_panels};

pub type Cf = CoolingFunction<f64>;

/// Half-width beyond which the dual is dropped or replaced by its asymptotic tail.
fn dual_extent(kind: CoolingKind) -> f64 {
    match kind {
        CoolingKind::Gaussian => 14.0,
        CoolingKind::Sech => 24.0,
        _ => 1e5,
    }
}

/// `g(h)` rebuilt from the dual: `(1/π)∫_0^X f(x) cos(xh) dx`.
pub fn reconstruct_g(cf: &Cf, h: f64) -> f64 {
    let x_max = dual_extent(cf.kind());
    integrate_panels(|x| cf.f(x) * (x * h).cos(), 0.0, x_max, 2.0, 1e-8).value / PI
}

/// Largest `|g(h) - reconstruct_g(h)|` over `h ∈ [-5, 5]` in steps of 0.1.
pub fn fourier_closure_error(cf: &Cf) -> f64 {
    (0..=100)
        .map(|i| {
            let h = -5.0 + 0.1 * i as f64;
            (cf.g(h) - reconstruct_g(cf, h)).abs()
        })
        .fold(0.0, f64::max)
}

/// `∫|f|` by quadrature; infinite for the rectangular dual.
pub fn dual_norm(cf: &Cf) -> f64 {
    let kind = cf.kind();
    match kind {
        CoolingKind::Rectangular => f64::INFINITY,
        CoolingKind::Gaussian | CoolingKind::Sech => {
            2.0 * integrate_panels(|x| cf.f(x).abs(), 0.0, dual_extent(kind), 2.0, 1e-12).value
        }
        CoolingKind::Triangle | CoolingKind::Exponential => {
            let x_max = 1e4;
            let body = integrate_panels(|x| cf.f(x).abs(), 0.0, x_max, 4.0, 1e-11).value;
            // Both duals behave as 2/x² at large x (the triangle's on average).
            let tail = if kind == CoolingKind::Exponential {
                2.0 / x_max - 2.0 / (3.0 * x_max.powi(3))
            } else {
                2.0 / x_max
            };
            2.0 * (body + tail)
        }
    }
}

/// Mass of `p` outside `[-L, L]`, as `1 - 2∫_0^L p`.
pub fn tail_mass(cf: &Cf, l: f64) -> Result<f64> {
    let norm = cf.f_norm();
    cf.density(0.0)?;
    let inner = integrate_panels(|x| cf.f(x) / norm, 0.0, l, 4.0, 1e-13).value;
    Ok(1.0 - 2.0 * inner)
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Distribution function of `y = x - x'` for independent `x, x' ~ p`,
/// built by numerical convolution `F̃(y) = ∫ p(t) F(t + y) dt` and
/// interpolated on an arctangent grid.
pub struct CorrelationCdf {
    scale: f64,
    step: f64,
    /// `F̃(scale·tan θ_k)` for `θ_k = k·step`, `k = 0..=M` with `θ_M = π/2`.
    values: Vec<f64>,
}

impl CorrelationCdf {
    pub const NODES: usize = 400;

    pub fn new(cf: &Cf) -> Result<Self> {
        let kind = cf.kind();
        cf.density(0.0)?;
        let scale = 2.0;
        let x_max = match kind {
            CoolingKind::Gaussian => 16.0,
            CoolingKind::Sech => 26.0,
            _ => 4e3,
        };
        let upper = cf.cdf(x_max)?;
        let norm = cf.f_norm();
        let convolve = |y: f64| -> f64 {
            let body = integrate_panels(
                |t| cf.f(t) / norm * cf.cdf(t + y).expect("realizable"),
                -x_max,
                x_max,
                4.0,
                1e-9,
            )
            .value;
            // Beyond +x_max the inner distribution function is essentially 1;
            // below -x_max the remaining mass is ignored.
            body + (1.0 - upper)
        };
        let step = FRAC_PI_2 / Self::NODES as f64;
        let mut values: Vec<f64> = (0..Self::NODES)
            .map(|k| convolve(scale * (k as f64 * step).tan()))
            .collect();
        values[0] = 0.5;
        values.push(1.0);
        Ok(CorrelationCdf {
            scale,
            step,
            values,
        })
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 1.0 - self.eval(-y);
        }
        let theta = (y / self.scale).atan();
        let pos = theta / self.step;
        let k = (pos.floor() as usize).min(self.values.len() - 2);
        let w = pos - k as f64;
        (1.0 - w) * self.values[k] + w * self.values[k + 1]
    }
}

/// Outcome of one numerical check.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(measured: f64, threshold: f64) -> Self {
        Check {
            measured,
            threshold,
            passed: measured <= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KindReport {
    pub kind: CoolingKind,
    pub realizable: bool,
    /// Largest reconstruction error of `g` on `[-5, 5]`.
    pub fourier_closure: Option<Check>,
    /// `|quadrature ‖f‖ - closed form|`.
    pub norm: Option<Check>,
    /// Largest `tail mass beyond L(ε) - ε` over `ε ∈ {1e-1, …, 1e-4}`.
    pub tails: Option<Check>,
    pub ks_x: Option<Check>,
    pub ks_y: Option<Check>,
}

impl KindReport {
    pub fn passed(&self) -> bool {
        [
            self.fourier_closure,
            self.norm,
            self.tails,
            self.ks_x,
            self.ks_y,
        ]
        .iter()
        .flatten()
        .all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub draws: usize,
    pub kinds: Vec<KindReport>,
}

impl ValidationReport {
    /// Every realizable kind passed and every other kind was reported as
    /// non-realizable.
    pub fn passed(&self) -> bool {
        self.kinds
            .iter()
            .all(|k| k.realizable == k.kind.is_realizable() && k.passed())
    }
}

pub const TAIL_EPSILONS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Largest `tail_mass(L(ε)) - ε` over [`TAIL_EPSILONS`].
pub fn worst_tail_excess(cf: &Cf) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for eps in TAIL_EPSILONS {
        worst = worst.max(tail_mass(cf, cf.cutoff(eps)?)? - eps);
    }
    Ok(worst)
}

/// KS statistics of `draws` samples of `x` and of `y` against their
/// distribution functions.
pub fn sampler_ks(cf: &Cf, draws: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = (0..draws)
        .map(|_| cf.sample_x(&mut rng))
        .collect::<Result<Vec<f64>>>()?;
    rng.set_stream(1);
    let mut ys = (0..draws)
        .map(|_| cf.sample_y(&mut rng))
        .collect::<Result<Vec<f64>>>()?;
    let ks_x = ks_statistic(&mut xs, |x| cf.cdf(x).expect("realizable"));
    let conv = CorrelationCdf::new(cf)?;
    let ks_y = ks_statistic(&mut ys, |y| conv.eval(y));
    Ok((ks_x, ks_y))
}

pub const CLOSURE_TOLERANCE: f64 = 1e-4;
pub const NORM_TOLERANCE: f64 = 1e-6;
pub const KS_THRESHOLD: f64 = 0.01;

/// Runs every check for every kind.
pub fn validate_functions(seed: u64, draws: usize) -> ValidationReport {
    let kinds = CoolingKind::ALL
        .iter()
        .map(|&kind| {
            let cf = Cf::new(kind);
            if !cf.is_realizable() {
                return KindReport {
                    kind,
                    realizable: false,
                    fourier_closure: None,
                    norm: None,
                    tails: None,
                    ks_x: None,
                    ks_y: None,
                };
            }
            let closure = Check::at_most(fourier_closure_error(&cf), CLOSURE_TOLERANCE);
            let norm = Check::at_most((dual_norm(&cf) - cf.f_norm()).abs(), NORM_TOLERANCE);
            let tails = worst_tail_excess(&cf).map(|w| Check::at_most(w, 0.0)).ok();
            let (ks_x, ks_y) = match sampler_ks(&cf, draws, seed) {
                Ok((x, y)) => (
                    Some(Check::at_most(x, KS_THRESHOLD)),
                    Some(Check::at_most(y, KS_THRESHOLD)),
                ),
                Err(_) => (None, None),
            };
            KindReport {
                kind,
                realizable: true,
                fourier_closure: Some(closure),
                norm: Some(norm),
                tails,
                ks_x,
                ks_y,
            }
        })
        .collect();
    ValidationReport { seed, draws, kinds }
}

/// Distribution function of `y` from its characteristic function `g(h)²`
/// (Gil-Pelaez inversion); an independent route to [`CorrelationCdf`].
pub fn correlation_cdf_from_transform(cf: &Cf, y: f64) -> f64 {
    if y == 0.0 {
        return 0.5;
    }
    let h_max = match cf.kind() {
        CoolingKind::Triangle | CoolingKind::Rectangular => 1.0,
        CoolingKind::Exponential => 20.0,
        CoolingKind::Gaussian => 5.0,
        CoolingKind::Sech => 20.0,
    };
    let q = integrate(
        |h| {
            let g = cf.g(h);
            let s = if h == 0.0 { y } else { (h * y).sin() / h };
            s * g * g
        },
        0.0,
        h_max,
        1e-12,
        1e-12,
    );
    0.5 + q.value / PI
}
