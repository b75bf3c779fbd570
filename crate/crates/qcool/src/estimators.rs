//! Monte-Carlo estimators built on shot batches: the normalization factor,
//! the energy scan with shot reuse, peak search, the unnormalized
//! observable and the observable ratio.

use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooling::{CoolingFunction, CoolingKind};
use crate::engine::EigenSystem;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::scalar::Real;
use crate::shots::{Mode, NormalizationSampler, ObservableSampler, ShotBatch};

/// Parameters an estimate was produced with.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho<T> {
    pub kind: CoolingKind,
    pub mode: Mode,
    pub tau: T,
    pub x_m: T,
    pub n_m: usize,
    pub e: T,
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct EstimateResult<T> {
    pub value: T,
    pub shots_used: usize,
    pub truncated_count: usize,
    /// Hoeffding scale `2·scale/√N_M` (`scale` is 1 for D and `‖O‖₁` for N).
    pub standard_error: T,
    pub echo: ConfigEcho<T>,
}

/// Evaluates a batch at energy `e` (shifted frame).
pub fn estimate_from_batch<T: Real>(batch: &ShotBatch<T>, e: T) -> EstimateResult<T> {
    let n = batch.len();
    let se = if n == 0 {
        T::infinity()
    } else {
        T::lit(2.0) * batch.scale / Float::sqrt(T::lit(n as f64))
    };
    EstimateResult {
        value: batch.reweight(e),
        shots_used: n,
        truncated_count: batch.truncated_count(),
        standard_error: se,
        echo: ConfigEcho {
            kind: batch.cooling,
            mode: batch.mode,
            tau: batch.tau,
            x_m: batch.x_m,
            n_m: n,
            e,
            seed: batch.seed,
        },
    }
}

fn check_shots(n_m: usize) -> Result<()> {
    if n_m == 0 {
        return Err(Error::InvalidArgument("N_M must be at least 1".into()));
    }
    Ok(())
}

/// `D̂(E) = Re((1/N_M) Σ_p d̂_p)`, unbiased for the truncated normalization factor.
#[allow(clippy::too_many_arguments)]
pub fn estimate_d<T: Real>(
    es: &EigenSystem<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    e: T,
    n_m: usize,
    seed: u64,
    mode: Mode,
) -> Result<EstimateResult<T>> {
    check_shots(n_m)?;
    let batch = NormalizationSampler::new(es, cf, tau, x_m, mode)?.batch(n_m, seed)?;
    Ok(estimate_from_batch(&batch, e))
}

/// `N̂(O;E) = Re((1/N_M) Σ_q n̂_q)`, unbiased for the truncated unnormalized expectation.
#[allow(clippy::too_many_arguments)]
pub fn estimate_n<T: Real>(
    es: &EigenSystem<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    e: T,
    observable: &Observable<T>,
    n_m: usize,
    seed: u64,
    mode: Mode,
) -> Result<EstimateResult<T>> {
    check_shots(n_m)?;
    let batch = ObservableSampler::new(es, cf, tau, x_m, observable, mode)?.batch(n_m, seed)?;
    Ok(estimate_from_batch(&batch, e))
}

/// `D̂` over a grid of trial energies, all evaluated on one shot batch.
#[derive(Clone, Debug)]
pub struct SpectrumCurve<T> {
    pub energies: Vec<T>,
    pub d_values: Vec<T>,
    pub mode: Mode,
    batch: ShotBatch<T>,
}

impl<T: Real> SpectrumCurve<T> {
    /// Re-weights `batch` at every grid point.
    pub fn from_batch(batch: ShotBatch<T>, grid: &[T]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidArgument("energy grid is empty".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "energy grid must be strictly increasing".into(),
            ));
        }
        let d_values = grid.par_iter().map(|&e| batch.reweight(e)).collect();
        Ok(SpectrumCurve {
            energies: grid.to_vec(),
            d_values,
            mode: batch.mode,
            batch,
        })
    }

    /// `D̂` at an arbitrary energy, at classical cost only.
    pub fn evaluate(&self, e: T) -> T {
        self.batch.reweight(e)
    }

    pub fn batch(&self) -> &ShotBatch<T> {
        &self.batch
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Smallest spacing between neighbouring grid points.
    pub fn spacing(&self) -> T {
        self.energies
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), Float::min)
    }
}

/// Uniform grid `lo, lo + step, …` up to and including `hi` (within rounding).
pub fn energy_grid<T: Real>(lo: T, hi: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero() && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bad grid [{lo}, {hi}] with step {step}"
        )));
    }
    let count = Float::floor((hi - lo) / step + T::lit(1e-9))
        .to_usize()
        .unwrap_or(0)
        + 1;
    Ok((0..count).map(|i| lo + step * T::lit(i as f64)).collect())
}

/// Draws one normalization batch and scans `grid` with it.
#[allow(clippy::too_many_arguments)]
pub fn scan_energy<T: Real>(
    es: &EigenSystem<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    grid: &[T],
    n_m: usize,
    seed: u64,
    mode: Mode,
) -> Result<SpectrumCurve<T>> {
    check_shots(n_m)?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("energy grid is empty".into()));
    }
    let batch = NormalizationSampler::new(es, cf, tau, x_m, mode)?.batch(n_m, seed)?;
    SpectrumCurve::from_batch(batch, grid)
}

/// A located maximum of `D̂(E)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Peak<T> {
    pub energy: T,
    pub height: T,
}

pub const DEFAULT_MIN_HEIGHT: f64 = 0.005;

/// Interior local maxima of the curve with height at least `min_height`.
///
/// Maxima closer than `min_separation` are merged in favour of the higher
/// one, then each survivor is refined by golden-section search on the reused
/// shots over its two neighbouring grid cells, down to 1/100 of the grid
/// spacing. Peaks are returned in increasing energy.
pub fn find_peaks<T: Real>(
    curve: &SpectrumCurve<T>,
    min_height: T,
    min_separation: T,
) -> Vec<Peak<T>> {
    let d = &curve.d_values;
    let e = &curve.energies;
    let mut candidates: Vec<usize> = (1..d.len().saturating_sub(1))
        .filter(|&i| d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] >= min_height)
        .collect();
    candidates.sort_by(|&a, &b| {
        d[b].partial_cmp(&d[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in candidates {
        if kept
            .iter()
            .all(|&k| Float::abs(e[k] - e[i]) >= min_separation)
        {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    let tol = curve.spacing() / T::lit(100.0);
    kept.into_iter()
        .map(|i| {
            let (energy, height) = golden_max(|x| curve.evaluate(x), e[i - 1], e[i + 1], tol);
            if height >= d[i] {
                Peak { energy, height }
            } else {
                Peak {
                    energy: e[i],
                    height: d[i],
                }
            }
        })
        .collect()
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
fn golden_max<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let r = (Float::sqrt(T::lit(5.0)) - T::one()) / T::lit(2.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut steps = 0;
    while b - a > tol && steps < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        steps += 1;
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// How the denominator of the observable ratio is obtained.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DenominatorRoute {
    /// A separate normalization batch on its own random stream.
    Independent,
    /// Normalization shots on the observable batch's time pairs.
    Paired,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ObservableEstimate<T> {
    /// `N̂ / D̂`.
    pub value: T,
    pub d: EstimateResult<T>,
    pub n: EstimateResult<T>,
}

/// The floor `D̂` must reach before it is used as a denominator.
pub fn degenerate_floor<T: Real>(d: &EstimateResult<T>) -> T {
    Float::max(T::lit(3.0) * d.standard_error, T::lit(1e-6))
}

/// `N̂ / D̂`, refusing denominators below [`degenerate_floor`].
pub fn ratio<T: Real>(d: EstimateResult<T>, n: EstimateResult<T>) -> Result<ObservableEstimate<T>> {
    let floor = degenerate_floor(&d);
    if !(d.value >= floor) {
        return Err(Error::DegenerateRatio {
            value: d.value.as_f64(),
            floor: floor.as_f64(),
        });
    }
    Ok(ObservableEstimate {
        value: n.value / d.value,
        d,
        n,
    })
}

/// `<Ô> = N̂/D̂` at energy `e` with `n_m` shots for each of numerator and denominator.
#[allow(clippy::too_many_arguments)]
pub fn estimate_observable<T: Real>(
    es: &EigenSystem<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    e: T,
    observable: &Observable<T>,
    n_m: usize,
    seed: u64,
    mode: Mode,
    route: DenominatorRoute,
) -> Result<ObservableEstimate<T>> {
    check_shots(n_m)?;
    let sampler = ObservableSampler::new(es, cf, tau, x_m, observable, mode)?;
    let (d, n) = match route {
        DenominatorRoute::Independent => {
            let d = NormalizationSampler::new(es, cf, tau, x_m, mode)?.batch(n_m, seed)?;
            (
                estimate_from_batch(&d, e),
                estimate_from_batch(&sampler.batch(n_m, seed)?, e),
            )
        }
        DenominatorRoute::Paired => {
            let pair = sampler.paired_batch(n_m, seed)?;
            (
                estimate_from_batch(&pair.denominator, e),
                estimate_from_batch(&pair.numerator, e),
            )
        }
    };
    ratio(d, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StateVector;
    use crate::pauli::PauliSum;
    use num_complex::Complex;

    fn hamiltonian() -> PauliSum<f64> {
        PauliSum::from_signed(2, &[(0.9, "XX"), (-0.4, "ZI"), (0.6, "IY"), (0.3, "ZZ")]).unwrap()
    }

    fn mixed() -> EigenSystem<f64> {
        let psi = StateVector::normalized(
            2,
            vec![
                Complex::new(0.6, 0.1),
                Complex::new(0.2, -0.3),
                Complex::new(-0.4, 0.2),
                Complex::new(0.3, 0.3),
            ],
        )
        .unwrap();
        EigenSystem::eigendecompose(&hamiltonian(), &psi).unwrap()
    }

    fn eigen(j: usize) -> EigenSystem<f64> {
        let es = mixed();
        EigenSystem::eigendecompose(&hamiltonian(), &es.eigenvector(j)).unwrap()
    }

    #[test]
    fn eigenstate_normalization_near_one() {
        let es = eigen(2);
        let e = es.shifted_energies()[2];
        for kind in CoolingKind::REALIZABLE {
            let cf = CoolingFunction::new(kind);
            let x_m = cf.cutoff(1e-6).unwrap().min(1e6);
            let r = estimate_d(&es, cf, 1.3, x_m, e, 20_000, 5, Mode::Shot).unwrap();
            assert!(
                (r.value - 1.0).abs() < 3.0 * r.standard_error,
                "{kind}: {}",
                r.value
            );
            assert_eq!(r.shots_used, 20_000);
            assert!((r.standard_error - 2.0 / 20_000f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_tau_normalization_is_one() {
        let es = mixed();
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        let r = estimate_d(&es, cf, 0.0, 50.0, 0.7, 30_000, 2, Mode::Shot).unwrap();
        assert!((r.value - 1.0).abs() < 3.0 * r.standard_error);
        let r = estimate_d(&es, cf, 0.0, 50.0, 0.7, 1000, 2, Mode::Expectation).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scan_matches_point_estimates_bitwise() {
        let es = mixed();
        let cf = CoolingFunction::new(CoolingKind::Sech);
        for mode in [Mode::Shot, Mode::Expectation] {
            let grid = energy_grid(0.0, 3.0, 0.25).unwrap();
            let curve = scan_energy(&es, cf, 1.2, 6.0, &grid, 4000, 11, mode).unwrap();
            for (&e, &d) in grid.iter().zip(&curve.d_values) {
                let point = estimate_d(&es, cf, 1.2, 6.0, e, 4000, 11, mode).unwrap();
                assert_eq!(point.value.to_bits(), d.to_bits());
            }
        }
    }

    #[test]
    fn grid_validation() {
        let es = mixed();
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        assert!(scan_energy(&es, cf, 1.0, 4.0, &[], 10, 1, Mode::Shot).is_err());
        assert!(scan_energy(&es, cf, 1.0, 4.0, &[1.0, 1.0], 10, 1, Mode::Shot).is_err());
        assert_eq!(energy_grid(0.0, 1.0, 0.1).unwrap().len(), 11);
    }

    #[test]
    fn single_eigenstate_gives_one_peak() {
        let es = eigen(1);
        let ej = es.shifted_energies()[1];
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        let grid = energy_grid(ej - 2.0, ej + 2.0, 0.05).unwrap();
        let curve = scan_energy(&es, cf, 2.0, 8.0, &grid, 200_000, 3, Mode::Expectation).unwrap();
        let peaks = find_peaks(&curve, 0.005, 0.5);
        assert_eq!(peaks.len(), 1, "{peaks:?}");
        assert!((peaks[0].energy - ej).abs() < 0.05);
    }

    #[test]
    fn flat_window_has_no_peaks() {
        let es = eigen(0);
        let e0 = es.shifted_energies()[0];
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        let grid = energy_grid(e0 + 3.0, e0 + 6.0, 0.05).unwrap();
        let curve = scan_energy(&es, cf, 4.0, 8.0, &grid, 200_000, 3, Mode::Expectation).unwrap();
        assert!(find_peaks(&curve, 0.005, 0.5).is_empty());
    }

    #[test]
    fn merging_keeps_the_higher_peak() {
        let es = mixed();
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        let grid = energy_grid(-1.0, 5.0, 0.02).unwrap();
        let curve = scan_energy(&es, cf, 3.0, 8.0, &grid, 4000, 3, Mode::Expectation).unwrap();
        let all = find_peaks(&curve, 0.005, 0.0);
        let merged = find_peaks(&curve, 0.005, 100.0);
        assert_eq!(merged.len(), 1);
        let best = all.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.height));
        assert!((merged[0].height - best).abs() < 1e-12);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let (x, y) = golden_max(|x: f64| 1.0 - (x - 0.3).powi(2), -1.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-6 && (y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_observable_matches_normalization() {
        let es = mixed();
        let cf = CoolingFunction::new(CoolingKind::Exponential);
        let id = Observable::identity(2).unwrap();
        let e = es.shifted_energies()[1];
        let r = estimate_observable(
            &es,
            cf,
            0.8,
            30.0,
            e,
            &id,
            50_000,
            8,
            Mode::Shot,
            DenominatorRoute::Independent,
        )
        .unwrap();
        let tol = 3.0 * (r.d.standard_error + r.n.standard_error);
        assert!((r.n.value - r.d.value).abs() < tol);
        let r = estimate_observable(
            &es,
            cf,
            0.8,
            30.0,
            e,
            &id,
            5000,
            8,
            Mode::Expectation,
            DenominatorRoute::Paired,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn eigenstate_observable_value() {
        let es = eigen(3);
        let e = es.shifted_energies()[3];
        let o = Observable::from(PauliSum::from_signed(2, &[(0.7, "ZI"), (0.3, "IX")]).unwrap());
        let want = es
            .exact_n(&CoolingFunction::new(CoolingKind::Gaussian), 0.0, 0.0, &o)
            .unwrap();
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        let n = estimate_n(&es, cf, 1.0, 12.0, e, &o, 40_000, 6, Mode::Shot).unwrap();
        assert!(
            (n.value - want).abs() < 3.0 * n.standard_error,
            "{} vs {want}",
            n.value
        );
        assert!((n.standard_error - 2.0 / 40_000f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_denominator_rejected() {
        let es = eigen(0);
        let far = es.shifted_energies()[0] + 40.0;
        let cf = CoolingFunction::new(CoolingKind::Gaussian);
        let id = Observable::identity(2).unwrap();
        let r = estimate_observable(
            &es,
            cf,
            2.0,
            6.0,
            far,
            &id,
            1000,
            1,
            Mode::Shot,
            DenominatorRoute::Independent,
        );
        assert!(matches!(r, Err(Error::DegenerateRatio { .. })));
    }
}
