//! Single-shot Hadamard tests and the per-shot estimators.
//!
//! Shot `k` of a batch draws from its own ChaCha8 stream keyed by
//! `(seed, channel, k)`, so batches are bit-reproducible under any thread
//! count and a prefix of a batch equals a shorter batch with the same seed.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooling::{CoolingFunction, CoolingKind};
use crate::engine::StateVector;
use crate::engine::{EigenSystem, ReducedOperator, SupportKernel, UnitarySpec};
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::scalar::{cis, Real};

/// How a shot's overlap enters the estimator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Simulated single-shot Hadamard outcomes, `r̂ = 2 i^b (-1)^a`.
    Shot,
    /// The exact overlap replaces the single-shot outcome; only the sampling
    /// of times (and nothing else) is random.
    Expectation,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Shot => "shot",
            Mode::Expectation => "expectation",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shot" => Ok(Mode::Shot),
            "expectation" => Ok(Mode::Expectation),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mode `{s}` (expected shot or expectation)"
            ))),
        }
    }
}

/// Seed channels separating the random streams of different batch types.
pub mod channel {
    pub const NORMALIZATION: u64 = 0x44;
    pub const OBSERVABLE: u64 = 0x4E;
}

/// RNG for shot `k` of the batch `(seed, channel)`.
pub fn shot_rng(seed: u64, channel: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ channel.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(k);
    rng
}

/// Sampled times of one shot.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ShotTimes<T> {
    /// Normalization shot, `y ~ p̃`.
    Correlation { y: T },
    /// Observable shot, `x, x' ~ p`.
    Pair { x: T, x_prime: T },
}

/// One Hadamard-test outcome.
///
/// In shot mode `raw_r = 2 i^b (-1)^a`, or 0 when truncated. In expectation
/// mode `b = a = 0` and `raw_r` is the exact overlap (divided by `‖O‖₁` for
/// observable shots).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ShotRecord<T> {
    pub times: ShotTimes<T>,
    pub pauli_index: Option<usize>,
    pub b: u8,
    pub a: u8,
    pub truncated: bool,
    pub raw_r: Complex<T>,
}

impl<T: Real> ShotRecord<T> {
    /// `d̂ = r̂ e^{-iτyE}`; pair records use `y = x - x'`.
    pub fn d_hat(&self, tau: T, e: T) -> Complex<T> {
        self.raw_r * cis(-tau * self.delay() * e)
    }

    /// `n̂ = ‖O‖₁ e^{-iτ(x-x')E} r̂`.
    pub fn n_hat(&self, tau: T, e: T, one_norm: T) -> Complex<T> {
        self.d_hat(tau, e) * one_norm
    }

    fn delay(&self) -> T {
        match self.times {
            ShotTimes::Correlation { y } => y,
            ShotTimes::Pair { x, x_prime } => x - x_prime,
        }
    }
}

/// `r̂ = 2 i^b (-1)^a`.
pub fn estimator_r<T: Real>(b: u8, a: u8) -> Complex<T> {
    let two = T::lit(2.0);
    let s = if a & 1 == 0 { two } else { -two };
    if b & 1 == 0 {
        Complex::new(s, T::zero())
    } else {
        Complex::new(T::zero(), s)
    }
}

/// Outcome of a Hadamard test on an overlap `v`: `a = 0` with probability
/// `(1 + Re v)/2` for `b = 0` and `(1 + Im v)/2` for `b = 1`.
pub fn hadamard_outcome<T: Real, R: Rng + ?Sized>(v: Complex<T>, b: u8, rng: &mut R) -> Result<u8> {
    let m = v.norm().as_f64();
    if m > 1.0 + 1e-9 {
        return Err(Error::OverlapOutOfRange(m));
    }
    let comp = if b & 1 == 0 { v.re } else { v.im };
    let p0 = 0.5 * (1.0 + comp.as_f64());
    let u: f64 = rng.random();
    Ok(if u < p0 { 0 } else { 1 })
}

/// Hadamard test of `U` on `ψ₀`, with `v = <ψ₀|U|ψ₀>` evaluated densely.
pub fn hadamard_shot<T: Real, R: Rng + ?Sized>(
    es: &EigenSystem<T>,
    psi0: &StateVector<T>,
    spec: &UnitarySpec<'_, T>,
    tau: T,
    b: u8,
    rng: &mut R,
) -> Result<u8> {
    let v = es.matrix_element(psi0, spec, tau)?;
    hadamard_outcome(v, b, rng)
}

fn measure<T: Real, R: Rng + ?Sized>(
    v: Complex<T>,
    mode: Mode,
    rng: &mut R,
) -> Result<(u8, u8, Complex<T>)> {
    match mode {
        Mode::Expectation => {
            if v.norm().as_f64() > 1.0 + 1e-9 {
                return Err(Error::OverlapOutOfRange(v.norm().as_f64()));
            }
            Ok((0, 0, v))
        }
        Mode::Shot => {
            let b = u8::from(rng.random::<bool>());
            let a = hadamard_outcome(v, b, rng)?;
            Ok((b, a, estimator_r(b, a)))
        }
    }
}

/// Whether a batch estimates the normalization or an observable.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ShotKind {
    Normalization,
    Observable,
}

impl ShotKind {
    pub fn tag(self) -> &'static str {
        match self {
            ShotKind::Normalization => "d",
            ShotKind::Observable => "n",
        }
    }
}

/// A batch of shot records drawn with one set of parameters.
#[derive(Clone, Debug)]
pub struct ShotBatch<T> {
    pub kind: ShotKind,
    pub cooling: CoolingKind,
    pub mode: Mode,
    pub tau: T,
    pub x_m: T,
    /// `1` for normalization batches, `‖O‖₁` for observable batches.
    pub scale: T,
    pub seed: u64,
    pub records: Vec<ShotRecord<T>>,
    /// Total proposals drawn by the time samplers (exceeds the number of
    /// draws only for the triangle's rejection sampler).
    pub proposals: u64,
}

impl<T: Real> ShotBatch<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn truncated_count(&self) -> usize {
        self.records.iter().filter(|r| r.truncated).count()
    }

    /// `Re((1/N) Σ_p scale · r̂_p e^{-iτ y_p E})`.
    ///
    /// This single re-weighting serves every trial energy; the scan and the
    /// point estimators both call it, so they agree bitwise.
    pub fn reweight(&self, e: T) -> T {
        if self.records.is_empty() {
            return T::zero();
        }
        let mut acc = T::zero();
        for r in &self.records {
            if !r.truncated {
                acc += r.d_hat(self.tau, e).re;
            }
        }
        acc * self.scale / T::lit(self.records.len() as f64)
    }

    /// Writes the shot log as CSV:
    /// `shot_index,kind,y_or_x,x_prime,pauli_index,b,a,truncated`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "shot_index,kind,y_or_x,x_prime,pauli_index,b,a,truncated"
        )?;
        for (k, r) in self.records.iter().enumerate() {
            let (first, second) = match r.times {
                ShotTimes::Correlation { y } => (format!("{:.12e}", y.as_f64()), String::new()),
                ShotTimes::Pair { x, x_prime } => (
                    format!("{:.12e}", x.as_f64()),
                    format!("{:.12e}", x_prime.as_f64()),
                ),
            };
            let l = r.pauli_index.map(|l| l.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{k},{},{first},{second},{l},{},{},{}",
                self.kind.tag(),
                r.b,
                r.a,
                u8::from(r.truncated)
            )?;
        }
        Ok(())
    }
}

fn log_acceptance(kind: CoolingKind, draws: u64, proposals: u64) {
    if kind == CoolingKind::Triangle && proposals > 0 {
        log::debug!(
            "triangle rejection sampler: {draws} draws from {proposals} proposals, acceptance {:.4}",
            draws as f64 / proposals as f64
        );
    }
}

/// Draws normalization shots (one `y ~ p̃` per shot, `U = e^{iyτH}`) for the
/// initial state attached to an [`EigenSystem`].
pub struct NormalizationSampler<T: Real> {
    kernel: SupportKernel<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    mode: Mode,
}

impl<T: Real> NormalizationSampler<T> {
    pub fn new(
        es: &EigenSystem<T>,
        cf: CoolingFunction<T>,
        tau: T,
        x_m: T,
        mode: Mode,
    ) -> Result<Self> {
        if !cf.is_realizable() {
            return Err(Error::NonRealizable { kind: cf.kind() });
        }
        if !(tau >= T::zero() && x_m >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "need tau >= 0 and x_m >= 0, got {tau}, {x_m}"
            )));
        }
        Ok(NormalizationSampler {
            kernel: es.kernel(),
            cf,
            tau,
            x_m,
            mode,
        })
    }

    /// One shot plus the number of time proposals it consumed.
    pub fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(ShotRecord<T>, u32)> {
        let (x, n1) = self.cf.sample_x_counted(rng)?;
        let (xp, n2) = self.cf.sample_x_counted(rng)?;
        let y = x - xp;
        let times = ShotTimes::Correlation { y };
        if Float::abs(y) > self.x_m {
            let zero = Complex::new(T::zero(), T::zero());
            return Ok((
                ShotRecord {
                    times,
                    pauli_index: None,
                    b: 0,
                    a: 0,
                    truncated: true,
                    raw_r: zero,
                },
                n1 + n2,
            ));
        }
        let v = self.kernel.evolution_overlap(y, self.tau);
        let (b, a, raw_r) = measure(v, self.mode, rng)?;
        Ok((
            ShotRecord {
                times,
                pauli_index: None,
                b,
                a,
                truncated: false,
                raw_r,
            },
            n1 + n2,
        ))
    }

    pub fn batch(&self, n_m: usize, seed: u64) -> Result<ShotBatch<T>> {
        let out = (0..n_m)
            .into_par_iter()
            .map(|k| self.shot(&mut shot_rng(seed, channel::NORMALIZATION, k as u64)))
            .collect::<Result<Vec<_>>>()?;
        let proposals = out.iter().map(|(_, c)| u64::from(*c)).sum();
        log_acceptance(self.cf.kind(), 2 * n_m as u64, proposals);
        Ok(ShotBatch {
            kind: ShotKind::Normalization,
            cooling: self.cf.kind(),
            mode: self.mode,
            tau: self.tau,
            x_m: self.x_m,
            scale: T::one(),
            seed,
            records: out.into_iter().map(|(r, _)| r).collect(),
            proposals,
        })
    }
}

/// Draws observable shots (`x, x' ~ p`, `l ~ Pr_O`,
/// `U = e^{-ix'τH} O_l e^{ixτH}`).
pub struct ObservableSampler<'a, T: Real> {
    observable: &'a Observable<T>,
    kernel: SupportKernel<T>,
    terms: Vec<ReducedOperator<T>>,
    full: ReducedOperator<T>,
    identity: ReducedOperator<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    mode: Mode,
}

/// Observable shots and the normalization shots formed from the same time
/// pairs (`y = x - x'`, truncated whenever the observable shot is).
#[derive(Clone, Debug)]
pub struct PairedBatch<T> {
    pub numerator: ShotBatch<T>,
    pub denominator: ShotBatch<T>,
}

impl<'a, T: Real> ObservableSampler<'a, T> {
    pub fn new(
        es: &EigenSystem<T>,
        cf: CoolingFunction<T>,
        tau: T,
        x_m: T,
        observable: &'a Observable<T>,
        mode: Mode,
    ) -> Result<Self> {
        if !cf.is_realizable() {
            return Err(Error::NonRealizable { kind: cf.kind() });
        }
        if observable.is_empty() || !(observable.one_norm() > T::zero()) {
            return Err(Error::EmptyObservable);
        }
        if observable.n() != es.n() {
            return Err(Error::DimensionMismatch {
                expected: es.n(),
                found: observable.n(),
            });
        }
        if !(tau >= T::zero() && x_m >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "need tau >= 0 and x_m >= 0, got {tau}, {x_m}"
            )));
        }
        let kernel = es.kernel();
        let terms = match mode {
            Mode::Shot => observable
                .terms()
                .iter()
                .map(|(_, t)| kernel.reduce_term(es, t))
                .collect::<Result<Vec<_>>>()?,
            Mode::Expectation => Vec::new(),
        };
        let full = kernel.reduce_observable(es, observable)?;
        let identity = kernel.reduce_observable(es, &Observable::identity(es.n())?)?;
        Ok(ObservableSampler {
            observable,
            kernel,
            terms,
            full,
            identity,
            cf,
            tau,
            x_m,
            mode,
        })
    }

    fn pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(T, T, bool, u32)> {
        let (x, n1) = self.cf.sample_x_counted(rng)?;
        let (xp, n2) = self.cf.sample_x_counted(rng)?;
        let truncated = Float::abs(x) > self.x_m || Float::abs(xp) > self.x_m;
        Ok((x, xp, truncated, n1 + n2))
    }

    fn observable_record<R: Rng + ?Sized>(
        &self,
        x: T,
        xp: T,
        truncated: bool,
        rng: &mut R,
    ) -> Result<ShotRecord<T>> {
        let times = ShotTimes::Pair { x, x_prime: xp };
        let zero = Complex::new(T::zero(), T::zero());
        match self.mode {
            Mode::Shot => {
                let l = self.observable.sample_term(rng)?;
                if truncated {
                    return Ok(ShotRecord {
                        times,
                        pauli_index: Some(l),
                        b: 0,
                        a: 0,
                        truncated,
                        raw_r: zero,
                    });
                }
                let v = self.kernel.sandwich(&self.terms[l], xp, x, self.tau);
                let (b, a, raw_r) = measure(v, Mode::Shot, rng)?;
                Ok(ShotRecord {
                    times,
                    pauli_index: Some(l),
                    b,
                    a,
                    truncated,
                    raw_r,
                })
            }
            Mode::Expectation => {
                if truncated {
                    return Ok(ShotRecord {
                        times,
                        pauli_index: None,
                        b: 0,
                        a: 0,
                        truncated,
                        raw_r: zero,
                    });
                }
                let v =
                    self.kernel.sandwich(&self.full, xp, x, self.tau) / self.observable.one_norm();
                Ok(ShotRecord {
                    times,
                    pauli_index: None,
                    b: 0,
                    a: 0,
                    truncated,
                    raw_r: v,
                })
            }
        }
    }

    /// One observable shot plus the number of time proposals it consumed.
    pub fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(ShotRecord<T>, u32)> {
        let (x, xp, truncated, n) = self.pair(rng)?;
        Ok((self.observable_record(x, xp, truncated, rng)?, n))
    }

    fn wrap(
        &self,
        kind: ShotKind,
        scale: T,
        seed: u64,
        records: Vec<ShotRecord<T>>,
        proposals: u64,
    ) -> ShotBatch<T> {
        ShotBatch {
            kind,
            cooling: self.cf.kind(),
            mode: self.mode,
            tau: self.tau,
            x_m: self.x_m,
            scale,
            seed,
            records,
            proposals,
        }
    }

    pub fn batch(&self, n_m: usize, seed: u64) -> Result<ShotBatch<T>> {
        let out = (0..n_m)
            .into_par_iter()
            .map(|k| self.shot(&mut shot_rng(seed, channel::OBSERVABLE, k as u64)))
            .collect::<Result<Vec<_>>>()?;
        let proposals = out.iter().map(|(_, c)| u64::from(*c)).sum();
        log_acceptance(self.cf.kind(), 2 * n_m as u64, proposals);
        let records = out.into_iter().map(|(r, _)| r).collect();
        Ok(self.wrap(
            ShotKind::Observable,
            self.observable.one_norm(),
            seed,
            records,
            proposals,
        ))
    }

    /// Observable shots together with normalization shots on the same time
    /// pairs. In shot mode the denominator gets its own Hadamard outcome.
    pub fn paired_batch(&self, n_m: usize, seed: u64) -> Result<PairedBatch<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let out = (0..n_m)
            .into_par_iter()
            .map(|k| {
                let rng = &mut shot_rng(seed, channel::OBSERVABLE, k as u64);
                let (x, xp, truncated, n) = self.pair(rng)?;
                let num = self.observable_record(x, xp, truncated, rng)?;
                let times = ShotTimes::Correlation { y: x - xp };
                let den = if truncated {
                    ShotRecord {
                        times,
                        pauli_index: None,
                        b: 0,
                        a: 0,
                        truncated,
                        raw_r: zero,
                    }
                } else {
                    let v = self.kernel.sandwich(&self.identity, xp, x, self.tau);
                    let (b, a, raw_r) = measure(v, self.mode, rng)?;
                    ShotRecord {
                        times,
                        pauli_index: None,
                        b,
                        a,
                        truncated,
                        raw_r,
                    }
                };
                Ok((num, den, n))
            })
            .collect::<Result<Vec<_>>>()?;
        let proposals = out.iter().map(|(_, _, c)| u64::from(*c)).sum();
        log_acceptance(self.cf.kind(), 2 * n_m as u64, proposals);
        let (mut nums, mut dens) = (Vec::with_capacity(n_m), Vec::with_capacity(n_m));
        for (a, b, _) in out {
            nums.push(a);
            dens.push(b);
        }
        Ok(PairedBatch {
            numerator: self.wrap(
                ShotKind::Observable,
                self.observable.one_norm(),
                seed,
                nums,
                proposals,
            ),
            denominator: self.wrap(ShotKind::Normalization, T::one(), seed, dens, proposals),
        })
    }
}

/// Draws one normalization shot.
pub fn d_shot<T: Real, R: Rng + ?Sized>(
    es: &EigenSystem<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    mode: Mode,
    rng: &mut R,
) -> Result<ShotRecord<T>> {
    Ok(NormalizationSampler::new(es, cf, tau, x_m, mode)?
        .shot(rng)?
        .0)
}

/// Draws one observable shot.
pub fn n_shot<T: Real, R: Rng + ?Sized>(
    es: &EigenSystem<T>,
    cf: CoolingFunction<T>,
    tau: T,
    x_m: T,
    observable: &Observable<T>,
    mode: Mode,
    rng: &mut R,
) -> Result<ShotRecord<T>> {
    Ok(ObservableSampler::new(es, cf, tau, x_m, observable, mode)?
        .shot(rng)?
        .0)
}
