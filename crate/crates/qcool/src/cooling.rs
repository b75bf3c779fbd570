//! Cooling functions `g(h)`, their Fourier duals `f(x)` and samplers for the
//! normalized dual density `p(x) = f(x)/‖f‖`.
//!
//! The pair convention is `g(h) = (1/2π) ∫ f(x) e^{ixh} dx`. Every dual here
//! is real, even and nonnegative, so `‖f‖ = ∫ f = 2π g(0)` and the phase
//! of the dual is identically zero.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;

use num_traits::Float;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{erfc, sinc_half, sine_integral};

/// The five cooling functions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoolingKind {
    Rectangular,
    Triangle,
    Exponential,
    Gaussian,
    Sech,
}

impl CoolingKind {
    pub const ALL: [CoolingKind; 5] = [
        CoolingKind::Rectangular,
        CoolingKind::Triangle,
        CoolingKind::Exponential,
        CoolingKind::Gaussian,
        CoolingKind::Sech,
    ];

    pub const REALIZABLE: [CoolingKind; 4] = [
        CoolingKind::Triangle,
        CoolingKind::Exponential,
        CoolingKind::Gaussian,
        CoolingKind::Sech,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoolingKind::Rectangular => "rectangular",
            CoolingKind::Triangle => "triangle",
            CoolingKind::Exponential => "exponential",
            CoolingKind::Gaussian => "gaussian",
            CoolingKind::Sech => "sech",
        }
    }

    pub fn is_realizable(self) -> bool {
        self != CoolingKind::Rectangular
    }
}

impl fmt::Display for CoolingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoolingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CoolingKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown cooling function `{s}` (expected rectangular, triangle, exponential, gaussian or sech)"
            ))
        })
    }
}

/// Upper bound of `p(x)/q(x)` for the triangle density `p` against the
/// standard Lorentzian `q`, used by the rejection sampler.
///
/// `p/q = (1 + x²) sin²(x/2) · 2/x²`. For `|x| ≥ 2` this is at most
/// `2(1 + 1/4)`; for `|x| < 2` it is at most `2 sin²(x/2)/x² + 2 ≤ 5/2`.
pub const TRIANGLE_ENVELOPE: f64 = 2.5;

/// A cooling function together with its dual density.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CoolingFunction<T> {
    kind: CoolingKind,
    _scalar: PhantomData<T>,
}

impl<T: Real> CoolingFunction<T> {
    pub fn new(kind: CoolingKind) -> Self {
        CoolingFunction {
            kind,
            _scalar: PhantomData,
        }
    }

    pub fn kind(&self) -> CoolingKind {
        self.kind
    }

    pub fn is_realizable(&self) -> bool {
        self.kind.is_realizable()
    }

    fn realizable(&self) -> Result<()> {
        if self.is_realizable() {
            Ok(())
        } else {
            Err(Error::NonRealizable { kind: self.kind })
        }
    }

    /// `g(h)`.
    pub fn g(&self, h: T) -> T {
        let a = Float::abs(h);
        match self.kind {
            CoolingKind::Rectangular => {
                if a <= T::lit(0.5) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            CoolingKind::Triangle => Float::max(T::one() - a, T::zero()),
            CoolingKind::Exponential => Float::exp(-a),
            CoolingKind::Gaussian => Float::exp(-h * h),
            CoolingKind::Sech => T::one() / Float::cosh(h),
        }
    }

    /// `f(x)`, the Fourier dual of `g`.
    pub fn f(&self, x: T) -> T {
        let xf = x.as_f64();
        match self.kind {
            CoolingKind::Rectangular => T::lit(sinc_half(xf)),
            CoolingKind::Triangle => T::lit(sinc_half(xf).powi(2)),
            CoolingKind::Exponential => T::lit(2.0) / (T::one() + x * x),
            CoolingKind::Gaussian => T::PI().sqrt() * Float::exp(-x * x / T::lit(4.0)),
            CoolingKind::Sech => T::PI() / Float::cosh(T::FRAC_PI_2() * x),
        }
    }

    /// `‖f‖ = ∫|f|`, infinite for the rectangular function.
    pub fn f_norm(&self) -> T {
        match self.kind {
            CoolingKind::Rectangular => T::infinity(),
            _ => T::TAU(),
        }
    }

    /// `c = ‖f‖ / 2π`.
    pub fn c(&self) -> T {
        self.f_norm() / T::TAU()
    }

    /// Normalized dual density `p(x) = f(x)/‖f‖`.
    pub fn density(&self, x: T) -> Result<T> {
        self.realizable()?;
        Ok(self.f(x) / self.f_norm())
    }

    /// Analytic distribution function of `p`.
    pub fn cdf(&self, x: T) -> Result<T> {
        self.realizable()?;
        let x = x.as_f64();
        let v = match self.kind {
            CoolingKind::Triangle => {
                let sh = (0.5 * x).sin();
                let ramp = if x == 0.0 { 0.0 } else { 2.0 * sh * sh / x };
                0.5 + (sine_integral(x) - ramp) / PI
            }
            CoolingKind::Exponential => 0.5 + x.atan() / PI,
            CoolingKind::Gaussian => 0.5 * erfc(-0.5 * x),
            CoolingKind::Sech => FRAC_2_PI * (0.5 * PI * x).exp().atan(),
            CoolingKind::Rectangular => unreachable!(),
        };
        Ok(T::lit(v))
    }

    /// `L(ε)`: the mass of `p` outside `[-L, L]` is at most `ε`.
    pub fn cutoff(&self, eps: T) -> Result<T> {
        self.realizable()?;
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff tolerance {eps} must lie in (0, 1)"
            )));
        }
        Ok(match self.kind {
            CoolingKind::Triangle => T::lit(6.0) / eps,
            CoolingKind::Exponential => T::lit(2.0) / (T::PI() * eps),
            CoolingKind::Gaussian => T::lit(2.0) * Float::sqrt(Float::ln(T::one() / eps)),
            CoolingKind::Sech => T::FRAC_2_PI() * Float::ln(T::lit(4.0) / (T::PI() * eps)),
            CoolingKind::Rectangular => unreachable!(),
        })
    }

    /// Inverse of [`CoolingFunction::cutoff`]: the guaranteed tail mass beyond
    /// `±x`, clamped to 1.
    pub fn tail_bound(&self, x: T) -> Result<T> {
        self.realizable()?;
        if !(x > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff {x} must be positive"
            )));
        }
        let t = match self.kind {
            CoolingKind::Triangle => T::lit(6.0) / x,
            CoolingKind::Exponential => T::lit(2.0) / (T::PI() * x),
            CoolingKind::Gaussian => Float::exp(-x * x / T::lit(4.0)),
            CoolingKind::Sech => T::lit(4.0) / T::PI() * Float::exp(-T::FRAC_PI_2() * x),
            CoolingKind::Rectangular => unreachable!(),
        };
        Ok(Float::min(t, T::one()))
    }

    /// `g⁻¹(p) ≥ 0`. For `sech` this is the upper bound `ln(2/p)` on the
    /// exact inverse, so `g(g⁻¹(p)) ≤ p` there and budgets err on the side of
    /// a longer imaginary time.
    pub fn g_inverse(&self, p: T) -> Result<T> {
        self.realizable()?;
        if !(p > T::zero() && p <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "g_inverse argument {p} must lie in (0, 1]"
            )));
        }
        Ok(match self.kind {
            CoolingKind::Triangle => T::one() - p,
            CoolingKind::Exponential => Float::ln(T::one() / p),
            CoolingKind::Gaussian => Float::sqrt(Float::ln(T::one() / p)),
            CoolingKind::Sech => Float::ln(T::lit(2.0) / p),
            CoolingKind::Rectangular => unreachable!(),
        })
    }

    /// Draws `x ~ p`.
    pub fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T> {
        self.sample_x_counted(rng).map(|(x, _)| x)
    }

    /// Draws `x ~ p` and reports how many proposals were used (always 1
    /// except for the triangle's rejection sampler).
    pub fn sample_x_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(T, u32)> {
        self.realizable()?;
        let draw = match self.kind {
            CoolingKind::Triangle => {
                let mut attempts = 0u32;
                loop {
                    attempts += 1;
                    let x = lorentzian(rng);
                    let s = sinc_half(x);
                    let ratio = 0.5 * (1.0 + x * x) * s * s;
                    let v: f64 = rng.random();
                    if v * TRIANGLE_ENVELOPE <= ratio {
                        break (x, attempts);
                    }
                }
            }
            CoolingKind::Exponential => (lorentzian(rng), 1),
            CoolingKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                (std::f64::consts::SQRT_2 * z, 1)
            }
            CoolingKind::Sech => {
                let u: f64 = rng.sample(Open01);
                (FRAC_2_PI * (0.5 * PI * u).tan().ln(), 1)
            }
            CoolingKind::Rectangular => unreachable!(),
        };
        Ok((T::lit(draw.0), draw.1))
    }

    /// Draws `y = x - x'` with `x, x'` independent draws from `p`; `y` is
    /// distributed as the self-correlation of `p`.
    pub fn sample_y<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T> {
        let x = self.sample_x(rng)?;
        let xp = self.sample_x(rng)?;
        Ok(x - xp)
    }
}

fn lorentzian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    (PI * (u - 0.5)).tan()
}
