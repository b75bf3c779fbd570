//! Resource budgets: from a target accuracy to `(τ, x_m, N_M, δ)` and back.

use num_traits::Float;
use serde::Serialize;

use crate::cooling::{CoolingFunction, CoolingKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// What a budget guarantees.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "target", rename_all = "lowercase")]
pub enum Target<T> {
    /// `|<Ô> - <O>| ≤ ε(‖O‖₁ + 1)`.
    Observable { epsilon: T, overlap: T, gap: T },
    /// `|Ê_j - E_j| ≤ κ`.
    Energy { kappa: T, overlap: T },
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Budget<T> {
    pub kind: CoolingKind,
    pub tau: T,
    pub x_m: T,
    /// `τ·x_m`, the longest real-time evolution.
    pub t_m: T,
    pub n_m: u64,
    pub k: T,
    /// Failure probability `4e^{-K/8}`.
    pub delta: T,
    pub target: Target<T>,
    /// Whether the looser, shorter-evolution constants were used.
    pub loose: bool,
}

/// `4e^{-K/8}`.
pub fn failure_probability<T: Real>(k: T) -> T {
    T::lit(4.0) * Float::exp(-k / T::lit(8.0))
}

fn in_unit(name: &str, v: impl Real) -> Result<()> {
    if v > num_traits::Zero::zero() && v < num_traits::One::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} = {v} must lie in (0, 1)"
        )))
    }
}

fn positive(name: &str, v: impl Real) -> Result<()> {
    if v > num_traits::Zero::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} = {v} must be positive and finite"
        )))
    }
}

/// Smallest integer not below `x`, tolerant of rounding just above an integer.
fn shot_count<T: Real>(x: T) -> Result<u64> {
    let v = x.as_f64();
    if !(v.is_finite() && v < 1.8e19) {
        return Err(Error::InvalidArgument(format!(
            "shot count {v} is not representable"
        )));
    }
    let r = v.round();
    Ok(if (v - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        v.ceil() as u64
    }
    .max(1))
}

fn assemble<T: Real>(
    cf: &CoolingFunction<T>,
    tau: T,
    x_m: T,
    n_m: u64,
    k: T,
    target: Target<T>,
    loose: bool,
) -> Budget<T> {
    Budget {
        kind: cf.kind(),
        tau,
        x_m,
        t_m: tau * x_m,
        n_m,
        k,
        delta: failure_probability(k),
        target,
        loose,
    }
}

/// Budget for observable estimation with overlap `p_j` and gap `Δ`:
/// `τ = g⁻¹(εp_j/12)/Δ`, `x_m = √2·L(εp_j/12)`, `N_M = K(εp_j/6)^{-2}`.
/// With `loose`, `τ` uses `g⁻¹(εp_j/6)` instead.
pub fn budget_for_observable<T: Real>(
    cf: &CoolingFunction<T>,
    epsilon: T,
    overlap: T,
    gap: T,
    k: T,
    loose: bool,
) -> Result<Budget<T>> {
    if !cf.is_realizable() {
        return Err(Error::NonRealizable { kind: cf.kind() });
    }
    in_unit("epsilon", epsilon)?;
    in_unit("overlap", overlap)?;
    positive("gap", gap)?;
    positive("K", k)?;
    let ep = epsilon * overlap;
    let tau_arg = if loose {
        ep / T::lit(6.0)
    } else {
        ep / T::lit(12.0)
    };
    let tau = cf.g_inverse(tau_arg)? / gap;
    let x_m = T::SQRT_2() * cf.cutoff(ep / T::lit(12.0))?;
    let n_m = shot_count(k / Float::powi(ep / T::lit(6.0), 2))?;
    Ok(assemble(
        cf,
        tau,
        x_m,
        n_m,
        k,
        Target::Observable {
            epsilon,
            overlap,
            gap,
        },
        loose,
    ))
}

/// Budget for eigenenergy estimation to precision `κ`, with `q = (1-g(1))p_j`:
/// `τ = g⁻¹(q/6)/κ`, `x_m = √2·L(q/6)`, `N_M = 9K/q²`.
/// With `loose`: `τ = 1/κ`, `x_m = √2·L(q/4)`, `N_M = 2K/(p_j²(1-g(1)))`.
pub fn budget_for_energy<T: Real>(
    cf: &CoolingFunction<T>,
    kappa: T,
    overlap: T,
    k: T,
    loose: bool,
) -> Result<Budget<T>> {
    if !cf.is_realizable() {
        return Err(Error::NonRealizable { kind: cf.kind() });
    }
    positive("kappa", kappa)?;
    in_unit("overlap", overlap)?;
    positive("K", k)?;
    let drop = T::one() - cf.g(T::one());
    let q = drop * overlap;
    let (tau, x_m, n_m) = if loose {
        (
            T::one() / kappa,
            T::SQRT_2() * cf.cutoff(q / T::lit(4.0))?,
            T::lit(2.0) * k / (overlap * overlap * drop),
        )
    } else {
        (
            cf.g_inverse(q / T::lit(6.0))? / kappa,
            T::SQRT_2() * cf.cutoff(q / T::lit(6.0))?,
            T::lit(9.0) * k / (q * q),
        )
    };
    Ok(assemble(
        cf,
        tau,
        x_m,
        shot_count(n_m)?,
        k,
        Target::Energy { kappa, overlap },
        loose,
    ))
}

/// Largest energy error `Δ/g⁻¹(εp_j/6)` tolerated before observable
/// guarantees degrade.
pub fn kappa_tolerance<T: Real>(
    cf: &CoolingFunction<T>,
    epsilon: T,
    overlap: T,
    gap: T,
) -> Result<T> {
    in_unit("epsilon", epsilon)?;
    in_unit("overlap", overlap)?;
    positive("gap", gap)?;
    Ok(gap / cf.g_inverse(epsilon * overlap / T::lit(6.0))?)
}

/// `g(τκ)^{-2}`: the factor by which observable errors grow when the energy
/// is off by `κ`.
pub fn inflation_factor<T: Real>(cf: &CoolingFunction<T>, tau: T, kappa: T) -> T {
    let g = cf.g(tau * kappa);
    T::one() / (g * g)
}

/// Error contributions of finite imaginary time, cutoff and shot count.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ErrorComponents<T> {
    pub tau: T,
    pub cutoff: T,
    pub sampling: T,
}

impl<T: Real> ErrorComponents<T> {
    pub fn total(&self) -> T {
        self.tau + self.cutoff + self.sampling
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ResourceErrors<T> {
    /// Normalization factor at `E = E_j`.
    pub d: ErrorComponents<T>,
    /// Imaginary-time error of the normalization factor anywhere within half
    /// a gap of `E_j`: `2g(τΔ/2)`.
    pub d_tau_window: T,
    /// Unnormalized expectation per unit observable norm.
    pub n: ErrorComponents<T>,
    pub overlap: T,
    pub delta: T,
}

impl<T: Real> ResourceErrors<T> {
    /// Bound on `|N̂/D̂ - <O>|` implied by the components, or `None` when the
    /// normalization error reaches the overlap.
    ///
    /// The imaginary-time part of the numerator scales with `‖O‖_∞`, the
    /// cutoff and sampling parts with `‖O‖₁`; `value_abs` bounds `|<O>|`.
    pub fn observable_bound(&self, one_norm: T, inf_norm: T, value_abs: T) -> Option<T> {
        let e_d = self.d.total();
        if !(e_d < self.overlap) {
            return None;
        }
        let e_n = inf_norm * self.n.tau + one_norm * (self.n.cutoff + self.n.sampling);
        Some((e_n + value_abs * e_d) / (self.overlap - e_d))
    }
}

/// Error components guaranteed by the given resources.
#[allow(clippy::too_many_arguments)]
pub fn error_from_resources<T: Real>(
    cf: &CoolingFunction<T>,
    tau: T,
    x_m: T,
    n_m: u64,
    k: T,
    overlap: T,
    gap: T,
) -> Result<ResourceErrors<T>> {
    if !cf.is_realizable() {
        return Err(Error::NonRealizable { kind: cf.kind() });
    }
    positive("tau", tau)?;
    positive("x_m", x_m)?;
    positive("K", k)?;
    in_unit("overlap", overlap)?;
    positive("gap", gap)?;
    if n_m == 0 {
        return Err(Error::InvalidArgument("N_M must be at least 1".into()));
    }
    let two = T::lit(2.0);
    let sampling = Float::sqrt(k / T::lit(n_m as f64));
    let d = ErrorComponents {
        tau: two * cf.g(tau * gap),
        cutoff: two * cf.tail_bound(x_m / T::SQRT_2())?,
        sampling,
    };
    let n = ErrorComponents {
        tau: two * cf.g(tau * gap),
        cutoff: two * cf.tail_bound(x_m)?,
        sampling,
    };
    Ok(ResourceErrors {
        d,
        d_tau_window: two * cf.g(tau * gap / two),
        n,
        overlap,
        delta: failure_probability(k),
    })
}
