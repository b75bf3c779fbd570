//! Simulation of algorithmic cooling with randomized Hadamard-test estimators.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases at the
//! bottom of this file fix the scalar to `f64`, which is what the experiment
//! driver uses.
//!
//! ```
//! use qcool::estimators::estimate_d;
//! use qcool::models::{basis_state, heisenberg};
//! use qcool::{CoolingFunctionF64, CoolingKind, EigenSystemF64, Mode};
//!
//! let h = heisenberg::<f64>(4, 1.0, 2.0, 0.0, true)?;
//! let es = EigenSystemF64::eigendecompose(&h, &basis_state("0101")?)?;
//! let cf = CoolingFunctionF64::new(CoolingKind::Gaussian);
//! let e0 = es.shifted_energies()[0];
//! let d = estimate_d(&es, cf, 1.5, 4.0, e0, 10_000, 42, Mode::Shot)?;
//! assert!((d.value - es.exact_d(&cf, 1.5, e0)).abs() < 4.0 * d.standard_error);
//! # Ok::<(), qcool::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod cooling;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod models;
pub mod observable;
pub mod pauli;
pub mod quadrature;
pub mod scalar;
pub mod shots;
pub mod special;
pub mod validation;

pub use budget::{Budget, Target};
pub use cooling::{CoolingFunction, CoolingKind};
pub use engine::{EigenSystem, StateVector};
pub use error::{Error, Result};
pub use estimators::{DenominatorRoute, EstimateResult, Peak, SpectrumCurve};
pub use models::ModelSpec;
pub use observable::{Observable, Term};
pub use pauli::{Pauli, PauliString, PauliSum};
pub use scalar::Real;
pub use shots::{Mode, ShotBatch};

pub type CoolingFunctionF64 = CoolingFunction<f64>;
pub type EigenSystemF64 = EigenSystem<f64>;
pub type StateVectorF64 = StateVector<f64>;
pub type PauliSumF64 = PauliSum<f64>;
pub type ObservableF64 = Observable<f64>;
pub type SpectrumCurveF64 = SpectrumCurve<f64>;
pub type EstimateResultF64 = EstimateResult<f64>;
pub type BudgetF64 = Budget<f64>;
