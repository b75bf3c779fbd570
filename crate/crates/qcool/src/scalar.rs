//! Floating-point scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type used throughout the crate (`f32` or `f64`).
///
/// Methods are called through `Float::` paths because nalgebra's `RealField`
/// is deliberately not a supertrait: both define `max`, `abs`, `sin`, ...,
/// and mixing them makes every call site ambiguous. The one place that needs
/// nalgebra's generic linear algebra, the Hermitian eigensolver, is routed
/// through [`Real::hermitian_eigen`] and implemented per concrete type.
pub trait Real:
    Float
    + NumAssign
    + FloatConst
    + FromPrimitive
    + nalgebra::Scalar
    + Default
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending,
    /// eigenvectors as matching columns.
    fn hermitian_eigen(m: DMatrix<Complex<Self>>) -> (Vec<Self>, DMatrix<Complex<Self>>);

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal fits the scalar type")
    }

    /// Widens to `f64` for reporting and for the f64-only numerical helpers.
    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("finite scalar converts to f64")
    }

    /// Tolerance that is `tol` for `f64` but never tighter than a few thousand
    /// ulps of the actual type.
    #[inline]
    fn tolerance(tol: f64) -> Self {
        Float::max(Self::lit(tol), Self::epsilon() * Self::lit(4096.0))
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn hermitian_eigen(m: DMatrix<Complex<$t>>) -> (Vec<$t>, DMatrix<Complex<$t>>) {
                let n = m.nrows();
                let eig = m.symmetric_eigen();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
                let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
                (values, vectors)
            }
        }
    };
}

impl_real!(f64);
impl_real!(f32);

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = Float::sin_cos(theta);
    Complex::new(c, s)
}

/// Squared modulus of a complex number.
#[inline]
pub fn norm_sqr<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_ascending_for_both_widths() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0f64, 0.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.0, 1.0),
                Complex::new(1.0, 0.0),
            ],
        );
        let (vals, vecs) = f64::hermitian_eigen(m.clone());
        assert!((vals[0] - 0.0).abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12);
        let v0 = vecs.column(0);
        let mv = &m * v0;
        assert!((mv.norm()) < 1e-12);

        let m32 = m.map(|z| Complex::new(z.re as f32, z.im as f32));
        let (v32, _) = f32::hermitian_eigen(m32);
        assert!(v32[0] < v32[1]);
    }

    #[test]
    fn tolerance_floor_depends_on_width() {
        assert_eq!(f64::tolerance(1e-10), 1e-10);
        assert!(f32::tolerance(1e-10) > 1e-5);
    }
}
