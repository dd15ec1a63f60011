//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::Debug;

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the solvers (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Machine epsilon of the type, widened to `f64`.
    const EPS: f64;

    /// Converts an `f64` constant into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A tolerance of `x`, floored at a small multiple of machine epsilon.
    ///
    /// Keeps absolute tolerances tuned for `f64` meaningful for `f32`.
    fn tol(x: f64) -> Self {
        Self::lit(x.max(Self::EPS * 1e3))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON;
}

impl Real for f32 {
    const EPS: f64 = f32::EPSILON as f64;
}

/// Dense complex matrix over the real scalar `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}
