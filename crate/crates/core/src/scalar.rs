//! Scalar abstraction: every numeric kernel is generic over `Real`, and the
//! FFT-backed solvers over `Scalar`. Only `f32` and `f64` implement these.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar for the numeric kernels.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into the scalar type. Panics only if the type
    /// cannot represent ordinary literals, which neither impl does.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("float literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Scalar usable with the FFT-backed spectral solvers.
pub trait Scalar: Real + rustfft::FftNum {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for lifting literals inside generic code.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
