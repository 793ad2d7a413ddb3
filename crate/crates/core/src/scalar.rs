//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign, NumCast};

/// Real floating point type the calculus is generic over (`f32` or `f64`).
pub trait Real: Float + FloatConst + NumAssign + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` constant into this scalar type.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("constant representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `S`.
pub type Cplx<S> = Complex<S>;

#[allow(dead_code)]
pub(crate) fn c<S: Real>(re: f64, im: f64) -> Cplx<S> {
    Complex::new(S::lit(re), S::lit(im))
}

pub(crate) fn imag_unit<S: Real>() -> Cplx<S> {
    Complex::new(S::zero(), S::one())
}
