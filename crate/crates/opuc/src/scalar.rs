//! Scalar abstraction: the whole library is generic over the real type
//! backing its complex arithmetic (f32 or f64). Concrete f64 aliases live
//! at the crate root.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};

/// Real scalar type the library is generic over: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Convert an f64 literal (tolerances, constants) into this scalar.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number from f64 parts.
pub fn c<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Complex number from a real scalar.
pub fn cr<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// e^{i theta}.
pub fn unit<T: Scalar>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Reduce an angle to [0, 2*pi).
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let mut t = theta % tau;
    if t < T::zero() {
        t = t + tau;
    }
    // `%` can return exactly tau after the correction when theta is a tiny
    // negative number; clamp that back to zero.
    if t >= tau {
        t = t - tau;
    }
    t
}

/// Distance between two angles on the circle, in [0, pi].
pub fn angle_dist<T: Scalar>(a: T, b: T) -> T {
    let tau = T::TAU();
    let d = (wrap_angle(a) - wrap_angle(b)).abs();
    d.min(tau - d)
}
