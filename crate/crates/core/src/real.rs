//! Scalar abstraction shared by every numerical routine.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal, panicking only for types that cannot hold it.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Widens to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = num_complex::Complex<T>;

/// Shorthand for [`Real::lit`].
#[inline]
pub(crate) fn r<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Reduces `x` into `[0, period)`.
pub fn wrap_positive<T: Real>(x: T, period: T) -> T {
    let y = x % period;
    let y = if y < T::zero() { y + period } else { y };
    if y >= period {
        y - period
    } else {
        y
    }
}

/// Reduces an angle into `[-π, π)`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    wrap_positive(x + T::PI(), two_pi) - T::PI()
}

/// `cos(√s)` continued to `s < 0` as `cosh(√-s)`.
pub fn cos_sqrt<T: Real>(s: T) -> T {
    if s >= T::zero() {
        s.sqrt().cos()
    } else {
        (-s).sqrt().cosh()
    }
}

/// `sin(√s)/√s` continued to `s < 0` as `sinh(√-s)/√-s`, with the series near zero.
pub fn sinc_sqrt<T: Real>(s: T) -> T {
    if s.abs() < r(1e-4) {
        T::one() - s / r(6.0) + s * s / r(120.0) - s * s * s / r(5040.0)
    } else if s > T::zero() {
        let x = s.sqrt();
        x.sin() / x
    } else {
        let y = (-s).sqrt();
        y.sinh() / y
    }
}

/// Derivative of [`sinc_sqrt`] with respect to `s`.
pub fn dsinc_sqrt<T: Real>(s: T) -> T {
    if s.abs() < r(1e-3) {
        r::<T>(-1.0 / 6.0) + s / r(60.0) - s * s / r(1680.0) + s * s * s / r(90720.0)
    } else {
        (cos_sqrt(s) - sinc_sqrt(s)) / (s + s)
    }
}

/// Complex `sin z / z` with the series near zero.
pub fn csinc<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.norm() < r(1e-4) {
        let z2 = z * z;
        Cx::new(T::one(), T::zero()) - z2 / r::<T>(6.0) + z2 * z2 / r::<T>(120.0) - z2 * z2 * z2 / r::<T>(5040.0)
    } else {
        z.sin() / z
    }
}

/// Formats with 17 significant digits, independent of locale.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
