//! Scalar abstraction: all core math is generic over the real field.

use nalgebra::RealField;
use num_complex::Complex;

/// Real scalar the whole crate is generic over (`f32`, `f64`, ...).
pub trait Real: RealField + Copy {
    fn from_f64(x: f64) -> Self {
        nalgebra::convert(x)
    }

    fn to_f64(self) -> f64 {
        nalgebra::try_convert(self).expect("real scalar converts to f64")
    }
}

impl<T: RealField + Copy> Real for T {}

/// Shorthand for lifting an `f64` constant into the working scalar type.
#[inline]
pub fn r<T: Real>(x: f64) -> T {
    <T as Real>::from_f64(x)
}

/// Complex exponential built from real-field primitives.
#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = z.re.exp();
    Complex::new(m * z.im.cos(), m * z.im.sin())
}

/// Modulus of a complex number without requiring `num_traits::Float`.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}
