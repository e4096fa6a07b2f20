use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the pointwise math is generic over: f32 or f64.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an f64 constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cast_c<T: Scalar>(z: Complex<f64>) -> C<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

#[inline]
pub(crate) fn is_finite_c<T: Scalar>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Principal branch of the logarithm, `Arg` in `(-pi, pi]`.
///
/// A negative zero imaginary part on the negative real axis still maps to
/// `+pi`, unlike a bare `atan2`.
pub fn plog<T: Scalar>(z: C<T>) -> C<T> {
    let mut arg = z.im.atan2(z.re);
    if z.im == T::zero() && z.re < T::zero() {
        arg = T::PI();
    } else if arg <= -T::PI() {
        // just below the cut: keep the open end of (-pi, pi]
        arg = -T::PI() * (T::one() - T::epsilon());
    }
    Complex::new(z.norm().ln(), arg)
}
