//! Floating point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// f32 or f64.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from f64 literals and constants.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Reduce an angle to `[0, 2π)`.
    fn wrap_angle(self) -> Self {
        let tau = Self::TAU();
        let r = self % tau;
        let r = if r < Self::zero() { r + tau } else { r };
        // r + tau can round up to tau itself
        if r >= tau {
            Self::zero()
        } else {
            r
        }
    }

    /// Reduce an angle difference to `[-π, π)`.
    fn wrap_signed(self) -> Self {
        let pi = Self::PI();
        (self + pi).wrap_angle() - pi
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_angle_range() {
        assert_eq!((2.0 * PI).wrap_angle(), 0.0);
        assert!(((-0.5f64).wrap_angle() - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert!((7.0f64.wrap_angle() - (7.0 - 2.0 * PI)).abs() < 1e-15);
        let tiny = -1e-20f64;
        let w = tiny.wrap_angle();
        assert!((0.0..2.0 * PI).contains(&w));
    }

    #[test]
    fn wrap_signed_range() {
        assert!((3.5f64.wrap_signed() - (3.5 - 2.0 * PI)).abs() < 1e-15);
        assert_eq!(0.25f64.wrap_signed(), 0.25);
        assert!(((-PI).wrap_signed() + PI).abs() < 1e-15);
    }
}
