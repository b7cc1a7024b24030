//! Scalar abstraction: the numeric type the whole library is generic over.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable everywhere in this crate: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Error function, needed by the normal CDF inside the probit loss.
    fn erf(self) -> Self;

    /// Converts an `f64` constant into this scalar type.
    ///
    /// Panics only if the value is not representable, which cannot happen
    /// for the finite literals this crate feeds it.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    /// Standard normal CDF via the error function.
    fn normal_cdf(self) -> Self {
        let half = Self::of(0.5);
        let inv_sqrt2 = Self::of(std::f64::consts::FRAC_1_SQRT_2);
        half * (Self::one() + (self * inv_sqrt2).erf())
    }

    /// Standard normal PDF.
    fn normal_pdf(self) -> Self {
        let inv_sqrt_2pi = Self::of(1.0 / (2.0 * std::f64::consts::PI).sqrt());
        inv_sqrt_2pi * (-self * self * Self::of(0.5)).exp()
    }
}

impl Real for f64 {
    fn erf(self) -> Self {
        libm::erf(self)
    }
}

impl Real for f32 {
    fn erf(self) -> Self {
        libm::erff(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_matches_reference_points() {
        // Reference values from a 40-digit computation of Phi.
        assert!((0.0f64.normal_cdf() - 0.5).abs() < 1e-15);
        assert!((2.0f64.normal_cdf() - 0.977_249_868_051_820_8).abs() < 1e-12);
        assert!(((-2.0f64).normal_cdf() - 0.022_750_131_948_179_2).abs() < 1e-12);
    }

    #[test]
    fn normal_cdf_is_complementary() {
        for i in 0..200 {
            let z = -10.0 + 0.1 * i as f64;
            let s = z.normal_cdf() + (-z).normal_cdf();
            assert!((s - 1.0).abs() < 1e-14, "z={z}: sum={s}");
        }
    }

    #[test]
    fn f32_path_agrees_with_f64_loosely() {
        for z in [-3.0f32, -1.0, 0.0, 0.5, 2.5] {
            let a = z.normal_cdf() as f64;
            let b = (z as f64).normal_cdf();
            assert!((a - b).abs() < 1e-6);
        }
    }
}
