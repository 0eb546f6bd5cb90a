//! Precision-generic scalars and the small numerical kernels used by the
//! solvers.

mod dd;
mod fit;
mod linalg;

pub use dd::{Dd, ParseDdError};
pub use fit::{linear_fit, neville_at_zero, LineFit};
pub use linalg::{
    eigen2, solve_cyclic_tridiagonal, solve_cyclic_tridiagonal_inertia, solve_tridiagonal,
    solve_tridiagonal_inertia, tridiagonal_min_eigenvalue, CyclicTridiagonal, Eigen2, Mat2,
};

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Working precision selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected double|extended)")),
        }
    }
}

/// Real scalar at a fixed working precision.
///
/// Implemented for `f64` and [`Dd`]. All solver tolerances are expressed as
/// multiples of [`Real::EPSILON`].
pub trait Real:
    Copy
    + Debug
    + Display
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + Default
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    /// Machine epsilon of the representation.
    const EPSILON: f64;
    /// Significant decimal digits printed for full-precision output.
    const DIGITS: usize;
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn from_dd(x: Dd) -> Self;
    fn to_f64(self) -> f64;
    fn to_dd(self) -> Dd;

    fn sqrt(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn floor(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn pi() -> Self {
        Self::from_dd(Dd::PI)
    }
    fn two_pi() -> Self {
        Self::from_dd(Dd::PI * 2.0)
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
    fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }
    fn sqr(self) -> Self {
        self * self
    }
    fn hypot(self, o: Self) -> Self {
        (self * self + o * o).sqrt()
    }
    /// Full-precision scientific representation.
    fn to_full_string(self) -> String;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
    const DIGITS: usize = 17;
    const PRECISION: Precision = Precision::Double;

    #[inline]
    fn from_f64(x: f64) -> f64 {
        x
    }
    #[inline]
    fn from_dd(x: Dd) -> f64 {
        x.to_f64()
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn to_dd(self) -> Dd {
        Dd::from_f64(self)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    #[inline]
    fn sin_cos(self) -> (f64, f64) {
        f64::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: f64) -> f64 {
        f64::atan2(self, x)
    }
    #[inline]
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    #[inline]
    fn floor(self) -> f64 {
        f64::floor(self)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn hypot(self, o: f64) -> f64 {
        f64::hypot(self, o)
    }
    fn to_full_string(self) -> String {
        format!("{:.16e}", self)
    }
}

impl Real for Dd {
    const EPSILON: f64 = Dd::EPSILON;
    const DIGITS: usize = 32;
    const PRECISION: Precision = Precision::Extended;

    #[inline]
    fn from_f64(x: f64) -> Dd {
        Dd::from_f64(x)
    }
    #[inline]
    fn from_dd(x: Dd) -> Dd {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    #[inline]
    fn to_dd(self) -> Dd {
        self
    }
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
    fn sin_cos(self) -> (Dd, Dd) {
        Dd::sin_cos(self)
    }
    fn atan2(self, x: Dd) -> Dd {
        Dd::atan2(self, x)
    }
    fn ln(self) -> Dd {
        Dd::ln(self)
    }
    fn exp(self) -> Dd {
        Dd::exp(self)
    }
    fn floor(self) -> Dd {
        Dd::floor(self)
    }
    fn abs(self) -> Dd {
        Dd::abs(self)
    }
    fn sqr(self) -> Dd {
        Dd::sqr(self)
    }
    fn to_full_string(self) -> String {
        self.to_sci_string(32)
    }
}

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
