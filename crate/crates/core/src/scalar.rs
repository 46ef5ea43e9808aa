//! Scalar abstractions.
//!
//! Graph analytics only need field arithmetic and an ordering, so they run on
//! [`Scalar`], which covers `f32`, `f64` and exact rationals. The continuous
//! models need transcendental functions and are written against [`Real`].

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Ordered field element used by the mass-flow graph code.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute value.
    fn magnitude(&self) -> Self;

    /// True when `value` cannot be told apart from zero at the given scale.
    /// Exact types answer `value == 0`.
    fn is_negligible(value: &Self, scale: &Self) -> bool;

    /// Converts an `f64` literal. Panics on NaN, which never appears in literals.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }

    /// Lossy conversion used for reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty, $rel:expr) => {
        impl Scalar for $f {
            fn magnitude(&self) -> Self {
                Float::abs(*self)
            }

            fn is_negligible(value: &Self, scale: &Self) -> bool {
                Float::abs(*value) <= $rel * Float::abs(*scale)
            }
        }

        impl Real for $f {}
    };
}

impl_float_scalar!(f32, 1e-5);
impl_float_scalar!(f64, 1e-12);

impl Scalar for BigRational {
    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }

    fn is_negligible(value: &Self, _scale: &Self) -> bool {
        value.is_zero()
    }
}

/// Floating-point scalar for the dynamical models, controllers and integrator.
pub trait Real: Scalar + Float + Display {}

/// Exact rational built from an integer ratio.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
