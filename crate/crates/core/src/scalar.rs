use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

/// Floating-point type the numerical core is generic over.
///
/// Random draws are routed through the trait so generic code does not have
/// to carry `rand_distr` bounds around.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative generalized-eigen residual accepted by the modal solver.
    fn eigen_residual_tolerance() -> Self;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from `Ga(shape, rate)` (rate parameterization).
    fn gamma<R: Rng + ?Sized>(shape: Self, rate: Self, rng: &mut R) -> Self;

    /// Uniform draw on the open interval (0, 1).
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn eigen_residual_tolerance() -> Self {
                $tol
            }

            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            fn gamma<R: Rng + ?Sized>(shape: Self, rate: Self, rng: &mut R) -> Self {
                Gamma::new(shape, 1.0 / rate)
                    .expect("gamma parameters must be positive and finite")
                    .sample(rng)
            }

            fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rand_distr::Open01.sample(rng)
            }
        }
    };
}

impl_scalar!(f64, 1e-8);
impl_scalar!(f32, 5e-2);

/// Lossless-enough literal conversion for constants in generic code.
#[inline]
pub fn lit<T: Scalar>(v: f64) -> T {
    <T as FromPrimitive>::from_f64(v).expect("finite literal")
}

#[inline]
pub fn to_f64<T: Scalar>(v: T) -> f64 {
    ToPrimitive::to_f64(&v).unwrap_or(f64::NAN)
}

#[inline]
pub fn from_usize<T: Scalar>(v: usize) -> T {
    <T as FromPrimitive>::from_usize(v).expect("count fits in scalar")
}
