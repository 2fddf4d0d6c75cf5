//! Floating-point scalar abstraction for the Tate-curve numerics.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar used for complex-analytic computations on `C*/<tau>`.
///
/// Implemented for `f32` and `f64`. All exact bookkeeping (Chern classes,
/// discriminants, lattice forms) is done over the integers and rationals
/// and does not go through this trait.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only if the target cannot represent finite values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Default comparison radius for this precision.
    fn default_eps() -> Self {
        let floor = Self::lit(1e-9);
        let scaled = Self::epsilon() * Self::lit(1000.0);
        if scaled > floor {
            scaled
        } else {
            floor
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
