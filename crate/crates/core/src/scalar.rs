//! Floating-point scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::Float;

/// Scalar type the tensor and geometry code is generic over.
///
/// `f64` is the working type of the whole training pipeline (gradient checks
/// at 1e-4 relative tolerance need the headroom); `f32` matches the on-disk
/// point format. Convert literals with `T::from(x).unwrap()`.
pub trait Scalar:
    Float
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}
