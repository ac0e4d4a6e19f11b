//! Scalar abstraction: the numeric kernel is generic over the floating-point
//! type; `f32` and `f64` are the supported instantiations. Concrete `f64`
//! aliases for every public type live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating-point scalar usable throughout the engine.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + Sum<Self>
    + Debug
    + Display
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from `f64` for constants and parsed input.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every supported scalar")
    }

    /// Conversion from a count.
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to every supported scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated summation. Deterministic for a fixed iteration order
/// and accurate enough that 44k-element reductions reproduce across platforms.
pub fn compensated_sum<S: Scalar, I: IntoIterator<Item = S>>(values: I) -> S {
    let mut sum = S::zero();
    let mut compensation = S::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}
