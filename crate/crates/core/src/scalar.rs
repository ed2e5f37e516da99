//! Scalar abstraction for edge weights and weight-derived quantities.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as an edge weight: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used when parsing and when mixing in constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 fits in scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Conversion from a count.
    fn of_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Relative closeness with an absolute floor for values near zero.
pub(crate) fn close<T: Scalar>(a: T, b: T, rel: f64) -> bool {
    let (a, b) = (a.as_f64(), b.as_f64());
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
