use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps};

/// Scalar types the numeric core is generic over (f32, f64).
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough constant conversion; panics only on NaN literals,
    /// which never appear in this codebase.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + NumAssignOps + Sum + Debug + Display + Send + Sync + 'static
{
}
