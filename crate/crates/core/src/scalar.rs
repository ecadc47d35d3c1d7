use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the models are evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 literal fits every Scalar")
    }

    fn from_count(count: u32) -> Self {
        Self::from_u32(count).expect("u32 fits every Scalar")
    }

    /// Lossy view as `f64`, for error messages and text output.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// `true` when `x` and `y` agree within `rel` relative to the larger magnitude.
pub(crate) fn approx_eq<T: Scalar>(x: T, y: T, rel: T) -> bool {
    let scale = x.abs().max(y.abs()).max(T::min_positive_value());
    (x - y).abs() <= rel * scale
}
