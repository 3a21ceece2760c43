//! Floating-point scalar abstraction used throughout the numeric core.
//!
//! Everything downstream (seminorms, growth-constant scans, series sums) is
//! written against [`Scalar`] so the whole stack can run at `f32` or `f64`.
//! The crate root exports `f64` aliases for the common types; `f64` is the
//! precision at which the documented error bounds are meaningful.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Bound for the scalar type of all numeric structures in this crate.
///
/// `neg_infinity()` doubles as the log-domain sentinel for zero; code that
/// manipulates logarithms must keep it well-defined under the operations in
/// [`crate::logdomain`].
pub trait Scalar:
    'static
    + Send
    + Sync
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
{
    /// Embeds an `f64` constant (rounding for `f32`; nan-preserving).
    fn of(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    /// Embeds an unsigned index (exact for the index ranges probed here when
    /// `Self = f64`; rounded for `f32`).
    fn of_u64(v: u64) -> Self {
        Self::from_u64(v).unwrap_or_else(|| Self::of(v as f64))
    }

    /// Embeds a `u32` exactly.
    fn of_u32(v: u32) -> Self {
        Self::of_u64(u64::from(v))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_are_exact_for_f64() {
        assert_eq!(f64::of(0.25), 0.25);
        assert_eq!(f64::of_u64(100_000), 100_000.0);
        assert_eq!(f32::of(1.5), 1.5f32);
    }

    #[test]
    fn neg_infinity_is_available_as_sentinel() {
        let z = f64::neg_infinity();
        assert!(z.is_infinite() && z < 0.0);
        assert_eq!(z.exp(), 0.0);
    }
}
