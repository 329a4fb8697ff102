use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used by the state-vector, code and channel layers.
///
/// Implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot hold it,
    /// which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Probability below which a syndrome branch is treated as impossible.
    #[inline]
    fn branch_cutoff() -> Self {
        Self::lit(1e-15).max(Self::lit(1e4) * Self::epsilon() * Self::epsilon())
    }

    /// Absolute tolerance for "this state is still in the codespace" checks.
    #[inline]
    fn codespace_tolerance() -> Self {
        Self::lit(1e-9).max(Self::lit(1e4) * Self::epsilon())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle<T: Real>(angle: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut a = angle % two_pi;
    if a <= -T::PI() {
        a += two_pi;
    } else if a > T::PI() {
        a -= two_pi;
    }
    a
}
