//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex amplitude over the real scalar `T`.
pub type Amplitude<T> = Complex<T>;

/// Real floating-point scalar (f32 or f64) the simulator is generic over.
///
/// Tolerances are attached to the scalar so every module compares against the
/// same value: `TOLERANCE` is the shared equality / unitarity threshold and
/// `RENORMALIZE_LIMIT` is the largest norm drift a constructor will silently
/// repair before rejecting the input.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    const TOLERANCE: Self;
    const RENORMALIZE_LIMIT: Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Exact conversion for small integers (counts, indices).
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOLERANCE: Self = 1e-10;
    const RENORMALIZE_LIMIT: Self = 1e-6;
}

impl Real for f32 {
    const TOLERANCE: Self = 1e-5;
    const RENORMALIZE_LIMIT: Self = 1e-3;
}

/// `e^{i·theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Amplitude<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn amp<T: Real>(re: f64, im: f64) -> Amplitude<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Pairwise (cascade) summation over a slice in fixed index order.
///
/// The split points depend only on the length, so the result is bit-identical
/// for identical input regardless of how callers chunk their work.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = T::zero();
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Format `x` with `digits` significant digits, trailing zeros trimmed.
///
/// Used for the continued-fraction table and the CSV emitters so that the
/// same value always produces the same text.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".to_owned()
        } else {
            format!("{x}")
        };
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_owned();
    }
    s
}
