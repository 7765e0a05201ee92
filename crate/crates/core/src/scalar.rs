//! Scalar abstractions.
//!
//! Floating-point code is written against [`Real`] so that every numeric
//! routine runs in `f32` or `f64`. Exhaustive combinatorial computations only
//! need ring operations plus division and are written against [`Weight`], which
//! is also implemented by exact rationals such as [`num_rational::BigRational`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Floating-point scalar used by the numeric modules.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for non-representable input,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in a float")
    }

    #[inline]
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer fits in a float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `base`, floored at a small multiple of machine epsilon so that
    /// tolerances pinned for `f64` stay meaningful in `f32`.
    #[inline]
    fn tolerance(base: f64) -> Self {
        Self::lit(base).max(Self::epsilon() * Self::lit(512.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ring-with-division scalar for exhaustive enumerations.
pub trait Weight: Num + Clone + Debug {}

impl<W: Num + Clone + Debug> Weight for W {}

/// Gamma function evaluated in double precision.
pub fn gamma<T: Real>(x: T) -> T {
    T::lit(statrs::function::gamma::gamma(x.as_f64()))
}

/// Natural log of |Γ(x)| for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> T {
    T::lit(statrs::function::gamma::ln_gamma(x.as_f64()))
}

pub fn erf<T: Real>(x: T) -> T {
    T::lit(statrs::function::erf::erf(x.as_f64()))
}

/// Truncated power-series product `a * b mod u^len`.
pub(crate) fn series_mul<T: Real>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == T::zero() {
            continue;
        }
        let span = (len - i).min(b.len());
        axpy(&mut out[i..i + span], ai, &b[..span]);
    }
    out
}

/// Dot product with eight independent accumulators (vectorizes without
/// reassociating a single running sum).
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let len = a.len().min(b.len());
    let (a, b) = (&a[..len], &b[..len]);
    let mut acc = [T::zero(); 8];
    let chunks = len / 8;
    for c in 0..chunks {
        let xa = &a[8 * c..8 * c + 8];
        let xb = &b[8 * c..8 * c + 8];
        for l in 0..8 {
            acc[l] += xa[l] * xb[l];
        }
    }
    let mut tail = T::zero();
    for i in 8 * chunks..len {
        tail += a[i] * b[i];
    }
    acc.iter().copied().sum::<T>() + tail
}

/// `y += alpha * x`.
#[inline]
pub(crate) fn axpy<T: Real>(y: &mut [T], alpha: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Truncated power `base^exp mod u^len` by repeated squaring.
pub(crate) fn series_pow<T: Real>(base: &[T], mut exp: usize, len: usize) -> Vec<T> {
    let mut result = vec![T::zero(); len];
    if len == 0 {
        return result;
    }
    result[0] = T::one();
    let mut sq: Vec<T> = base.iter().copied().take(len).collect();
    let mut first = true;
    while exp > 0 {
        if exp & 1 == 1 {
            result = if first {
                first = false;
                sq.clone()
            } else {
                series_mul(&result, &sq, len)
            };
        }
        exp >>= 1;
        if exp > 0 {
            sq = series_mul(&sq, &sq, len);
        }
    }
    result.resize(len, T::zero());
    result
}
