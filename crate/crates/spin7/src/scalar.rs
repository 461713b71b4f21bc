//! Scalar abstraction shared by the floating and exact-rational code paths.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Coefficient field: `f64` for numerics, [`BigRational`] for algebraic identities.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static {
    fn ratio(n: i64, d: i64) -> Self;

    fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    fn to_f64(&self) -> f64;

    /// Nearest representable value (exact for `BigRational`: the binary value of `x`).
    fn from_f64(x: f64) -> Self;

    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value")
    }

    fn is_exact() -> bool {
        true
    }
}

/// `x^(p/q)` when the result is rational, `None` otherwise.
pub fn rational_pow(x: &BigRational, p: i32, q: u32) -> Option<BigRational> {
    if q == 0 {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        if n.is_negative() && q % 2 == 0 {
            return None;
        }
        let r = n.abs().nth_root(q);
        let r = if n.is_negative() { -r } else { r };
        if num_traits::pow(r.clone(), q as usize) == *n {
            Some(r)
        } else {
            None
        }
    };
    let base = BigRational::new(root(x.numer())?, root(x.denom())?);
    if p >= 0 {
        Some(num_traits::pow(base, p as usize))
    } else if base.is_zero() {
        None
    } else {
        Some(num_traits::pow(base.recip(), (-p) as usize))
    }
}
