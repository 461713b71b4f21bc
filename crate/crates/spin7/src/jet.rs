//! Truncated Taylor jets `(X, X', X'', X''')` in one variable.
//!
//! A jet carries `len` valid entries. Arithmetic truncates to the shorter
//! operand, and differentiation drops the top entry, so derivatives that
//! were never supplied cannot leak into a result.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

pub const JET_SLOTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    d: [S; JET_SLOTS],
    len: usize,
}

/// Jet of a coefficient in the radial variable `t`.
pub type RadialJet<S> = Jet<S>;

fn binom(n: usize, k: usize) -> i64 {
    const T: [[i64; 4]; 4] = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]];
    T[n][k]
}

impl<S: Scalar> Jet<S> {
    /// Jet from its leading entries `[X, X', ...]` (at most four).
    pub fn new(entries: &[S]) -> Self {
        assert!(!entries.is_empty() && entries.len() <= JET_SLOTS, "jet needs 1..=4 entries");
        let mut d = [S::zero(), S::zero(), S::zero(), S::zero()];
        for (slot, e) in d.iter_mut().zip(entries) {
            *slot = e.clone();
        }
        Jet { d, len: entries.len() }
    }

    /// A constant: all derivatives are known to vanish.
    pub fn constant(v: S) -> Self {
        Jet { d: [v, S::zero(), S::zero(), S::zero()], len: JET_SLOTS }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(S::ratio(n, d))
    }

    pub fn zero() -> Self {
        Self::constant(S::zero())
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// The independent variable itself, evaluated at `v`.
    pub fn variable(v: S) -> Self {
        Jet { d: [v, S::one(), S::zero(), S::zero()], len: JET_SLOTS }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> &S {
        &self.d[0]
    }

    /// The `k`-th derivative; panics if it is not carried.
    pub fn deriv(&self, k: usize) -> &S {
        assert!(k < self.len, "jet carries {} entries, derivative {k} requested", self.len);
        &self.d[k]
    }

    pub fn get(&self, k: usize) -> Option<&S> {
        (k < self.len).then(|| &self.d[k])
    }

    pub fn entries(&self) -> &[S] {
        &self.d[..self.len]
    }

    pub fn truncate(&self, len: usize) -> Self {
        let mut out = self.clone();
        out.len = len.clamp(1, self.len);
        for k in out.len..JET_SLOTS {
            out.d[k] = S::zero();
        }
        out
    }

    /// d/dt of the jet; requires at least one derivative.
    pub fn derivative(&self) -> Self {
        assert!(self.len >= 2, "cannot differentiate a value-only jet");
        let mut d = [S::zero(), S::zero(), S::zero(), S::zero()];
        for k in 0..self.len - 1 {
            d[k] = self.d[k + 1].clone();
        }
        Jet { d, len: self.len - 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = self.clone();
        for k in 0..self.len {
            out.d[k] = out.d[k].clone() * s.clone();
        }
        out
    }

    pub fn recip(&self) -> Self {
        Self::one().truncate(self.len) / self.clone()
    }

    /// `φ(X)` given the derivatives `[φ, φ', φ'', φ''']` of `φ` at `X`
    /// (Faà di Bruno to third order). Also serves as the chain rule for
    /// reparametrisation: if `self` is `s(t)` and `phi` is the jet of `X(s)`
    /// in `s`, the result is the jet of `X(s(t))` in `t`.
    pub fn compose(&self, phi: &Jet<S>) -> Self {
        let n = self.len.min(phi.len);
        let f = &self.d;
        let p = &phi.d;
        let three = S::int(3);
        let mut d = [p[0].clone(), S::zero(), S::zero(), S::zero()];
        if n > 1 {
            d[1] = p[1].clone() * f[1].clone();
        }
        if n > 2 {
            d[2] = p[2].clone() * f[1].clone() * f[1].clone() + p[1].clone() * f[2].clone();
        }
        if n > 3 {
            d[3] = p[3].clone() * f[1].clone() * f[1].clone() * f[1].clone()
                + three * p[2].clone() * f[1].clone() * f[2].clone()
                + p[1].clone() * f[3].clone();
        }
        Jet { d, len: n }
    }

    /// Jet of the solution `s(t)` of `ds/dt = h(s)` through `s0`,
    /// given `h` as a jet in `s` evaluated at `s0`.
    pub fn integral_curve(s0: S, h: &Jet<S>) -> Self {
        let mut s = Jet::new(&[s0.clone()]);
        while s.len < (h.len + 1).min(JET_SLOTS) {
            let hd = s.compose(h);
            let mut entries = vec![s0.clone()];
            entries.extend_from_slice(hd.entries());
            s = Jet::new(&entries);
        }
        s
    }

    pub fn map_to_f64(&self) -> Jet<f64> {
        let e: Vec<f64> = self.entries().iter().map(|x| x.to_f64()).collect();
        Jet::new(&e)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Jet<f64> {
    fn unary(&self, p: [f64; 4]) -> Self {
        self.compose(&Jet::new(&p))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.d[0].sqrt();
        self.unary([s, 0.5 / s, -0.25 / (s * s * s), 0.375 / (s * s * s * s * s)])
    }

    pub fn powf(&self, e: f64) -> Self {
        let x = self.d[0];
        self.unary([
            x.powf(e),
            e * x.powf(e - 1.0),
            e * (e - 1.0) * x.powf(e - 2.0),
            e * (e - 1.0) * (e - 2.0) * x.powf(e - 3.0),
        ])
    }

    pub fn exp(&self) -> Self {
        let e = self.d[0].exp();
        self.unary([e, e, e, e])
    }

    pub fn ln(&self) -> Self {
        let x = self.d[0];
        self.unary([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn abs(&self) -> Self {
        if self.d[0] < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, o: Jet<S>) -> Jet<S> {
        let len = self.len.min(o.len);
        let mut out = self;
        for k in 0..len {
            out.d[k] = out.d[k].clone() + o.d[k].clone();
        }
        out.truncate(len)
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, o: Jet<S>) -> Jet<S> {
        self + (-o)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(mut self) -> Jet<S> {
        for k in 0..self.len {
            self.d[k] = -self.d[k].clone();
        }
        self
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, o: Jet<S>) -> Jet<S> {
        let len = self.len.min(o.len);
        let mut d = [S::zero(), S::zero(), S::zero(), S::zero()];
        for (k, slot) in d.iter_mut().enumerate().take(len) {
            let mut acc = S::zero();
            for j in 0..=k {
                acc = acc + S::int(binom(k, j)) * self.d[j].clone() * o.d[k - j].clone();
            }
            *slot = acc;
        }
        Jet { d, len }
    }
}

impl<S: Scalar> Div for Jet<S> {
    type Output = Jet<S>;
    fn div(self, o: Jet<S>) -> Jet<S> {
        let len = self.len.min(o.len);
        let g0 = o.d[0].clone();
        let mut h: [S; JET_SLOTS] = [S::zero(), S::zero(), S::zero(), S::zero()];
        for k in 0..len {
            let mut acc = self.d[k].clone();
            for j in 1..=k {
                acc = acc - S::int(binom(k, j)) * o.d[j].clone() * h[k - j].clone();
            }
            h[k] = acc / g0.clone();
        }
        Jet { d: h, len }
    }
}

macro_rules! by_ref {
    ($tr:ident, $m:ident) => {
        impl<'a, S: Scalar> $tr<&'a Jet<S>> for &'a Jet<S> {
            type Output = Jet<S>;
            fn $m(self, o: &'a Jet<S>) -> Jet<S> {
                self.clone().$m(o.clone())
            }
        }
    };
}
by_ref!(Add, add);
by_ref!(Sub, sub);
by_ref!(Mul, mul);
by_ref!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn product_rule_exact() {
        // t^2 * t^3 at t = 2
        let t = Jet::variable(q(2, 1));
        let p = t.clone() * t.clone() * t.clone() * t.clone() * t.clone();
        assert_eq!(p.entries(), &[q(32, 1), q(80, 1), q(160, 1), q(240, 1)]);
    }

    #[test]
    fn quotient_inverts_product() {
        let f = Jet::new(&[q(3, 1), q(-1, 2), q(5, 7), q(2, 9)]);
        let g = Jet::new(&[q(2, 1), q(1, 3), q(-4, 5), q(1, 1)]);
        assert_eq!((f.clone() * g.clone()) / g, f);
    }

    #[test]
    fn derivative_shifts_and_shortens() {
        let f = Jet::new(&[1.0, 2.0, 3.0]);
        let df = f.derivative();
        assert_eq!(df.entries(), &[2.0, 3.0]);
        assert_eq!((f + df).len(), 2);
    }

    #[test]
    fn sqrt_squares_back() {
        let f = Jet::new(&[2.0, 0.3, -1.1, 0.7]);
        let s = f.sqrt();
        let back = s.clone() * s;
        for (a, b) in back.entries().iter().zip(f.entries()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn integral_curve_of_exponential_growth() {
        // ds/dt = s through s0 = 1 gives s = e^t
        let h = Jet::variable(1.0);
        let s = Jet::integral_curve(1.0, &h);
        assert_eq!(s.entries(), &[1.0, 1.0, 1.0, 1.0]);
    }
}
