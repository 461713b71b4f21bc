//! Gauss hypergeometric function for real arguments `x ≤ 1`.

use num_traits::{Float, FloatConst};
use statrs::function::gamma::gamma;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 0.5;

fn series(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..2000 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn is_nonpositive_int(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `₂F₁(a, b; c; x)`.
///
/// Direct series for `|x| ≤ ½`, Pfaff's transformation for `x < 0` and the
/// `1 − x` connection formula for `½ < x ≤ 1` (which requires `c − a − b`
/// non-integer, true for all parameter sets used here).
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if is_nonpositive_int(c) {
        return Err(Error::Domain(format!("c = {c} is a non-positive integer")));
    }
    if !x.is_finite() || x > 1.0 {
        return Err(Error::Domain(format!("x = {x} outside (−∞, 1]")));
    }
    if x.abs() <= SERIES_CUTOFF {
        return Ok(series(a, b, c, x));
    }
    if x < 0.0 {
        let w = x / (x - 1.0);
        return Ok((1.0 - x).powf(-a) * hyp2f1(a, c - b, c, w)?);
    }
    let s = c - a - b;
    if s == s.round() {
        return Err(Error::Domain(format!("c − a − b = {s} is an integer; connection formula degenerates")));
    }
    if x == 1.0 {
        if s <= 0.0 {
            return Err(Error::Domain("series diverges at x = 1".into()));
        }
        return Ok(gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b)));
    }
    hyp2f1_complement(a, b, c, 1.0 - x)
}

/// `₂F₁(a, b; c; 1 − w)` for `0 < w ≤ ½`, taking the complement `w` directly
/// so that it is not rounded away when `x` is close to 1.
pub fn hyp2f1_complement(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let s = c - a - b;
    if s == s.round() || is_nonpositive_int(c) {
        return Err(Error::Domain(format!("c − a − b = {s} is an integer; connection formula degenerates")));
    }
    if !(w > 0.0 && w <= SERIES_CUTOFF) {
        return if w == 0.0 { hyp2f1(a, b, c, 1.0) } else { hyp2f1(a, b, c, 1.0 - w) };
    }
    let g1 = gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b));
    let g2 = gamma(c) * gamma(-s) / (gamma(a) * gamma(b));
    Ok(g1 * series(a, b, 1.0 - s, w) + w.powf(s) * g2 * series(c - a, c - b, 1.0 + s, w))
}

/// `d/dx ₂F₁(a, b; c; x) = (ab/c) ₂F₁(a+1, b+1; c+1; x)`.
pub fn hyp2f1_deriv(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    Ok(a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, x)?)
}

/// `κ̄ = 2√π Γ(5/4)/Γ(3/4) = ₂F₁(½, ¾; 3/2; 1)`.
pub fn kappa_bar() -> f64 {
    2.0 * std::f64::consts::PI.sqrt() * gamma(1.25) / gamma(0.75)
}

/// Float types the two in-scope hypergeometric functions are evaluated in:
/// `f64`, and double-double for difference quotients below `f64` roundoff.
pub trait Real: Float + FloatConst + std::fmt::Debug {
    fn gamma_quarter() -> Self;

    fn lit(x: f64) -> Self {
        Self::from(x).expect("f64 literal")
    }

    /// Relative size at which a series term is dropped.
    fn tol() -> Self {
        Self::epsilon()
    }

    /// Quotient correctly rounded to the working precision.
    fn quot(self, d: Self) -> Self {
        self / d
    }
}

impl Real for f64 {
    fn gamma_quarter() -> f64 {
        3.625_609_908_221_908
    }
}

impl Real for TwoFloat {
    fn gamma_quarter() -> TwoFloat {
        TwoFloat::new_add(3.625_609_908_221_908, 1.055_590_764_708_640_8e-16)
    }

    fn tol() -> TwoFloat {
        TwoFloat::from(1e-32)
    }

    // twofloat's division is only accurate to about one f64 ulp; one Newton
    // step restores the full width
    fn quot(self, d: TwoFloat) -> TwoFloat {
        let q = self / d;
        q + (self - q * d) / d
    }
}

fn series_r<R: Real>(a: R, b: R, c: R, x: R) -> R {
    let mut term = R::one();
    let mut sum = R::one();
    let mut n = R::zero();
    for _ in 0..4000 {
        term = (term * (a + n) * (b + n) * x).quot((c + n) * (n + R::one()));
        sum = sum + term;
        n = n + R::one();
        if term.abs() <= R::tol() * R::lit(0.1) * sum.abs() {
            break;
        }
    }
    sum
}

fn quarter_root<R: Real>(x: R) -> R {
    x.sqrt().sqrt()
}

/// `₂F₁(1, ½; 5/4; x)` for `x < 1`, or `₂F₁(…; 1 − w)` when given the
/// complement `w = 1 − x` directly (`complement = true`).
pub fn f_half_quarter<R: Real>(arg: R, complement: bool) -> Result<R> {
    let (one, half) = (R::one(), R::lit(0.5));
    let (x, w) = if complement { (one - arg, arg) } else { (arg, one - arg) };
    if !(w > R::zero()) {
        return Err(Error::Domain(format!("x = {:?} outside (−∞, 1)", x)));
    }
    let g = R::gamma_quarter();
    if x.abs() <= half {
        return Ok(series_r(one, half, R::lit(1.25), x));
    }
    if x > R::zero() {
        // connection to 1 − x with c − a − b = −¼; F(¼, ¾; ¾; w) = (1 − w)^{−¼}
        let g2 = (g * g).quot(R::lit(4.0) * R::PI().sqrt());
        return Ok(-series_r(one, half, R::lit(1.25), w) + g2.quot(quarter_root(w) * quarter_root(x)));
    }
    // Pfaff: (1 − x)⁻¹ F(1, ¾; 5/4; x/(x − 1))
    let u = x.quot(x - one);
    let inner = if u <= half {
        series_r(one, R::lit(0.75), R::lit(1.25), u)
    } else {
        // c − a − b = −½; F(¼, ½; ½; 1 − u) = u^{−¼}
        let v = one.quot(w);
        let g2 = (g * g).quot(R::lit(4.0) * (R::lit(2.0) * R::PI()).sqrt());
        -half * series_r(one, R::lit(0.75), R::lit(1.5), v) + g2.quot(v.sqrt() * quarter_root(u))
    };
    Ok(inner.quot(w))
}

/// `₂F₁(½, ¾; 3/2; x)` for `0 ≤ x < 1` (or via the complement as above).
pub fn f_half_three_quarter<R: Real>(arg: R, complement: bool) -> Result<R> {
    let (one, half) = (R::one(), R::lit(0.5));
    let (x, w) = if complement { (one - arg, arg) } else { (arg, one - arg) };
    if !(w > R::zero()) || x < R::zero() {
        return Err(Error::Domain(format!("x = {:?} outside [0, 1)", x)));
    }
    if x <= half {
        return Ok(series_r(half, R::lit(0.75), R::lit(1.5), x));
    }
    // c − a − b = ¼; F(½, ¾; ¾; w) = x^{−½}
    let g = R::gamma_quarter();
    let g1 = (g * g).quot(R::lit(2.0) * (R::lit(2.0) * R::PI()).sqrt());
    Ok(g1.quot(x.sqrt()) - R::lit(2.0) * quarter_root(w) * series_r(one, R::lit(0.75), R::lit(1.25), w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate, OdeOptions, StepControl};

    /// Euler integral `Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1}(1−t)^{c−b−1}(1−xt)^{−a} dt`
    /// by tanh–sinh quadrature (handles the endpoint singularities).
    fn euler_oracle(a: f64, b: f64, c: f64, x: f64) -> f64 {
        let h = 1.0 / 64.0;
        let mut sum = 0.0;
        for k in -400..=400 {
            let s = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * s.sinh();
            let e = (-2.0 * u.abs()).exp();
            // t and 1 − t without cancellation
            let (small, large) = (e / (1.0 + e), 1.0 / (1.0 + e));
            let (t, omt) = if u >= 0.0 { (large, small) } else { (small, large) };
            let w = std::f64::consts::FRAC_PI_2 * s.cosh() * 2.0 * e / ((1.0 + e) * (1.0 + e));
            if t <= 0.0 || omt <= 0.0 {
                continue;
            }
            sum += w * t.powf(b - 1.0) * omt.powf(c - b - 1.0) * (1.0 - x * t).powf(-a);
        }
        gamma(c) / (gamma(b) * gamma(c - b)) * sum * h
    }

    /// Integrate the hypergeometric ODE `x(1−x)F″ + (c − (a+b+1)x)F′ − abF = 0` from 0.
    fn ode_oracle(a: f64, b: f64, c: f64, x: f64) -> f64 {
        // start slightly off 0 with a short series to avoid the regular singular point
        let x0 = 1e-3 * x.signum();
        let f0 = series(a, b, c, x0);
        let df0 = a * b / c * series(a + 1.0, b + 1.0, c + 1.0, x0);
        let opts = OdeOptions { rtol: 1e-13, atol: 1e-15, ..OdeOptions::default() };
        let sol = integrate(
            |t, y, dy| {
                dy[0] = y[1];
                dy[1] = (a * b * y[0] - (c - (a + b + 1.0) * t) * y[1]) / (t * (1.0 - t));
                Ok(())
            },
            x0,
            &[f0, df0],
            x,
            &opts,
            |_, _| StepControl::Continue,
        )
        .unwrap();
        sol.last().1[0]
    }

    #[test]
    fn trivial_values() {
        assert_eq!(hyp2f1(1.0, 0.5, 1.25, 0.0).unwrap(), 1.0);
        assert_eq!(hyp2f1(0.5, 0.75, 1.5, 0.0).unwrap(), 1.0);
        assert!(hyp2f1(1.0, 1.0, -2.0, 0.1).is_err());
        assert!(hyp2f1(1.0, 1.0, 2.5, 1.5).is_err());
    }

    #[test]
    fn elementary_closed_forms() {
        // ₂F₁(a,b;b;x) = (1−x)^{−a} ; ₂F₁(½,1;3/2;x²) = artanh(x)/x
        for &x in &[-3.0f64, -0.7, 0.2, 0.6, 0.93] {
            let exact = (1.0 - x).powf(-0.3);
            let got = hyp2f1(0.3, 0.7, 0.7, x).unwrap();
            assert!((got - exact).abs() < 1e-13 * exact, "x={x}");
        }
        for &x in &[0.3f64, 0.8, 0.99] {
            let exact = x.atanh() / x;
            let got = hyp2f1(0.5, 1.0, 1.5, x * x);
            // c − a − b = 0 is an integer: rejected above ½, fine below
            if x * x <= 0.5 {
                assert!((got.unwrap() - exact).abs() < 1e-14);
            } else {
                assert!(got.is_err());
            }
        }
    }

    #[test]
    fn agrees_with_euler_integral_and_ode() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for i in 0..50 {
            let (a, b, c) = if i % 2 == 0 { (1.0, 0.5, 1.25) } else { (0.5, 0.75, 1.5) };
            let x: f64 = rng.gen_range(-6.0..0.995);
            let got = hyp2f1(a, b, c, x).unwrap();
            let euler = euler_oracle(a, b, c, x);
            assert!((got - euler).abs() < 1e-11 * euler.abs(), "({a},{b};{c};{x}): {got} vs {euler}");
            if x.abs() > 0.01 && i % 5 == 0 {
                let ode = ode_oracle(a, b, c, x);
                assert!((got - ode).abs() < 1e-9 * ode.abs(), "ode ({a},{b};{c};{x}): {got} vs {ode}");
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for &x in &[-2.0, -0.3, 0.4, 0.7, 0.95] {
            let h = 1e-6;
            let fd = (hyp2f1(1.0, 0.5, 1.25, x + h).unwrap() - hyp2f1(1.0, 0.5, 1.25, x - h).unwrap()) / (2.0 * h);
            let d = hyp2f1_deriv(1.0, 0.5, 1.25, x).unwrap();
            assert!((fd - d).abs() < 1e-7 * d.abs().max(1.0));
        }
    }

    #[test]
    fn complement_matches_direct_evaluation() {
        for &w in &[0.5, 0.2, 1e-3] {
            let d = hyp2f1(1.0, 0.5, 1.25, 1.0 - w).unwrap();
            let c = hyp2f1_complement(1.0, 0.5, 1.25, w).unwrap();
            assert!((d - c).abs() < 1e-13 * d.abs());
        }
        // w far below the resolution of 1 − w
        let tiny = hyp2f1_complement(0.5, 0.75, 1.5, 1e-20).unwrap();
        assert!((tiny - kappa_bar()).abs() < 1e-4);
    }

    #[test]
    fn kappa_bar_value() {
        let k = kappa_bar();
        assert!((k - 2.62205755429212).abs() < 1e-12);
        assert!((hyp2f1(0.5, 0.75, 1.5, 1.0).unwrap() - k).abs() < 1e-13);
        // Γ(1/4)Γ(3/4) = π√2 relates the two forms
        let alt = std::f64::consts::PI.sqrt() / 2.0 * gamma(0.25) / gamma(0.75);
        assert!((alt - k).abs() < 1e-13);
    }

    #[test]
    fn specialised_evaluators_match_general_series() {
        use num_traits::ToPrimitive;
        for &x in &[-40.0, -3.0, -0.8, -0.2, 0.1, 0.45, 0.6, 0.9, 0.999] {
            let g = hyp2f1(1.0, 0.5, 1.25, x).unwrap();
            let f: f64 = f_half_quarter(x, false).unwrap();
            let t = f_half_quarter(TwoFloat::from(x), false).unwrap().to_f64().unwrap();
            assert!((f - g).abs() < 1e-13 * g.abs(), "x={x}: {f} vs {g}");
            assert!((t - g).abs() < 1e-13 * g.abs(), "x={x}: {t} vs {g}");
        }
        for &x in &[0.0, 0.3, 0.5, 0.7, 0.99] {
            let g = hyp2f1(0.5, 0.75, 1.5, x).unwrap();
            let f: f64 = f_half_three_quarter(x, false).unwrap();
            assert!((f - g).abs() < 1e-13 * g, "x={x}: {f} vs {g}");
        }
        assert!(f_half_quarter(1.0, false).is_err());
        assert!(f_half_three_quarter(-0.1, false).is_err());
    }

    #[test]
    fn connection_branches_hold_in_double_double() {
        use num_traits::ToPrimitive;
        let q = TwoFloat::from(2.0).quot(TwoFloat::from(3.0));
        assert!((q * TwoFloat::from(3.0) - TwoFloat::from(2.0)).abs().to_f64().unwrap() < 1e-30);
        let t = TwoFloat::from;
        // just past the switch points the plain series still converges, so
        // the connection constants are checked at double-double width
        let x = t(0.55);
        let direct = series_r(t(1.0), t(0.5), t(1.25), x);
        let err = (f_half_quarter(x, false).unwrap() - direct) / direct;
        assert!(err.abs().to_f64().unwrap() < 1e-28, "{err:?}");
        let x = t(-1.25);
        let w = t(1.0) - x;
        let direct = series_r(t(1.0), t(0.75), t(1.25), x.quot(x - t(1.0))).quot(w);
        let err = (f_half_quarter(x, false).unwrap() - direct) / direct;
        assert!(err.abs().to_f64().unwrap() < 1e-28, "{err:?}");
        let x = t(0.55);
        let direct = series_r(t(0.5), t(0.75), t(1.5), x);
        let err = (f_half_three_quarter(x, false).unwrap() - direct) / direct;
        assert!(err.abs().to_f64().unwrap() < 1e-28, "{err:?}");
    }
}
