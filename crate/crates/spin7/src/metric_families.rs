//! Explicit complete metrics: Bryant–Salamon, G₂ × S¹, A8 and B8.
//!
//! Every family is evaluated through the gap `r − r_bolt`, with factored
//! (A8, B8) or `expm1`/`ln1p` (Bryant–Salamon, G₂) forms, so no cancellation
//! occurs next to the bolt.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::triad::TriadJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    BryantSalamon,
    G2xS1,
    A8,
    B8,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::BryantSalamon, Family::G2xS1, Family::A8, Family::B8];

    pub fn name(self) -> &'static str {
        match self {
            Family::BryantSalamon => "BryantSalamon",
            Family::G2xS1 => "G2xS1",
            Family::A8 => "A8",
            Family::B8 => "B8",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFamily {
    pub family: Family,
    /// `r₀`, `ℓ` or `ℓ̃`.
    pub scale: f64,
}

impl MetricFamily {
    pub fn new(family: Family, scale: f64) -> Self {
        MetricFamily { family, scale }
    }

    pub fn unit(family: Family) -> Self {
        MetricFamily { family, scale: 1.0 }
    }

    /// Radius of the bolt (or nut).
    pub fn bolt(&self) -> f64 {
        match self.family {
            Family::B8 => 3.0 * self.scale,
            _ => self.scale,
        }
    }

    /// Sign of `b` required by the first-order system.
    pub fn b_sign(&self) -> f64 {
        match self.family {
            Family::A8 => -1.0,
            _ => 1.0,
        }
    }
}

/// `g_rr dr² + R₁₂(R₁² + R₂²) + R₃·R₃² + S₄·Pₐ²`. For `G2xS1` the `R₃` slot
/// holds the coefficient of the flat circle `dφ²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSample {
    pub r: f64,
    pub g_rr: f64,
    pub coef_r12: f64,
    pub coef_r3: f64,
    pub coef_s4: f64,
    /// Signed triad with three `t`-derivatives; `None` for `G2xS1`, whose
    /// circle is not an `R₃` leg.
    #[serde(skip)]
    pub triad: Option<TriadJet<f64>>,
}

/// Exact coefficients `(g_rr, [R₁₂, R₃, S₄])`; `g_rr` is `None` on the bolt.
pub type ExactCoefficients<S> = (Option<S>, [S; 3]);

fn checked_div<S: Scalar>(n: S, d: S) -> Option<S> {
    if d.is_zero() {
        None
    } else {
        Some(n / d)
    }
}

/// A8 coefficients exactly as written in `r` and `ℓ`.
pub fn a8_coefficients<S: Scalar>(r: &S, ell: &S) -> ExactCoefficients<S> {
    let k = |n| S::int(n);
    let p3 = r.clone() + k(3) * ell.clone();
    let m1 = r.clone() - ell.clone();
    let p1 = r.clone() + ell.clone();
    (
        checked_div(p1.clone() * p1.clone(), p3.clone() * m1.clone()),
        [
            p3.clone() * m1.clone(),
            k(4) * ell.clone() * ell.clone() * p3 * m1 / (p1.clone() * p1),
            S::ratio(1, 2) * (r.clone() * r.clone() - ell.clone() * ell.clone()),
        ],
    )
}

/// B8 coefficients exactly as written in `r` and `ℓ̃`.
pub fn b8_coefficients<S: Scalar>(r: &S, ellt: &S) -> ExactCoefficients<S> {
    let k = |n| S::int(n);
    let m3 = r.clone() - k(3) * ellt.clone();
    let p1 = r.clone() + ellt.clone();
    let m1 = r.clone() - ellt.clone();
    (
        checked_div(m1.clone() * m1.clone(), m3.clone() * p1.clone()),
        [
            m3.clone() * p1.clone(),
            k(4) * ellt.clone() * ellt.clone() * m3 * p1 / (m1.clone() * m1),
            S::ratio(1, 2) * (r.clone() * r.clone() - ellt.clone() * ellt.clone()),
        ],
    )
}

/// A8/B8 coefficients as jets in the gap `w = r − r_bolt` (both share
/// `g_rr`, `R₁₂`, `R₃`; they differ only in `S₄`).
fn ab8_jets<S: Scalar>(family: Family, ell: &S, w: &Jet<S>) -> [Jet<S>; 4] {
    let l = Jet::constant(ell.clone());
    let four = Jet::constant(S::int(4));
    let two = Jet::constant(S::int(2));
    let w4 = w.clone() + four.clone() * l.clone();
    let w2 = w.clone() + two.clone() * l.clone();
    let prod = w.clone() * w4.clone();
    let s4 = match family {
        Family::A8 => Jet::constant(S::ratio(1, 2)) * w.clone() * w2.clone(),
        _ => Jet::constant(S::ratio(1, 2)) * w2.clone() * w4,
    };
    [
        w2.clone() * w2.clone() / prod.clone(),
        prod.clone(),
        four * l.clone() * l * prod / (w2.clone() * w2),
        s4,
    ]
}

/// `1 − (s/(s + w))^p` as a jet in `w`, with its value formed by `expm1`.
fn one_minus_ratio_pow(s: f64, w: &Jet<f64>, p: f64) -> Jet<f64> {
    let q = ((w.clone() + Jet::constant(s)) / Jet::constant(s)).powf(-p);
    let mut e = (Jet::one() - q).entries().to_vec();
    e[0] = -(-p * (w.value() / s).ln_1p()).exp_m1();
    Jet::new(&e)
}

fn jets(fam: &MetricFamily, w: &Jet<f64>) -> [Jet<f64>; 4] {
    let s = fam.scale;
    let r = w.clone() + Jet::constant(fam.bolt());
    match fam.family {
        Family::A8 | Family::B8 => ab8_jets(fam.family, &s, w),
        Family::BryantSalamon => {
            let h = one_minus_ratio_pow(s, w, 10.0 / 3.0);
            let r2 = r.clone() * r;
            [h.recip(), Jet::constant(0.36) * r2.clone() * h.clone(), Jet::constant(0.36) * r2.clone() * h, Jet::constant(0.45) * r2]
        }
        Family::G2xS1 => {
            let h = one_minus_ratio_pow(s, w, 4.0);
            let r2 = r.clone() * r;
            [h.recip(), r2.clone() * h, Jet::one(), Jet::constant(0.5) * r2]
        }
    }
}

/// Sample at gap `w = r − r_bolt > 0`.
pub fn sample_gap(fam: &MetricFamily, w: f64) -> Result<MetricSample> {
    if !(fam.scale > 0.0) {
        return Err(Error::Domain(format!("scale {} must be positive", fam.scale)));
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Domain(format!("r = {} is not inside the domain r > {}", fam.bolt() + w, fam.bolt())));
    }
    let [g, r12, r3, s4] = jets(fam, &Jet::variable(w));
    let triad = if fam.family == Family::G2xS1 {
        None
    } else {
        let a = r12.sqrt() / Jet::constant(2.0);
        let b = r3.sqrt() / Jet::constant(2.0 * fam.b_sign());
        let c = s4.sqrt();
        let h = g.truncate(3).sqrt().recip();
        let rt = Jet::integral_curve(w, &h);
        Some(TriadJet::new(rt.compose(&a), rt.compose(&b), rt.compose(&c)))
    };
    Ok(MetricSample {
        r: fam.bolt() + w,
        g_rr: *g.value(),
        coef_r12: *r12.value(),
        coef_r3: *r3.value(),
        coef_s4: *s4.value(),
        triad,
    })
}

/// Sample at radius `r` (interior of the domain).
pub fn sample(fam: &MetricFamily, r: f64) -> Result<MetricSample> {
    sample_gap(fam, r - fam.bolt())
}

/// Jet of the gap `w(t) = r(t) − r_bolt` along the proper distance, through `w`.
pub fn gap_jet(fam: &MetricFamily, w: f64) -> Result<Jet<f64>> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!("gap {w} must be positive")));
    }
    let g = jets(fam, &Jet::variable(w))[0].clone();
    Ok(Jet::integral_curve(w, &g.truncate(3).sqrt().recip()))
}

/// `(a, c)` with three `t`-derivatives for the G₂ factor of `G2xS1`.
pub fn g2_pair(fam: &MetricFamily, w: f64) -> Result<(Jet<f64>, Jet<f64>)> {
    if fam.family != Family::G2xS1 {
        return Err(Error::Domain("only the G2xS1 family has a G₂ pair".into()));
    }
    if !(w > 0.0) {
        return Err(Error::Domain(format!("gap {w} must be positive")));
    }
    let [g, r12, _, s4] = jets(fam, &Jet::variable(w));
    let rt = Jet::integral_curve(w, &g.truncate(3).sqrt().recip());
    Ok((rt.compose(&(r12.sqrt() / Jet::constant(2.0))), rt.compose(&s4.sqrt())))
}

/// Proper distance from the bolt, where known in closed form.
pub fn proper_distance(fam: &MetricFamily, w: f64) -> Option<f64> {
    match fam.family {
        // t = √((r + 3ℓ)(r − ℓ)) for A8, the same in the gap for B8
        Family::A8 | Family::B8 => Some((w * (w + 4.0 * fam.scale)).sqrt()),
        _ => None,
    }
}

/// One collapsing (or surviving) direction near the bolt.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Collapse {
    pub coefficient: &'static str,
    /// Log–log slope of `√coef` against proper distance `ρ` (1 = linear collapse, 0 = survives).
    pub power: f64,
    /// `lim √coef/(λρ)` with `λ` the smooth-cap reference rate; 1 means no conical deficit.
    pub rate: f64,
    /// Value at the bolt for surviving directions.
    pub bolt_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoltReport {
    pub family: Family,
    pub scale: f64,
    pub bolt_radius: f64,
    pub kind: &'static str,
    pub collapses: Vec<Collapse>,
    /// `coef_R3/coef_R12` at the bolt (A8: 1 — the S³ fibre is round).
    pub fibre_ratio_at_bolt: f64,
}

impl BoltReport {
    /// Largest deviation of a collapse rate or power from its regular value.
    pub fn max_deviation(&self) -> f64 {
        self.collapses
            .iter()
            .map(|c| {
                let p = if c.bolt_value > 0.0 { c.power.abs() } else { (c.power - 1.0).abs() };
                let r = if c.bolt_value > 0.0 { 0.0 } else { (c.rate - 1.0).abs() };
                p.max(r)
            })
            .fold(0.0, f64::max)
    }
}

/// Proper distance `∫ √g_rr dr` from the bolt, by quadrature in `σ = √w`
/// (the integrand `√g_rr ∝ w^{−1/2}` becomes regular).
fn distance(fam: &MetricFamily, w: f64) -> Result<f64> {
    if let Some(t) = proper_distance(fam, w) {
        return Ok(t);
    }
    let res = crate::quadrature::integrate(
        |s| {
            let g = jets(fam, &Jet::new(&[s * s]))[0].value().to_owned();
            2.0 * s * g.sqrt()
        },
        0.0,
        w.sqrt(),
        1e-13,
        0.0,
    )?;
    Ok(res.value)
}

/// Fitted collapse exponents and rates at the bolt.
pub fn bolt_expansion(fam: &MetricFamily) -> Result<BoltReport> {
    let s = fam.scale;
    let (w1, w2) = (1e-9 * s, 1e-8 * s);
    let (m1, m2) = (sample_gap(fam, w1)?, sample_gap(fam, w2)?);
    let (t1, t2) = (distance(fam, w1)?, distance(fam, w2)?);
    // reference rates: round S³ is R₁²+R₂²+R₃²; the A8 nut also needs ¼Pₐ² (unit S⁷);
    // the G₂ bolt caps ℝ³ with the unit S² = 4(R₁²+R₂²)
    let (kind, refs): (&str, Vec<(&'static str, fn(&MetricSample) -> f64, f64)>) = match fam.family {
        Family::A8 => (
            "nut: S⁷ collapses to a point (ℝ⁸)",
            vec![("R12", |m| m.coef_r12, 1.0), ("R3", |m| m.coef_r3, 1.0), ("S4", |m| m.coef_s4, 0.5)],
        ),
        Family::B8 | Family::BryantSalamon => (
            "bolt: S³ collapses over a surviving S⁴ (ℝ⁴ × S⁴ locally)",
            vec![("R12", |m| m.coef_r12, 1.0), ("R3", |m| m.coef_r3, 1.0), ("S4", |m| m.coef_s4, 0.0)],
        ),
        Family::G2xS1 => (
            "bolt: S² collapses over a surviving S⁴ (ℝ³ × S⁴ × S¹ locally)",
            vec![("R12", |m| m.coef_r12, 2.0), ("S4", |m| m.coef_s4, 0.0), ("circle", |m| m.coef_r3, 0.0)],
        ),
    };
    let collapses = refs
        .into_iter()
        .map(|(name, get, lambda)| {
            let (c1, c2) = (get(&m1).sqrt(), get(&m2).sqrt());
            let power = (c2 / c1).ln() / (t2 / t1).ln();
            Collapse {
                coefficient: name,
                power,
                rate: if lambda > 0.0 { c1 / (lambda * t1) } else { f64::NAN },
                bolt_value: if lambda > 0.0 { 0.0 } else { get(&m1) },
            }
        })
        .collect();
    Ok(BoltReport {
        family: fam.family,
        scale: s,
        bolt_radius: fam.bolt(),
        kind,
        collapses,
        fibre_ratio_at_bolt: m1.coef_r3 / m1.coef_r12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub family: Family,
    pub short_distance: &'static str,
    pub large_distance: &'static str,
    /// Log–log slopes against proper distance at large `r`.
    pub growth_r12: f64,
    pub growth_s4: f64,
    pub growth_r3: f64,
    /// `lim coef_S4/coef_R12` (½ for the squashed ℂℙ³ cone base).
    pub cone_ratio: f64,
    /// `lim coef_R3`.
    pub circle_coefficient: f64,
}

/// Short- and large-distance structure of a family.
pub fn interpolation_report(fam: &MetricFamily) -> Result<InterpolationReport> {
    let s = fam.scale;
    let (w1, w2) = (1e7 * s, 1e8 * s);
    let (m1, m2) = (sample_gap(fam, w1)?, sample_gap(fam, w2)?);
    // √g_rr → const at large r, so t ∝ r up to a constant that drops out of the slope
    let (t1, t2) = match (proper_distance(fam, w1), proper_distance(fam, w2)) {
        (Some(a), Some(b)) => (a, b),
        _ => (m1.r, m2.r),
    };
    let slope = |a: f64, b: f64| (b.sqrt() / a.sqrt()).ln() / (t2 / t1).ln();
    let (short, long) = match fam.family {
        Family::A8 => ("ℝ⁸ at the nut", "ALC: circle of constant length over a cone on squashed ℂℙ³"),
        Family::B8 => ("ℝ⁴ × S⁴ at the bolt", "ALC: circle of constant length over a cone on squashed ℂℙ³"),
        Family::BryantSalamon => ("ℝ⁴ × S⁴ at the bolt", "AC: cone on the squashed S⁷"),
        Family::G2xS1 => ("ℝ³ × S⁴ × S¹ at the bolt", "cone on ℂℙ³ times a circle"),
    };
    Ok(InterpolationReport {
        family: fam.family,
        short_distance: short,
        large_distance: long,
        growth_r12: slope(m1.coef_r12, m2.coef_r12),
        growth_s4: slope(m1.coef_s4, m2.coef_s4),
        growth_r3: slope(m1.coef_r3, m2.coef_r3),
        cone_ratio: m2.coef_s4 / m2.coef_r12,
        circle_coefficient: m2.coef_r3,
    })
}

/// The three elementary solutions `f(r)` of the third-order equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Elementary {
    /// `f = −r`: flat ℝ⁸.
    MinusR,
    /// `f = 3r`: Bryant–Salamon after `r → 3r²/20`.
    ThreeR,
    /// `f = r + r²/(2ℓ²)`: A8/B8 after `r → −ℓ(r + ℓ)`.
    Quadratic,
}

impl Elementary {
    /// `(f, f′, f″, f‴)` at `r` (`ℓ` only used by `Quadratic`).
    pub fn jet<S: Scalar>(self, r: &S, ell: &S) -> [S; 4] {
        match self {
            Elementary::MinusR => [-r.clone(), S::int(-1), S::zero(), S::zero()],
            Elementary::ThreeR => [S::int(3) * r.clone(), S::int(3), S::zero(), S::zero()],
            Elementary::Quadratic => {
                let l2 = ell.clone() * ell.clone();
                [
                    r.clone() + r.clone() * r.clone() / (S::int(2) * l2.clone()),
                    S::one() + r.clone() / l2.clone(),
                    S::one() / l2,
                    S::zero(),
                ]
            }
        }
    }
}

/// `(a², b/a)` from `a² = (f′−1)(f′−3)f/Q`, `b = 2a/(f′−1)`; requires `Q ≠ 0`.
pub fn algebraic_triad<S: Scalar>(f: &[S; 4]) -> Result<(S, S)> {
    let q = crate::closed_form_solutions::q_function(&f[0], &f[1], &f[2]);
    if q.is_zero() {
        return Err(Error::Domain("Q = 0: a is not determined algebraically".into()));
    }
    let w = f[1].clone() - S::one();
    Ok((w.clone() * (f[1].clone() - S::int(3)) * f[0].clone() / q, S::int(2) / w))
}

/// The `f = 3r` branch: `a² = (3/5) r (1 − (r₀/r)^{5/3})` in the original
/// radial variable, given `(r₀/r)^{5/3}` (rational on `r = r₀ s³`-type points).
pub fn three_r_a_squared<S: Scalar>(r: &S, ratio_pow_five_thirds: &S) -> S {
    S::ratio(3, 5) * r.clone() * (S::one() - ratio_pow_five_thirds.clone())
}

/// Bryant–Salamon coefficients `[g_rr, R₁₂, R₃, S₄]` given `x = (r₀/r)^{10/3}`.
pub fn bryant_salamon_coefficients<S: Scalar>(r: &S, x: &S) -> [S; 4] {
    let h = S::one() - x.clone();
    let r2 = r.clone() * r.clone();
    [S::one() / h.clone(), S::ratio(9, 25) * r2.clone() * h.clone(), S::ratio(9, 25) * r2.clone() * h, S::ratio(9, 20) * r2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::ricci_flat_residual;
    use crate::gradient_flow::flow_rhs;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    #[test]
    fn a8_reference_values() {
        let m = sample(&MetricFamily::unit(Family::A8), 3.0).unwrap();
        assert!((m.g_rr - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!((m.coef_r12, m.coef_r3, m.coef_s4), (12.0, 3.0, 4.0));
        let far = sample(&MetricFamily::unit(Family::A8), 1e9).unwrap();
        assert!((far.coef_r3 - 4.0).abs() < 1e-7);
        assert!(sample(&MetricFamily::unit(Family::A8), 0.5).is_err());
    }

    #[test]
    fn b8_bolt_values() {
        let q = |n| Q::int(n);
        let (g, c) = b8_coefficients(&q(3), &q(1));
        assert!(g.is_none());
        assert_eq!(c, [q(0), q(0), q(4)]);
    }

    #[test]
    fn gap_evaluation_matches_closed_forms() {
        for (fam, exact) in [(Family::A8, a8_coefficients::<Q> as fn(&Q, &Q) -> ExactCoefficients<Q>), (Family::B8, b8_coefficients::<Q>)] {
            for (n, d) in [(1, 7), (5, 2), (40, 3)] {
                let ell = Q::ratio(3, 2);
                let w = Q::ratio(n, d);
                let bolt = if fam == Family::A8 { ell.clone() } else { Q::int(3) * ell.clone() };
                let jets = ab8_jets(fam, &ell, &Jet::constant(w.clone()));
                let (g, ex) = exact(&(bolt + w), &ell);
                assert_eq!(jets[0].value(), &g.unwrap());
                for i in 0..3 {
                    assert_eq!(jets[i + 1].value(), &ex[i]);
                }
            }
        }
    }

    #[test]
    fn sampled_triads_solve_the_flow() {
        for fam in [Family::A8, Family::B8, Family::BryantSalamon] {
            for &scale in &[1.0, 2.5] {
                let mf = MetricFamily::new(fam, scale);
                for &w in &[1e-6, 0.3, 4.0, 300.0] {
                    let t = sample_gap(&mf, w * scale).unwrap().triad.unwrap();
                    let [a, b, c] = t.values();
                    let rhs = flow_rhs(&a, &b, &c).unwrap();
                    for (i, j) in [&t.a, &t.b, &t.c].iter().enumerate() {
                        assert!((j.deriv(1) - rhs[i]).abs() < 1e-12 * (1.0 + rhs[i].abs()), "{fam:?} w={w} i={i}");
                    }
                    if w >= 0.3 {
                        assert!(ricci_flat_residual(&t).unwrap() < 1e-9 * (1.0 + 1.0 / (scale * scale)), "{fam:?} w={w}");
                    }
                }
            }
        }
        // b > 0 for A8 would violate the flow
        let t = sample(&MetricFamily::unit(Family::A8), 3.0).unwrap().triad.unwrap();
        let [a, b, c] = t.values();
        assert!(b < 0.0);
        let flipped = flow_rhs(&a, &(-b), &c).unwrap();
        assert!((t.a.deriv(1) - flipped[0]).abs() > 0.1);
    }

    #[test]
    fn g2_pair_solves_the_truncated_flow() {
        let mf = MetricFamily::unit(Family::G2xS1);
        for &w in &[0.01, 1.0, 50.0] {
            let (a, c) = g2_pair(&mf, w).unwrap();
            let (av, cv) = (*a.value(), *c.value());
            assert!((a.deriv(1) - (1.0 - av * av / (cv * cv))).abs() < 1e-12);
            assert!((c.deriv(1) - av / cv).abs() < 1e-12);
        }
    }

    #[test]
    fn bolts_are_smooth() {
        for fam in Family::ALL {
            let rep = bolt_expansion(&MetricFamily::new(fam, 1.7)).unwrap();
            assert!(rep.max_deviation() < 1e-3, "{fam:?}: {rep:?}");
        }
        let a8 = bolt_expansion(&MetricFamily::unit(Family::A8)).unwrap();
        assert!((a8.fibre_ratio_at_bolt - 1.0).abs() < 1e-8);
        let bs = bolt_expansion(&MetricFamily::new(Family::BryantSalamon, 2.0)).unwrap();
        let s4 = bs.collapses.iter().find(|c| c.coefficient == "S4").unwrap();
        assert!((s4.bolt_value - 0.45 * 4.0).abs() < 1e-7);
    }

    #[test]
    fn asymptotics() {
        for fam in [Family::A8, Family::B8] {
            let rep = interpolation_report(&MetricFamily::unit(fam)).unwrap();
            assert!((rep.cone_ratio - 0.5).abs() < 1e-6);
            assert!((rep.growth_r12 - 1.0).abs() < 1e-6 && (rep.growth_s4 - 1.0).abs() < 1e-6);
            assert!(rep.growth_r3.abs() < 1e-6);
            assert!((rep.circle_coefficient - 4.0).abs() < 1e-6);
        }
        let g2 = interpolation_report(&MetricFamily::unit(Family::G2xS1)).unwrap();
        assert_eq!(g2.growth_r3, 0.0);
        assert_eq!(g2.circle_coefficient, 1.0);
    }

    #[test]
    fn quadratic_solution_is_a8_and_b8() {
        // r_old = −ℓ(r + ℓ) maps f = r + r²/(2ℓ²) onto A8; ℓ → −ℓ̃ onto B8
        for (ell_n, sign) in [(1i64, 1i64), (3, 1), (2, -1)] {
            let ell = Q::int(ell_n * sign);
            for (n, d) in [(7, 3), (11, 2), (50, 7)] {
                let r = Q::ratio(n, d) * Q::int(ell_n) + if sign > 0 { Q::int(ell_n) } else { Q::int(3 * ell_n) };
                let r_old = -ell.clone() * (r.clone() + ell.clone());
                let f = Elementary::Quadratic.jet(&r_old, &ell);
                assert_eq!(f[0], Q::ratio(1, 2) * (r.clone() * r.clone() - ell.clone() * ell.clone()));
                let (a2, b_over_a) = algebraic_triad(&f).unwrap();
                let (g, c) = if sign > 0 { a8_coefficients(&r, &ell) } else { b8_coefficients(&r, &(-ell.clone())) };
                assert_eq!(Q::int(4) * a2.clone(), c[0]);
                assert_eq!(Q::int(4) * a2.clone() * b_over_a.clone() * b_over_a.clone(), c[1]);
                // dr_old = b dt and dr_old = −ℓ dr give g_rr = ℓ²/b²
                assert_eq!(ell.clone() * ell.clone() / (a2 * b_over_a.clone() * b_over_a.clone()), g.unwrap());
                assert!((b_over_a < Q::zero()) == (sign > 0));
            }
        }
    }

    #[test]
    fn three_r_solution_is_bryant_salamon() {
        // r = r₀s³ makes (r₀/r)^{10/3} = s^{-10} rational
        let r0 = Q::ratio(3, 2);
        for (n, d) in [(5, 4), (3, 2), (7, 2)] {
            let s = Q::ratio(n, d);
            let r = r0.clone() * s.clone() * s.clone() * s.clone();
            let x = crate::scalar::rational_pow(&s, -10, 1).unwrap();
            let r_old = Q::ratio(3, 20) * r.clone() * r.clone();
            let f = Elementary::ThreeR.jet(&r_old, &Q::one());
            assert!(crate::closed_form_solutions::q_function(&f[0], &f[1], &f[2]).is_zero());
            let a2 = three_r_a_squared(&r_old, &x);
            // (a²)' = 1 − 2a²/(3r) with (r₀'/r)^{5/3}' = −(5/3)(·)/r
            let da2 = Q::ratio(3, 5) * (Q::one() + Q::ratio(2, 3) * x.clone());
            assert_eq!(da2, Q::one() - Q::int(2) * a2.clone() / (Q::int(3) * r_old.clone()));
            let bs = bryant_salamon_coefficients(&r, &x);
            assert_eq!(Q::int(4) * a2.clone(), bs[1]);
            assert_eq!(bs[1], bs[2]);
            assert_eq!(f[0], bs[3]);
            // dr_old = a dt (b = a), dr_old = (3r/10) dr
            let drr = Q::ratio(3, 10) * r.clone();
            assert_eq!(drr.clone() * drr / a2, bs[0]);
        }
    }

    #[test]
    fn minus_r_solution_is_flat() {
        let r = Q::ratio(-9, 4);
        let f = Elementary::MinusR.jet(&r, &Q::one());
        assert_eq!(crate::closed_form_solutions::q_function(&f[0], &f[1], &f[2]), Q::int(8));
        let (a2, ba) = algebraic_triad(&f).unwrap();
        assert_eq!((a2, ba), (-r, Q::int(-1)));
        // a = t/2, b = −t/2, c = t/2 is flat
        let t = Q::int(3);
        let lin = |s: i64| Jet::new(&[Q::ratio(s, 2) * t.clone(), Q::ratio(s, 2), Q::zero(), Q::zero()]);
        let tri = TriadJet::new(lin(1), lin(-1), lin(1));
        assert_eq!(ricci_flat_residual(&tri).unwrap(), 0.0);
    }
}
