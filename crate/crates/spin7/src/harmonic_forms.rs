//! Harmonic 4-forms `G = ω ± ∗ω` on the A8 and B8 metrics.
//!
//! `ω = u₁ e⁰¹²³ − u₂ e^{1̂2̂}∧Ĵ³ + u₃ (e^{2̂3̂}∧Ĵ¹ + e^{3̂1̂}∧Ĵ²)` with
//! `Ĵⁱ = e⁰ⁱ + ½εᵢⱼₖeʲᵏ`. `dG = 0` is the linear system
//!
//! ```text
//! ±(c⁴u₁)˙   = 2bc²u₂ − 4ac²u₃
//! ±(a²c²u₂)˙ = a²bu₁ − bc²u₂ − 2ac²u₃
//! ±(abc²u₃)˙ = −a²bu₁ − bc²u₂
//! ```
//!
//! with the upper sign for self-dual `G` (the duality of the Cayley form).
//! Everything here is at unit scale (`ℓ = ℓ̃ = 1`).

use nalgebra::{Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradient_flow::flow_rhs;
use crate::invariant_forms::{frame_hodge_star, j_form, sort_sign, Form, Frame, Generator};
use crate::jet::Jet;
use crate::metric_families::{gap_jet, sample_gap, Family, MetricFamily};
use crate::ode::{integrate, OdeOptions, StepControl};
use crate::quadrature::integrate_to_infinity;
use crate::scalar::Scalar;
use crate::triad::TriadJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Duality {
    SelfDual,
    AntiSelfDual,
}

impl Duality {
    pub fn sign(self) -> i64 {
        match self {
            Duality::SelfDual => 1,
            Duality::AntiSelfDual => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Duality::SelfDual => "self-dual",
            Duality::AntiSelfDual => "anti-self-dual",
        }
    }

    pub fn from_name(s: &str) -> Option<Duality> {
        match s.to_ascii_lowercase().as_str() {
            "self-dual" | "sd" | "+" | "plus" | "upper" => Some(Duality::SelfDual),
            "anti-self-dual" | "asd" | "-" | "minus" | "lower" => Some(Duality::AntiSelfDual),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HarmonicFamily {
    A8,
    B8,
}

impl HarmonicFamily {
    pub fn metric(self) -> MetricFamily {
        match self {
            HarmonicFamily::A8 => MetricFamily::unit(Family::A8),
            HarmonicFamily::B8 => MetricFamily::unit(Family::B8),
        }
    }

    pub fn bolt(self) -> i64 {
        match self {
            HarmonicFamily::A8 => 1,
            HarmonicFamily::B8 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HarmonicFamily::A8 => "A8",
            HarmonicFamily::B8 => "B8",
        }
    }
}

/// The three supported `(family, duality)` pairs with their quoted integrals.
pub const SUPPORTED: [(HarmonicFamily, Duality, i64, i64); 3] = [
    (HarmonicFamily::A8, Duality::SelfDual, 9, 4),
    (HarmonicFamily::B8, Duality::SelfDual, 189, 16),
    (HarmonicFamily::B8, Duality::AntiSelfDual, 189, 4),
];

pub fn quoted_integral(family: HarmonicFamily, duality: Duality) -> Option<(i64, i64)> {
    SUPPORTED.iter().find(|s| s.0 == family && s.1 == duality).map(|s| (s.2, s.3))
}

fn unsupported(family: HarmonicFamily, duality: Duality) -> Error {
    Error::NotNormalisable(format!(
        "{} carries no L² {} harmonic 4-form of this type: the solution regular at the bolt tends to a constant at infinity",
        family.name(),
        duality.name()
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicTriple<S> {
    pub u1: S,
    pub u2: S,
    pub u3: S,
    pub duality: Duality,
}

impl<S: Scalar> HarmonicTriple<S> {
    pub fn as_array(&self) -> [S; 3] {
        [self.u1.clone(), self.u2.clone(), self.u3.clone()]
    }
}

/// Horner evaluation, highest degree first.
fn poly<S: Scalar>(r: &Jet<S>, coeffs: &[i64]) -> Jet<S> {
    coeffs
        .iter()
        .fold(Jet::zero(), |acc, &c| acc * r.clone() + Jet::constant(S::int(c)))
        .truncate(r.len())
}

fn pow<S: Scalar>(x: &Jet<S>, n: u32) -> Jet<S> {
    (0..n).fold(Jet::one().truncate(x.len()), |acc, _| acc * x.clone())
}

fn shift<S: Scalar>(r: &Jet<S>, k: i64) -> Jet<S> {
    r.clone() + Jet::constant(S::int(k))
}

/// Closed-form `(u₁, u₂, u₃)` as jets in whatever variable `r` is a jet in.
pub fn closed_form_u_jet<S: Scalar>(family: HarmonicFamily, duality: Duality, r: &Jet<S>) -> Result<[Jet<S>; 3]> {
    let (p1, m1, p3) = (shift(r, 1), shift(r, -1), shift(r, 3));
    let two = Jet::constant(S::int(2));
    match (family, duality) {
        (HarmonicFamily::A8, Duality::SelfDual) => Ok([
            two.clone() / (pow(&p1, 3) * p3.clone()),
            -poly(r, &[1, 10, 13]) / (pow(&p1, 3) * pow(&p3, 3)),
            -two / (pow(&p1, 2) * pow(&p3, 3)),
        ]),
        (HarmonicFamily::B8, Duality::SelfDual) => {
            let d = pow(&m1, 3) * pow(&p1, 5);
            Ok([
                two.clone() * poly(r, &[1, 8, 34, -48, 21]) / d.clone(),
                -poly(r, &[1, 4, -18, 52, -23]) / d,
                two * poly(r, &[1, 14, -11]) / (pow(&m1, 2) * pow(&p1, 5)),
            ])
        }
        (HarmonicFamily::B8, Duality::AntiSelfDual) => {
            let d = pow(&m1, 3) * pow(&p1, 4);
            let m3 = shift(r, -3);
            Ok([
                -two.clone() * poly(r, &[5, -9, 15, -3]) / d.clone(),
                m3.clone() * poly(r, &[5, -2, 1]) / d,
                -two * m3 / (pow(&m1, 2) * pow(&p1, 4)),
            ])
        }
        (f, d) => Err(unsupported(f, d)),
    }
}

/// Closed-form `(u₁, u₂, u₃)` at radius `r`, exact for rational `r`.
pub fn closed_form_u<S: Scalar>(family: HarmonicFamily, duality: Duality, r: &S) -> Result<HarmonicTriple<S>> {
    if r.to_f64() < family.bolt() as f64 {
        return Err(Error::Domain(format!("r = {} is below the bolt at {}", r.to_f64(), family.bolt())));
    }
    let [u1, u2, u3] = closed_form_u_jet(family, duality, &Jet::new(&[r.clone()]))?;
    Ok(HarmonicTriple { u1: u1.value().clone(), u2: u2.value().clone(), u3: u3.value().clone(), duality })
}

/// The quoted closed-form `|G|²` of each supported solution.
pub fn printed_norm_squared<S: Scalar>(family: HarmonicFamily, duality: Duality, r: &S) -> Result<S> {
    let rj = Jet::new(&[r.clone()]);
    let (p1, m1, p3) = (shift(&rj, 1), shift(&rj, -1), shift(&rj, 3));
    let (num, den) = match (family, duality) {
        (HarmonicFamily::A8, Duality::SelfDual) => (poly(&rj, &[3, 44, 242, 492, 339]), pow(&p1, 6) * pow(&p3, 6)),
        (HarmonicFamily::B8, Duality::SelfDual) => (
            poly(&rj, &[3, 40, 252, 1064, 2506, -12936, 18284, -10824, 2379]),
            pow(&m1, 6) * pow(&p1, 10),
        ),
        (HarmonicFamily::B8, Duality::AntiSelfDual) => {
            (poly(&rj, &[75, -350, 829, -932, 885, -414, 99]), pow(&m1, 6) * pow(&p1, 8))
        }
        (f, d) => return Err(unsupported(f, d)),
    };
    Ok((Jet::constant(S::int(96)) * num / den).value().clone())
}

/// `|G|² = 48(u₁² + 2u₂² + 4u₃²)`.
pub fn norm_squared<S: Scalar>(u: &HarmonicTriple<S>) -> S {
    S::int(48) * (u.u1.clone() * u.u1.clone() + S::int(2) * u.u2.clone() * u.u2.clone() + S::int(4) * u.u3.clone() * u.u3.clone())
}

/// `(du₁/dt, du₂/dt, du₃/dt)` on a triad carrying first derivatives.
pub fn harmonic_rhs<S: Scalar>(u: &[S; 3], duality: Duality, triad: &TriadJet<S>) -> Result<[S; 3]> {
    if !triad.is_regular() || triad.order() < 2 {
        return Err(Error::SingularFrame("harmonic system needs a regular triad with first derivatives".into()));
    }
    let [a, b, c] = triad.values();
    let (da, db, dc) = (triad.a.deriv(1).clone(), triad.b.deriv(1).clone(), triad.c.deriv(1).clone());
    let s = S::int(duality.sign());
    let (c2, two, four) = (c.clone() * c.clone(), S::int(2), S::int(4));
    let [u1, u2, u3] = u.clone();
    Ok([
        s.clone() * (two.clone() * b.clone() * u2.clone() - four.clone() * a.clone() * u3.clone()) / c2.clone()
            - four * dc.clone() / c.clone() * u1.clone(),
        s.clone() * (b.clone() / c2.clone() * u1.clone() - b.clone() / (a.clone() * a.clone()) * u2.clone() - two.clone() / a.clone() * u3.clone())
            - two.clone() * (da.clone() / a.clone() + dc.clone() / c.clone()) * u2.clone(),
        -s * (a.clone() / c2 * u1 + u2 / a.clone())
            - (da / a + db / b + two * dc / c) * u3,
    ])
}

/// Residuals of the three first-order equations for `u(t)` given as jets.
pub fn harmonic_residual<S: Scalar>(u: &[Jet<S>; 3], duality: Duality, triad: &TriadJet<S>) -> Result<[S; 3]> {
    let vals = [u[0].value().clone(), u[1].value().clone(), u[2].value().clone()];
    let rhs = harmonic_rhs(&vals, duality, triad)?;
    Ok([
        u[0].deriv(1).clone() - rhs[0].clone(),
        u[1].deriv(1).clone() - rhs[1].clone(),
        u[2].deriv(1).clone() - rhs[2].clone(),
    ])
}

fn frame_mono<S: Scalar>(idx: &[usize], c: Jet<S>) -> Form<S> {
    let (sign, mask) = sort_sign(idx);
    Form::monomial(mask, if sign > 0 { c } else { -c })
}

/// `ω` in frame components (bit `A` ↔ `eᴬ`).
pub fn omega_frame<S: Scalar>(u: &[Jet<S>; 3]) -> Form<S> {
    let j = |i: usize, idx: [usize; 2], c: &Jet<S>| {
        let (p, q) = [(1, (2, 3)), (2, (3, 1)), (3, (1, 2))][i - 1];
        frame_mono(&[idx[0], idx[1], 0, p], c.clone()).add(&frame_mono(&[idx[0], idx[1], q.0, q.1], c.clone()))
    };
    frame_mono(&[0, 1, 2, 3], u[0].clone())
        .add(&j(3, [4, 5], &-u[1].clone()))
        .add(&j(1, [5, 6], &u[2]))
        .add(&j(2, [6, 4], &u[2]))
}

/// `G = ω ± ∗ω` in frame components.
pub fn g_frame<S: Scalar>(u: &[Jet<S>; 3], duality: Duality) -> Form<S> {
    let w = omega_frame(u);
    let star = frame_hodge_star(&w);
    match duality {
        Duality::SelfDual => w.add(&star),
        Duality::AntiSelfDual => w.sub(&star),
    }
}

/// `G` in the generator basis on the given triad (`u` as `t`-jets).
pub fn g_form<S: Scalar>(u: &[Jet<S>; 3], duality: Duality, triad: &TriadJet<S>) -> Result<Form<S>> {
    Ok(Frame::spin7(triad)?.from_frame(&g_frame(u, duality)))
}

/// Triad and `t`-jets of the closed-form `u` at gap `w` above the bolt.
pub fn closed_form_on_metric(family: HarmonicFamily, duality: Duality, w: f64) -> Result<(TriadJet<f64>, [Jet<f64>; 3])> {
    let fam = family.metric();
    let triad = sample_gap(&fam, w)?.triad.expect("A8 and B8 carry a triad");
    let wt = gap_jet(&fam, w)?;
    let ur = closed_form_u_jet(family, duality, &Jet::variable(w + fam.bolt()))?;
    Ok((triad, [wt.compose(&ur[0]), wt.compose(&ur[1]), wt.compose(&ur[2])]))
}

/// `max |dG|` and the first-order-system residual for the closed form at gap `w`.
pub fn closed_form_residuals(family: HarmonicFamily, duality: Duality, w: f64) -> Result<(f64, f64)> {
    let (triad, u) = closed_form_on_metric(family, duality, w)?;
    let dg = g_form(&u, duality, &triad)?.d().values_only().max_abs();
    let res = harmonic_residual(&u, duality, &triad)?;
    let scale = u.iter().map(|j| j.value().abs()).fold(0.0, f64::max);
    Ok((dg, res.iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L2Report {
    pub family: HarmonicFamily,
    pub duality: Duality,
    pub value: f64,
    pub error_estimate: f64,
    pub quoted: (i64, i64),
}

impl L2Report {
    pub fn quoted_value(&self) -> f64 {
        self.quoted.0 as f64 / self.quoted.1 as f64
    }

    pub fn relative_error(&self) -> f64 {
        (self.value / self.quoted_value() - 1.0).abs()
    }
}

/// Radial measure `μ = a²c⁴ dr` at gap `w`.
pub fn measure(family: HarmonicFamily, w: f64) -> Result<f64> {
    let m = sample_gap(&family.metric(), w)?;
    Ok(m.coef_r12 / 4.0 * m.coef_s4 * m.coef_s4)
}

/// `∫ μ |G|²` from the bolt to infinity.
pub fn l2_integral(family: HarmonicFamily, duality: Duality) -> Result<L2Report> {
    let quoted = quoted_integral(family, duality).ok_or_else(|| unsupported(family, duality))?;
    let bolt = family.bolt() as f64;
    let mut failure = None;
    let integrand = |r: f64| {
        let w = r - bolt;
        if w <= 0.0 {
            return 0.0;
        }
        let value = measure(family, w).and_then(|mu| Ok(mu * norm_squared(&closed_form_u(family, duality, &r)?)));
        value.unwrap_or_else(|e| {
            failure = Some(e);
            f64::NAN
        })
    };
    let q = integrate_to_infinity(integrand, bolt, 50.0, 1e-12);
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    Ok(L2Report { family, duality, value: q.value, error_estimate: q.error / q.value.abs(), quoted })
}

/// `B₃` for the A8 form as a generator-basis 3-form; `w = r − 1` is a jet.
pub fn potential_b3<S: Scalar>(w: &Jet<S>) -> Form<S> {
    let r = shift(w, 1);
    let (p1, p3, p5) = (shift(&r, 1), shift(&r, 3), shift(&r, 5));
    let w2 = w.clone() * w.clone();
    let c1 = -(w2.clone() / (p1.clone() * p1.clone()));
    let c2 = -(w2.clone() / (Jet::constant(S::int(8)) * p3.clone() * p3.clone()));
    let c3 = -(w2 * p5 / (Jet::constant(S::int(4)) * p1 * p3.clone() * p3));
    let g = |x: Generator| Form::<S>::generator(x);
    Form::product(&[Generator::R1, Generator::R2, Generator::R3], c1)
        .add(&g(Generator::R1).wedge(&j_form(1)).add(&g(Generator::R2).wedge(&j_form(2))).scale_jet(&c2))
        .add(&g(Generator::R3).wedge(&j_form(3)).scale_jet(&c3))
}

/// `max |dB₃ − G|` on A8 at gap `w`.
pub fn potential_residual(w: f64) -> Result<f64> {
    let (triad, u) = closed_form_on_metric(HarmonicFamily::A8, Duality::SelfDual, w)?;
    let wt = gap_jet(&HarmonicFamily::A8.metric(), w)?;
    let b = potential_b3(&wt);
    let g = g_form(&u, Duality::SelfDual, &triad)?;
    Ok(b.d().sub(&g).values_only().max_abs())
}

/// `|B₃|²` (full contraction, `3! Σ_{A<B<C} B²_{ABC}`) on A8 at gap `w`.
pub fn b3_norm_squared(w: f64) -> Result<f64> {
    let triad = sample_gap(&HarmonicFamily::A8.metric(), w)?.triad.unwrap();
    let frame = Frame::spin7(&triad)?;
    let b = frame.to_frame(&potential_b3(&Jet::new(&[w])))?;
    Ok(6.0 * b.terms().map(|(_, c)| c.value() * c.value()).sum::<f64>())
}

/// Prefactors of the three `B₃` structures as `r → ∞`.
pub fn b3_prefactor_limits() -> [f64; 3] {
    let w = Jet::new(&[1e12]);
    let b = potential_b3(&w);
    use Generator::*;
    let c = |gens: &[Generator]| {
        let mask = gens.iter().fold(0u16, |m, g| m | g.bit());
        b.coefficient(mask).map_or(0.0, |j| *j.value())
    };
    [c(&[R1, R2, R3]), c(&[P0, P1, R1]), c(&[P0, P3, R3])]
}

/// `du/dw = M(w) u` along the metric, with `w = r − r_bolt`.
pub fn system_matrix(family: HarmonicFamily, duality: Duality, w: f64) -> Result<Matrix3<f64>> {
    let m = sample_gap(&family.metric(), w)?;
    let t = m.triad.expect("A8 and B8 carry a triad");
    let [a, b, c] = t.values();
    let [da, db, dc] = flow_rhs(&a, &b, &c)?;
    let flat = TriadJet::first_order(a, b, c, da, db, dc);
    let dtdr = m.g_rr.sqrt();
    let mut out = Matrix3::zeros();
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        let col = harmonic_rhs(&e, duality, &flat)?;
        for i in 0..3 {
            out[(i, k)] = col[i] * dtdr;
        }
    }
    Ok(out)
}

/// Real eigenvalues of `lim w·M(w)` at the bolt and `lim r·M` at infinity,
/// i.e. the exponents of `u ∼ wᵖ` and `u ∼ rᵖ`.
pub fn indicial_exponents(family: HarmonicFamily, duality: Duality) -> Result<([f64; 3], [f64; 3])> {
    let eig = |m: Matrix3<f64>| -> Result<[f64; 3]> {
        let ev = m
            .eigenvalues()
            .or_else(|| {
                let c = m.complex_eigenvalues();
                c.iter().all(|z| z.im.abs() < 1e-6).then(|| Vector3::new(c[0].re, c[1].re, c[2].re))
            })
            .ok_or_else(|| Error::Convention("complex indicial exponents".into()))?;
        let mut v = [ev[0], ev[1], ev[2]];
        v.sort_by(f64::total_cmp);
        Ok(v)
    };
    let wb = 1e-9;
    let bolt = eig(system_matrix(family, duality, wb)? * wb)?;
    let wi = 1e9;
    let inf = eig(system_matrix(family, duality, wi)? * (wi + family.bolt() as f64))?;
    Ok((bolt, inf))
}

/// Basis of the eigenspace of `m` for eigenvalue `lambda` (null space by SVD).
fn eigenspace(m: &Matrix3<f64>, lambda: f64) -> Vec<Vector3<f64>> {
    let shifted = m - Matrix3::identity() * lambda;
    let svd = shifted.svd(true, true);
    let vt = svd.v_t.unwrap();
    let top = svd.singular_values.max();
    (0..3)
        .filter(|&i| svd.singular_values[i] <= 1e-6 * top.max(1.0))
        .map(|i| vt.row(i).transpose())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicProfile {
    pub family: HarmonicFamily,
    pub duality: Duality,
    pub bolt_exponents: [f64; 3],
    pub infinity_exponents: [f64; 3],
    /// Dimension of the space of solutions regular at the bolt.
    pub regular_dimension: usize,
    pub radii: Vec<f64>,
    pub u: Vec<[f64; 3]>,
    /// `|u(R)|/max|u|` at the outer radius for the best decaying combination.
    pub tail_ratio: f64,
    /// Relative deviation from the closed form after matching one constant.
    pub max_relative_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct HarmonicOptions {
    pub w_start: f64,
    pub r_outer: f64,
    pub r_compare: f64,
    pub samples: usize,
    pub rtol: f64,
}

impl Default for HarmonicOptions {
    fn default() -> Self {
        HarmonicOptions { w_start: 1e-9, r_outer: 1e4, r_compare: 10.0, samples: 40, rtol: 1e-13 }
    }
}

/// Integrate the system outward from the bolt, starting on each regular
/// Frobenius direction, and form the combination that decays at infinity.
/// A non-decaying result is reported as [`Error::NotNormalisable`].
pub fn integrate_harmonic(family: HarmonicFamily, duality: Duality, opts: &HarmonicOptions) -> Result<HarmonicProfile> {
    let (bolt_exp, inf_exp) = indicial_exponents(family, duality)?;
    let a_bolt = system_matrix(family, duality, opts.w_start)? * opts.w_start;
    let mut seeds: Vec<(f64, Vector3<f64>)> = Vec::new();
    let mut seen: Vec<f64> = Vec::new();
    for &p in bolt_exp.iter().filter(|p| **p > -0.5) {
        let p = p.round();
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        for v in eigenspace(&a_bolt, p) {
            seeds.push((p, v));
        }
    }
    let bolt = family.bolt() as f64;
    let x0 = opts.w_start.ln();
    let x_end = (opts.r_outer - bolt).ln();
    let grid: Vec<f64> = (0..opts.samples)
        .map(|i| {
            let f = i as f64 / (opts.samples - 1) as f64;
            ((1e-3f64).ln() + f * ((opts.r_compare - bolt).ln() - (1e-3f64).ln())).exp()
        })
        .collect();
    let rhs = |x: f64, y: &[f64], dy: &mut [f64]| {
        let w = x.exp();
        let m = system_matrix(family, duality, w).map_err(|e| e.to_string())? * w;
        let v = m * Vector3::new(y[0], y[1], y[2]);
        dy.copy_from_slice(v.as_slice());
        Ok(())
    };
    let mut profiles: Vec<Vec<Vector3<f64>>> = Vec::new();
    let mut ends: Vec<Vector3<f64>> = Vec::new();
    for (p, v) in &seeds {
        let y0 = v * opts.w_start.powf(*p);
        // absolute floor tied to the seed size: components may start at exactly 0
        let ode_opts = OdeOptions { rtol: opts.rtol, atol: opts.rtol * 1e-3 * y0.amax(), ..OdeOptions::default() };
        let mut y = vec![y0[0], y0[1], y0[2]];
        let mut x = x0;
        let mut prof = Vec::new();
        for &w in &grid {
            let sol = integrate(rhs, x, &y, w.ln(), &ode_opts, |_, _| StepControl::Continue)?;
            if !sol.completed() {
                return Err(Error::SingularTrajectory(sol.stopped.unwrap_or_default()));
            }
            y = sol.last().1.to_vec();
            x = w.ln();
            prof.push(Vector3::new(y[0], y[1], y[2]));
        }
        let sol = integrate(rhs, x, &y, x_end, &ode_opts, |_, _| StepControl::Continue)?;
        let e = sol.last().1;
        ends.push(Vector3::new(e[0], e[1], e[2]));
        profiles.push(prof);
    }
    if seeds.is_empty() {
        return Err(Error::NotNormalisable("no solution is regular at the bolt".into()));
    }
    // combination minimising |u(R)|, normalised per solution by its size on the grid
    let sizes: Vec<f64> = profiles.iter().map(|p| p.iter().map(|v| v.norm()).fold(0.0, f64::max)).collect();
    let n = seeds.len();
    let alpha: Vec<f64> = if n == 1 {
        vec![1.0]
    } else {
        let m = SMatrix::<f64, 3, 2>::from_fn(|i, k| ends[k][i] / sizes[k]);
        let svd = m.svd(true, true);
        let (i, _) = svd.singular_values.argmin();
        let vt = svd.v_t.unwrap();
        (0..2).map(|k| vt[(i, k)] / sizes[k]).collect()
    };
    let combine = |vs: &[Vector3<f64>]| vs.iter().zip(&alpha).fold(Vector3::zeros(), |acc, (v, a)| acc + v * *a);
    let u: Vec<Vector3<f64>> = (0..grid.len()).map(|g| combine(&profiles.iter().map(|p| p[g]).collect::<Vec<_>>())).collect();
    let end = combine(&ends);
    let peak = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tail_ratio = end.norm() / peak;
    let radii: Vec<f64> = grid.iter().map(|w| w + bolt).collect();
    let max_relative_error = match quoted_integral(family, duality) {
        Some(_) => {
            let cf: Vec<Vector3<f64>> = radii
                .iter()
                .map(|r| closed_form_u(family, duality, r).map(|t| Vector3::new(t.u1, t.u2, t.u3)))
                .collect::<Result<_>>()?;
            let lambda = cf.iter().zip(&u).map(|(c, v)| c.dot(v)).sum::<f64>() / u.iter().map(|v| v.dot(v)).sum::<f64>();
            Some(cf.iter().zip(&u).map(|(c, v)| (c - v * lambda).norm() / c.norm()).fold(0.0, f64::max))
        }
        None => None,
    };
    let profile = HarmonicProfile {
        family,
        duality,
        bolt_exponents: bolt_exp,
        infinity_exponents: inf_exp,
        regular_dimension: n,
        radii,
        u: u.iter().map(|v| [v[0], v[1], v[2]]).collect(),
        tail_ratio,
        max_relative_error,
    };
    if tail_ratio > 1e-6 {
        return Err(Error::NotNormalisable(format!(
            "{} {}: the solution regular at the bolt tends to a nonzero constant (|u(R)|/max|u| = {tail_ratio:.3e} at R = {})",
            family.name(),
            duality.name(),
            opts.r_outer
        )));
    }
    Ok(profile)
}

/// Null vector `k` with `k·u(r) = 0` at every sample, if the sample matrix
/// has rank 2 (normalised so that `k₁ = 1`).
pub fn linear_relation(family: HarmonicFamily, duality: Duality) -> Result<Option<[f64; 3]>> {
    let bolt = family.bolt() as f64;
    let rs: Vec<f64> = (0..24).map(|i| bolt + 0.05 * (1.35f64).powi(i)).collect();
    let mut m = nalgebra::DMatrix::<f64>::zeros(rs.len(), 3);
    for (i, r) in rs.iter().enumerate() {
        let u = closed_form_u(family, duality, r)?;
        let n = (u.u1 * u.u1 + u.u2 * u.u2 + u.u3 * u.u3).sqrt();
        m[(i, 0)] = u.u1 / n;
        m[(i, 1)] = u.u2 / n;
        m[(i, 2)] = u.u3 / n;
    }
    let svd = m.svd(false, true);
    let (i, smin) = svd.singular_values.argmin();
    if smin > 1e-10 * svd.singular_values.max() {
        return Ok(None);
    }
    let v = svd.v_t.unwrap().row(i).transpose();
    Ok(Some([1.0, v[1] / v[0], v[2] / v[0]]))
}
