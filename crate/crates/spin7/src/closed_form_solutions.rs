//! The general local solution in hypergeometric form.
//!
//! With `f = c²`, `ρ = df/dr` and the auxiliary variables `(z, v)`, the
//! third-order equation for `f` collapses to
//!
//! ```text
//! 2z(1 − z²) dv/dz = v + 2z
//! v = 2k√z (1 − z²)^{−1/4} − 2z ₂F₁(1, ½; 5/4; 1 − z²)
//! ```
//!
//! and the metric is recovered algebraically from `(z, v, f)`. Regular
//! solutions flowing to the asymptotic region from above `z = 1` are written
//! in `y = 1/z` with `v = (1 − y²)^{−1/4}(κ + y ₂F₁(½, ¾; 3/2; y²))`.
//!
//! Both charts are evaluated in the offset variable `u = 1 − z` (resp.
//! `1 − y`), which is where all interesting behaviour (bolts excepted)
//! accumulates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature;
use crate::scalar::Scalar;
use crate::special::{f_half_quarter, f_half_three_quarter, hyp2f1, hyp2f1_deriv, Real};
use crate::triad::TriadJet;

pub use crate::special::kappa_bar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    A8,
    B8,
    B8Minus,
    B8Plus,
    G2Limit,
    Singular,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::A8 => "A8",
            Branch::B8 => "B8",
            Branch::B8Minus => "B8minus",
            Branch::B8Plus => "B8plus",
            Branch::G2Limit => "G2limit",
            Branch::Singular => "singular",
        }
    }
}

/// The non-trivial integration constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Constant {
    /// `k` of the `z` chart; `f64::INFINITY` selects the G₂ × S¹ limit.
    K(f64),
    /// `κ` of the `y = 1/z` chart.
    Kappa(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionParams {
    pub constant: Constant,
    /// `c₀` in `f ≈ c₀ (1 − z)^{−1/2}` as `z → 1`.
    pub f_norm: f64,
    /// Needed only to tell A8 from B8 at `k = 0`, where both sit at `z = 1`.
    pub branch: Option<Branch>,
}

impl SolutionParams {
    pub fn k(k: f64) -> Self {
        SolutionParams { constant: Constant::K(k), f_norm: 1.0, branch: None }
    }

    pub fn kappa(kappa: f64) -> Self {
        SolutionParams { constant: Constant::Kappa(kappa), f_norm: 1.0, branch: None }
    }

    pub fn with_f_norm(mut self, c0: f64) -> Self {
        self.f_norm = c0;
        self
    }

    pub fn with_branch(mut self, b: Branch) -> Self {
        self.branch = Some(b);
        self
    }

    fn chart(&self) -> Chart {
        match self.constant {
            Constant::K(_) => Chart::Z,
            Constant::Kappa(_) => Chart::Y,
        }
    }

    fn value(&self) -> f64 {
        match self.constant {
            Constant::K(k) => k,
            Constant::Kappa(k) => k,
        }
    }
}

/// Coordinate chart of the general solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Z,
    Y,
}

/// `v(z)`; requires `z > 0`, `z ≠ 1`.
pub fn v_of_z<R: Real>(k: R, z: R) -> Result<R> {
    if !(z > R::zero()) {
        return Err(Error::Domain(format!("z = {z:?}: √z needs z > 0")));
    }
    if z == R::one() {
        return Err(Error::Domain("z = 1 is singular; use the offset form".into()));
    }
    v_of_z_offset(k, R::one() - z)
}

/// `v` at `z = 1 − δ`, with `1 − z² = δ(2 − δ)` formed without cancellation.
pub fn v_of_z_offset<R: Real>(k: R, delta: R) -> Result<R> {
    let (one, two) = (R::one(), R::lit(2.0));
    let z = one - delta;
    if !(z > R::zero()) || delta == R::zero() {
        return Err(Error::Domain(format!("δ = {delta:?} outside the z chart")));
    }
    let x = delta * (two - delta);
    let hom = if k == R::zero() { R::zero() } else { (two * k * z.sqrt()).quot(x.abs().sqrt().sqrt()) };
    // the complement of 1 − z² is z², exact in the offset
    let f = if x > R::lit(0.5) { f_half_quarter(z * z, true)? } else { f_half_quarter(x, false)? };
    Ok(hom - two * z * f)
}

/// `dv/dz` by differentiating the closed form.
pub fn dv_dz(k: f64, z: f64) -> Result<f64> {
    let x = 1.0 - z * z;
    if !(z > 0.0) || x == 0.0 {
        return Err(Error::Domain(format!("z = {z}")));
    }
    let hom = 2.0 * k * z.sqrt() / x.abs().powf(0.25);
    Ok(hom / (2.0 * z * x) - 2.0 * hyp2f1(1.0, 0.5, 1.25, x)? + 4.0 * z * z * hyp2f1_deriv(1.0, 0.5, 1.25, x)?)
}

/// `v(y)` on the `y = 1/z` chart; requires `|y| < 1`.
pub fn v_of_y<R: Real>(kappa: R, y: R) -> Result<R> {
    if !(y.abs() < R::one()) {
        return Err(Error::Domain(format!("|y| = {:?} ≥ 1", y.abs())));
    }
    v_of_y_offset(kappa, R::one() - y)
}

/// `v` at `y = 1 − η`.
pub fn v_of_y_offset<R: Real>(kappa: R, eta: R) -> Result<R> {
    let two = R::lit(2.0);
    let y = R::one() - eta;
    if !(eta > R::zero() && eta < two) {
        return Err(Error::Domain(format!("η = {eta:?} outside (0, 2)")));
    }
    let x = eta * (two - eta);
    let f = if x < R::lit(0.5) { f_half_three_quarter(x, true)? } else { f_half_three_quarter(y * y, false)? };
    Ok((kappa + y * f).quot(x.sqrt().sqrt()))
}

/// `dv/dy` by differentiating the closed form.
pub fn dv_dy(kappa: f64, y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("y = {y}")));
    }
    dv_dy_offset(kappa, 1.0 - y)
}

/// `dv/dy` at `y = 1 − η`, using `d/dy [y ₂F₁(½, ¾; 3/2; y²)] = (1 − y²)^{−3/4}`.
pub fn dv_dy_offset(kappa: f64, eta: f64) -> Result<f64> {
    let x = eta * (2.0 - eta);
    let y = 1.0 - eta;
    let v = v_of_y_offset(kappa, eta)?;
    Ok(y * v / (2.0 * x) + 1.0 / x)
}

/// `v` in the chart's offset variable.
pub fn v_at(chart: Chart, constant: f64, u: f64) -> Result<f64> {
    match chart {
        Chart::Z => v_of_z_offset(constant, u),
        Chart::Y => v_of_y_offset(constant, u),
    }
}

/// `∫₀ᵘ dũ / (v ũ(2 − ũ))` (the exponent of `f`), via `ũ = s⁴`, which makes
/// the integrand regular at the asymptotic end.
fn f_exponent(chart: Chart, constant: f64, u: f64) -> Result<f64> {
    // v must keep its sign on (0, u]; a zero is a pole of the integrand
    let mut last = None;
    for i in 0..=64 {
        let w = u * 10f64.powf(-12.0 * i as f64 / 64.0);
        let v = v_at(chart, constant, w)?;
        if last.is_some_and(|p: f64| (p > 0.0) != (v > 0.0)) || v == 0.0 {
            return Err(Error::SingularTrajectory(format!("v vanishes between the asymptotic end and u = {u}")));
        }
        last = Some(v);
    }
    let mut bad = None;
    let integrand = |s: f64| {
        let w = s * s * s * s;
        match v_at(chart, constant, w) {
            Ok(v) if v != 0.0 && v.is_finite() => 4.0 / (s * v * (2.0 - w)),
            Ok(v) => {
                bad.get_or_insert(format!("v = {v} on the integration path at u = {w}"));
                f64::NAN
            }
            Err(e) => {
                bad.get_or_insert(e.to_string());
                f64::NAN
            }
        }
    };
    let res = quadrature::integrate(integrand, 0.0, u.powf(0.25), 1e-13, 1e-16);
    if let Some(msg) = bad {
        return Err(Error::SingularTrajectory(msg));
    }
    Ok(res?.value)
}

/// `f = c²` at offset `u`: `c₀ ((2 − u)/2)^{1/2} u^{−1/2} exp(−∫₀ᵘ dũ/(v ũ(2 − ũ)))`.
pub fn f_at(chart: Chart, constant: f64, c0: f64, u: f64) -> Result<f64> {
    if u <= 0.0 || u >= 2.0 {
        return Err(Error::Domain(format!("offset u = {u} outside (0, 2)")));
    }
    if chart == Chart::Z && constant == 0.0 {
        return Err(Error::Domain("k = 0: z is frozen at 1 and is not a coordinate".into()));
    }
    let i = f_exponent(chart, constant, u)?;
    Ok(c0 * ((2.0 - u) / 2.0).sqrt() / u.sqrt() * (-i).exp())
}

pub fn f_of_z(params: &SolutionParams, z: f64) -> Result<f64> {
    match params.constant {
        Constant::K(k) if k.is_infinite() => Ok(params.f_norm * ((1.0 + z) / 2.0).sqrt() / (1.0 - z).sqrt()),
        Constant::K(k) => f_at(Chart::Z, k, params.f_norm, 1.0 - z),
        Constant::Kappa(_) => Err(Error::Domain("κ parameterises the y chart; use f_of_y".into())),
    }
}

pub fn f_of_y(params: &SolutionParams, y: f64) -> Result<f64> {
    match params.constant {
        Constant::Kappa(kappa) => f_at(Chart::Y, kappa, params.f_norm, 1.0 - y),
        Constant::K(_) => Err(Error::Domain("k parameterises the z chart; use f_of_z".into())),
    }
}

/// Metric coefficients of `g dx² + R₁₂(R₁² + R₂²) + R₃·R₃² + S₄·Pₐ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricCoefficients {
    pub g: f64,
    pub r12: f64,
    pub r3: f64,
    pub s4: f64,
}

fn coefficients(chart: Chart, u: f64, v: f64, f: f64) -> Result<MetricCoefficients> {
    if v == 0.0 || v == 2.0 {
        return Err(Error::Domain(format!("v = {v} is a bolt/degenerate locus")));
    }
    let x = u * (2.0 - u);
    let (g, r12) = match chart {
        Chart::Z => {
            let z = 1.0 - u;
            (v * f / (4.0 * z * x * u * (v - 2.0)), 4.0 * (v - 2.0) * z * f / ((2.0 - u) * v))
        }
        Chart::Y => (v * f / (4.0 * x * u * (v - 2.0)), 4.0 * (v - 2.0) * f / ((2.0 - u) * v)),
    };
    Ok(MetricCoefficients { g, r12, r3: 4.0 * r12 / (v * v), s4: f })
}

/// Coefficients of the general metric at `z` (`g` is `g_zz`).
pub fn metric_from_zv(params: &SolutionParams, z: f64) -> Result<MetricCoefficients> {
    let k = match params.constant {
        Constant::K(k) => k,
        Constant::Kappa(_) => return Err(Error::Domain("κ parameterises the y chart".into())),
    };
    if k.is_infinite() {
        return Err(Error::Domain("k = ∞ has no finite metric; use g2_limit_coefficients".into()));
    }
    metric_at(params, 1.0 - z)
}

/// Coefficients at offset `u` in the chart selected by `params` (`g` is `g_uu`).
pub fn metric_at(params: &SolutionParams, u: f64) -> Result<MetricCoefficients> {
    let chart = params.chart();
    let v = v_at(chart, params.value(), u)?;
    let f = f_at(chart, params.value(), params.f_norm, u)?;
    coefficients(chart, u, v, f)
}

/// The rescaled `k → ∞` metric: `(g_zz, R₁₂, k²R₃/4 → 1, S₄)`.
pub fn g2_limit_coefficients(z: f64) -> MetricCoefficients {
    let x = 1.0 - z * z;
    MetricCoefficients {
        g: 1.0 / (4.0 * z * (1.0 - z).powi(2) * x.sqrt()),
        r12: 4.0 * z / x.sqrt(),
        r3: 1.0,
        s4: ((1.0 + z) / (1.0 - z)).sqrt(),
    }
}

/// The G₂ 7-metric written in `r`, `r⁴ = (1 + z)/(1 − z)`:
/// `(g_rr, R₁₂, 1, S₄) = (2/(1 − r⁻⁴), 2r²(1 − r⁻⁴), 1, r²)`.
pub fn g2_seven_metric(r: f64) -> MetricCoefficients {
    let h = 1.0 - r.powi(-4);
    MetricCoefficients { g: 2.0 / h, r12: 2.0 * r * r * h, r3: 1.0, s4: r * r }
}

/// The general solution at large `k`, rescaled (`k²R₃/4`) and rewritten in
/// the radial variable `r⁴ = (1 + z)/(1 − z)`; tends to [`g2_seven_metric`].
pub fn large_k_metric_in_r(k: f64, r: f64) -> Result<MetricCoefficients> {
    let r4 = r.powi(4);
    if !(r > 1.0) {
        return Err(Error::Domain(format!("r = {r} must exceed 1")));
    }
    // 1 − z = 2/(r⁴ + 1) formed directly; dz/dr = 8r³/(r⁴ + 1)²
    let u = 2.0 / (r4 + 1.0);
    // c₀ = √2 puts f on (1 + z)^{1/2}(1 − z)^{−1/2} at leading order
    let m = metric_at(&SolutionParams::k(k).with_f_norm(std::f64::consts::SQRT_2), u)?;
    let dz = 8.0 * r * r * r / ((r4 + 1.0) * (r4 + 1.0));
    Ok(MetricCoefficients { g: m.g * dz * dz, r12: m.r12, r3: k * k * m.r3 / 4.0, s4: m.s4 })
}

/// The small-`k` member of the `z` family under
/// `z = 1 − 16ε⁴ℓ̃⁴(r + ℓ̃)⁻⁴`, `k = 2^{1/4}ε`, `c₀ = 2ε²ℓ̃²`, with `g` the
/// `g_rr` component. As `ε → 0` this is the B8 metric in its own radius.
pub fn small_k_metric_in_r(eps: f64, ellt: f64, r: f64) -> Result<MetricCoefficients> {
    let s = r + ellt;
    let u = 16.0 * (eps * ellt / s).powi(4);
    let params = SolutionParams::k(2f64.powf(0.25) * eps).with_f_norm(2.0 * eps * eps * ellt * ellt);
    let m = metric_at(&params, u)?;
    let dz = 4.0 * u / s;
    Ok(MetricCoefficients { g: m.g * dz * dz, ..m })
}

/// `(v, f)` as jets in the offset variable, from the first-order system
/// `dv/du`, `df/du` implied by the closed forms.
fn vf_jets(chart: Chart, u0: f64, v0: f64, f0: f64) -> (Jet<f64>, Jet<f64>, Jet<f64>) {
    let u = Jet::variable(u0);
    let two = Jet::constant(2.0);
    let x = u.clone() * (two.clone() - u.clone());
    let one = Jet::one();
    let mut v = Jet::new(&[v0]);
    let mut f = Jet::new(&[f0]);
    for _ in 0..3 {
        let dv = match chart {
            Chart::Z => {
                let z = one.clone() - u.clone();
                -(v.clone() + two.clone() * z.clone()) / (two.clone() * z * x.clone())
            }
            Chart::Y => {
                let y = one.clone() - u.clone();
                -(y * v.clone() + two.clone()) / (two.clone() * x.clone())
            }
        };
        let df = -(f.clone() * (v.clone() + one.clone())) / (v.clone() * x.clone());
        let mut ve = vec![v0];
        ve.extend_from_slice(dv.entries());
        let mut fe = vec![f0];
        fe.extend_from_slice(df.entries());
        v = Jet::new(&ve);
        f = Jet::new(&fe);
    }
    (u, v, f)
}

/// The triad `(a, b, c)` with three `t`-derivatives at offset `u`, obtained by
/// reparametrising the closed-form `u`-jets through `dt = √g_uu du`
/// (`t` increases towards the asymptotic region, i.e. as `u` decreases).
pub fn triad_at(params: &SolutionParams, u0: f64) -> Result<TriadJet<f64>> {
    let chart = params.chart();
    let v0 = v_at(chart, params.value(), u0)?;
    let f0 = f_at(chart, params.value(), params.f_norm, u0)?;
    triad_from_vf(chart, u0, v0, f0)
}

pub(crate) fn triad_from_vf(chart: Chart, u0: f64, v0: f64, f0: f64) -> Result<TriadJet<f64>> {
    coefficients(chart, u0, v0, f0)?;
    let (u, v, f) = vf_jets(chart, u0, v0, f0);
    let two = Jet::constant(2.0);
    let x = u.clone() * (two.clone() - u.clone());
    let vm2 = v.clone() - two.clone();
    let (g, r12) = match chart {
        Chart::Z => {
            let z = Jet::one() - u.clone();
            (
                v.clone() * f.clone() / (Jet::constant(4.0) * z.clone() * x * u.clone() * vm2.clone()),
                Jet::constant(4.0) * vm2 * z * f.clone() / ((two.clone() - u.clone()) * v.clone()),
            )
        }
        Chart::Y => (
            v.clone() * f.clone() / (Jet::constant(4.0) * x * u.clone() * vm2.clone()),
            Jet::constant(4.0) * vm2 * f.clone() / ((two.clone() - u.clone()) * v.clone()),
        ),
    };
    if *g.value() <= 0.0 || *r12.value() <= 0.0 || *f.value() <= 0.0 {
        return Err(Error::Domain(format!("non-Riemannian point: g = {}, R12 = {}", g.value(), r12.value())));
    }
    let a_u = r12.sqrt() / two.clone();
    let b_u = two * a_u.clone() / v;
    let c_u = f.sqrt();
    let h = -g.truncate(3).sqrt().recip();
    let ut = Jet::integral_curve(u0, &h);
    Ok(TriadJet::new(ut.compose(&a_u), ut.compose(&b_u), ut.compose(&c_u)))
}

/// `2f²f‴ + 2f(f′−3)f″ − (f′+1)(f′−1)(f′−3)`.
pub fn ode19_residual<S: Scalar>(f: &S, f1: &S, f2: &S, f3: &S) -> S {
    let k = |n| S::int(n);
    k(2) * f.clone() * f.clone() * f3.clone() + k(2) * f.clone() * (f1.clone() - k(3)) * f2.clone()
        - (f1.clone() + k(1)) * (f1.clone() - k(1)) * (f1.clone() - k(3))
}

/// `Q = 2fW′ + (f′−3)W` with `W = f′ − 1`.
pub fn q_function<S: Scalar>(f: &S, f1: &S, f2: &S) -> S {
    S::int(2) * f.clone() * f2.clone() + (f1.clone() - S::int(3)) * (f1.clone() - S::int(1))
}

/// The phase-plane field `(dz/dτ, dv/dτ) = (2z(1 − z²), v + 2z)`.
pub fn phase_field<S: Scalar>(z: &S, v: &S) -> (S, S) {
    let two = S::int(2);
    (two.clone() * z.clone() * (S::one() - z.clone() * z.clone()), v.clone() + two * z.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoltData {
    /// Bolt location in the chart (`z₀` or `y₀`).
    pub position: f64,
    /// `dv/dz` (or `dv/dy`) at the bolt, from the closed form.
    pub v_prime: f64,
    /// `z₀(1 − z₀)v′(z₀) − 1` (resp. `(1 − y₀)v′(y₀) − 1`).
    pub bolt_relation: f64,
    /// `f` at the bolt: the squared radius of the surviving S⁴ (0 for a nut).
    pub s4_coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub branch: Branch,
    pub z0: Option<f64>,
    pub y0: Option<f64>,
    pub bolt: Option<BoltData>,
    /// Limit of the `R₃²` coefficient at large distance (`4b∞²`).
    pub asymptotic_r3: Option<f64>,
    pub diagnostic: Option<String>,
}

impl Classification {
    fn singular(msg: String) -> Self {
        Classification { branch: Branch::Singular, z0: None, y0: None, bolt: None, asymptotic_r3: None, diagnostic: Some(msg) }
    }

    /// Circle radius `b∞` at infinity.
    pub fn asymptotic_circle_radius(&self) -> Option<f64> {
        self.asymptotic_r3.map(|c| c.sqrt() / 2.0)
    }
}

/// Bisection on a sign change of `g`, to absolute width `tol`.
fn bisect<G: FnMut(f64) -> Result<f64>>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut glo = g(lo)?;
    for _ in 0..400 {
        if (hi - lo).abs() <= tol * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `v = 2` in the offset variable of `chart`, bracketed on a
/// log-spaced grid of `u ∈ (0, u_max)` and refined by bisection.
fn bolt_offset(chart: Chart, constant: f64, u_max: f64) -> Result<f64> {
    let g = |u: f64| v_at(chart, constant, u).map(|v| v - 2.0);
    let top = u_max * (1.0 - 1e-12);
    let grid: Vec<f64> = (0..=400).map(|i| top * 10f64.powf(-30.0 * (1.0 - i as f64 / 400.0))).collect();
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &u in &grid {
        let val = g(u)?;
        if let Some((pu, pv)) = prev {
            if (pv > 0.0) != (val > 0.0) {
                brackets.push((pu, u));
            }
        }
        prev = Some((u, val));
    }
    match brackets.as_slice() {
        [] => Err(Error::NoRoot(format!("v − 2 keeps one sign on u ∈ [1e-30·{u_max}, {u_max}]"))),
        [(lo, hi)] => bisect(g, *lo, *hi, 1e-14),
        _ => Err(Error::NoRoot(format!("v − 2 changes sign {} times; expected a single crossing", brackets.len()))),
    }
}

/// Branch of the general solution selected by `params`, with bolt data.
pub fn classify(params: &SolutionParams) -> Result<Classification> {
    let c0 = params.f_norm;
    match params.constant {
        Constant::K(k) if k.is_infinite() && k > 0.0 => Ok(Classification {
            branch: Branch::G2Limit,
            z0: Some(0.0),
            y0: None,
            bolt: None,
            asymptotic_r3: None,
            diagnostic: Some("circle decouples after φ → kφ; the remaining 7-metric has G₂ holonomy".into()),
        }),
        Constant::K(k) if k == 0.0 => match params.branch {
            Some(b @ (Branch::A8 | Branch::B8)) => {
                let (v, s4) = if b == Branch::A8 { (-2.0, 0.0) } else { (2.0, 4.0) };
                Ok(Classification {
                    branch: b,
                    z0: Some(1.0),
                    y0: None,
                    bolt: Some(BoltData { position: 1.0, v_prime: f64::NAN, bolt_relation: 0.0, s4_coefficient: s4 }),
                    asymptotic_r3: Some(4.0),
                    diagnostic: Some(format!("z frozen at 1; trajectory runs along v from {v}; unit scale")),
                })
            }
            _ => Ok(Classification::singular(
                "k = 0 lies on the degenerate line z = 1: select the A8 (v from −2) or B8 (v from +2) branch".into(),
            )),
        },
        Constant::K(k) if k > 0.0 => {
            let u0 = match bolt_offset(Chart::Z, k, 1.0) {
                Ok(u) => u,
                Err(e) => return Ok(Classification::singular(e.to_string())),
            };
            let z0 = 1.0 - u0;
            let vp = dv_dz(k, z0)?;
            let f0 = f_at(Chart::Z, k, c0, u0)?;
            Ok(Classification {
                branch: Branch::B8Minus,
                z0: Some(z0),
                y0: None,
                bolt: Some(BoltData { position: z0, v_prime: vp, bolt_relation: z0 * u0 * vp - 1.0, s4_coefficient: f0 }),
                asymptotic_r3: Some(2.0 * std::f64::consts::SQRT_2 * c0 / (k * k)),
                diagnostic: None,
            })
        }
        Constant::K(k) => Ok(Classification::singular(format!("k = {k} < 0: v never reaches the bolt value 2 on 0 < z < 1"))),
        Constant::Kappa(kappa) => {
            let kb = kappa_bar();
            if !(kappa > -kb && kappa <= kb) {
                return Ok(Classification::singular(format!("κ = {kappa} outside (−κ̄, κ̄] with κ̄ = {kb}")));
            }
            let u0 = if kappa == kb {
                2.0
            } else {
                match bolt_offset(Chart::Y, kappa, 2.0) {
                    Ok(u) => u,
                    Err(e) => return Ok(Classification::singular(e.to_string())),
                }
            };
            let y0 = 1.0 - u0;
            let (vp, rel, f0) = if u0 < 2.0 {
                let vp = dv_dy_offset(kappa, u0)?;
                (vp, u0 * vp - 1.0, f_at(Chart::Y, kappa, c0, u0)?)
            } else {
                (f64::NAN, 0.0, 0.0)
            };
            Ok(Classification {
                branch: Branch::B8Plus,
                z0: if y0 != 0.0 { Some(1.0 / y0) } else { None },
                y0: Some(y0),
                bolt: Some(BoltData { position: y0, v_prime: vp, bolt_relation: rel, s4_coefficient: f0 }),
                asymptotic_r3: Some(8.0 * std::f64::consts::SQRT_2 * c0 / ((kappa + kb) * (kappa + kb))),
                diagnostic: if u0 == 2.0 { Some("κ = κ̄: bolt at y₀ = −1, the Bryant–Salamon point".into()) } else { None },
            })
        }
    }
}

/// Points `(z, v)` along the trajectory of a classified solution, from the
/// short-distance end to the asymptotic region.
pub fn trajectory_points(params: &SolutionParams, n: usize) -> Result<Vec<(f64, f64)>> {
    let cls = classify(params)?;
    let n = n.max(2);
    let frac = |i: usize| i as f64 / (n - 1) as f64;
    match cls.branch {
        Branch::A8 | Branch::B8 => {
            let s = if cls.branch == Branch::A8 { -1.0 } else { 1.0 };
            Ok((0..n).map(|i| (1.0, s * (2.0 + 30.0 * frac(i)))).collect())
        }
        Branch::B8Minus => {
            let k = params.value();
            let u0 = 1.0 - cls.z0.unwrap();
            (0..n)
                .map(|i| {
                    let u = u0 * 10f64.powf(-8.0 * frac(i));
                    Ok((1.0 - u, v_of_z_offset(k, u)?))
                })
                .collect()
        }
        Branch::B8Plus => {
            let kappa = params.value();
            let u0 = (1.0 - cls.y0.unwrap()).min(2.0 - 1e-9);
            (0..n)
                .filter_map(|i| {
                    let u = u0 * 10f64.powf(-8.0 * frac(i));
                    let y = 1.0 - u;
                    (y != 0.0).then(|| v_of_y_offset(kappa, u).map(|v| (1.0 / y, v)))
                })
                .collect()
        }
        Branch::G2Limit => Ok((0..n).map(|i| (1e-6 + (1.0 - 2e-6) * frac(i), f64::INFINITY)).collect()),
        Branch::Singular => Err(Error::NoRoot(cls.diagnostic.unwrap_or_default())),
    }
}
