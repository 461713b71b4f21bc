//! First-order system for Spin(7) holonomy, its Lagrangian and superpotential.
//!
//! ```text
//! ȧ = 1 − b/(2a) − a²/c²,   ḃ = b²/(2a²) − b²/c²,   ċ = a/c + b/(2c)
//! ```
//!
//! With `α = log a, β = log b, γ = log c` and `dt = a²bc⁴ dρ`, the flow is
//! `dαⁱ/dρ = gⁱʲ ∂ⱼW` for `W = bc²(4a³ + 2a²b + 4ac² − bc²)`.

use serde::Serialize;

use crate::closed_form_solutions::ode19_residual;
use crate::curvature::ricci_flat_residual;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::ode::{integrate, OdeOptions, StepControl};
use crate::scalar::Scalar;
use crate::triad::TriadJet;

/// Which right-hand side to use. `SignFlipped` is a deliberate mutation
/// (sign of the `b/(2a)` term in `ȧ`) used to show the checks are not vacuous.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum FlowVariant {
    #[default]
    Standard,
    SignFlipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Kinetic metric in `T = ½ gᵢⱼ αⁱ′ αʲ′`.
pub const KINETIC_METRIC: [[i64; 3]; 3] = [[4, 4, 16], [4, 0, 8], [16, 8, 24]];

/// Inverse kinetic metric (exact).
pub fn inverse_kinetic_metric<S: Scalar>() -> [[S; 3]; 3] {
    let q = |n, d| S::ratio(n, d);
    [[q(-1, 6), q(1, 12), q(1, 12)], [q(1, 12), q(-5, 12), q(1, 12)], [q(1, 12), q(1, 12), q(-1, 24)]]
}

pub fn flow_rhs_jets<S: Scalar>(a: &Jet<S>, b: &Jet<S>, c: &Jet<S>, variant: FlowVariant) -> Result<[Jet<S>; 3]> {
    if a.value().is_zero() || c.value().is_zero() {
        return Err(Error::SingularTrajectory("a or c vanishes".into()));
    }
    let one = Jet::one();
    let two = Jet::ratio(2, 1);
    let half_b_over_a = b.clone() / (two.clone() * a.clone());
    let a2c2 = a.clone() * a.clone() / (c.clone() * c.clone());
    let da = match variant {
        FlowVariant::Standard => one - half_b_over_a - a2c2,
        FlowVariant::SignFlipped => one + half_b_over_a - a2c2,
    };
    let b2 = b.clone() * b.clone();
    let db = b2.clone() / (two.clone() * a.clone() * a.clone()) - b2 / (c.clone() * c.clone());
    let dc = a.clone() / c.clone() + b.clone() / (two * c.clone());
    Ok([da, db, dc])
}

/// `(ȧ, ḃ, ċ)`.
pub fn flow_rhs<S: Scalar>(a: &S, b: &S, c: &S) -> Result<[S; 3]> {
    flow_rhs_variant(a, b, c, FlowVariant::Standard)
}

pub fn flow_rhs_variant<S: Scalar>(a: &S, b: &S, c: &S, variant: FlowVariant) -> Result<[S; 3]> {
    let j = |x: &S| Jet::new(&[x.clone()]);
    let [x, y, z] = flow_rhs_jets(&j(a), &j(b), &j(c), variant)?;
    Ok([x.value().clone(), y.value().clone(), z.value().clone()])
}

/// Triad jet (value and three derivatives) of the flow line through `(a, b, c)`,
/// obtained by differentiating the right-hand side.
pub fn flow_triad<S: Scalar>(a: &S, b: &S, c: &S, variant: FlowVariant) -> Result<TriadJet<S>> {
    let mut jets = [Jet::new(&[a.clone()]), Jet::new(&[b.clone()]), Jet::new(&[c.clone()])];
    let base = [a.clone(), b.clone(), c.clone()];
    for _ in 0..3 {
        let rhs = flow_rhs_jets(&jets[0], &jets[1], &jets[2], variant)?;
        for i in 0..3 {
            let mut e = vec![base[i].clone()];
            e.extend_from_slice(rhs[i].entries());
            jets[i] = Jet::new(&e);
        }
    }
    let [ja, jb, jc] = jets;
    Ok(TriadJet::new(ja, jb, jc))
}

fn w_jet<S: Scalar>(a: &Jet<S>, b: &Jet<S>, c: &Jet<S>) -> Jet<S> {
    let k = |n| Jet::ratio(n, 1);
    let c2 = c.clone() * c.clone();
    let inner = k(4) * a.clone() * a.clone() * a.clone()
        + k(2) * a.clone() * a.clone() * b.clone()
        + k(4) * a.clone() * c2.clone()
        - b.clone() * c2.clone();
    b.clone() * c2 * inner
}

fn v_jet<S: Scalar>(a: &Jet<S>, b: &Jet<S>, c: &Jet<S>) -> Jet<S> {
    let k = |n| Jet::ratio(n, 1);
    let a2 = a.clone() * a.clone();
    let a4 = a2.clone() * a2.clone();
    let b2 = b.clone() * b.clone();
    let c2 = c.clone() * c.clone();
    let c4 = c2.clone() * c2.clone();
    let inner = k(4) * a4.clone() * a2.clone() + k(2) * a4.clone() * b2.clone() - k(24) * a4 * c2
        + (b2.clone() - k(4) * a2) * c4.clone();
    Jet::ratio(1, 2) * b2 * c4 * inner
}

pub fn superpotential<S: Scalar>(a: &S, b: &S, c: &S) -> S {
    let j = |x: &S| Jet::new(&[x.clone()]);
    w_jet(&j(a), &j(b), &j(c)).value().clone()
}

pub fn potential<S: Scalar>(a: &S, b: &S, c: &S) -> S {
    let j = |x: &S| Jet::new(&[x.clone()]);
    v_jet(&j(a), &j(b), &j(c)).value().clone()
}

/// `(∂F/∂α, ∂F/∂β, ∂F/∂γ)` via dual numbers (`∂_α = a ∂_a`).
fn log_gradient<S: Scalar>(f: fn(&Jet<S>, &Jet<S>, &Jet<S>) -> Jet<S>, a: &S, b: &S, c: &S) -> [S; 3] {
    let x = [a.clone(), b.clone(), c.clone()];
    std::array::from_fn(|i| {
        let j: [Jet<S>; 3] = std::array::from_fn(|k| {
            if k == i {
                Jet::new(&[x[k].clone(), x[k].clone()])
            } else {
                Jet::new(&[x[k].clone(), S::zero()])
            }
        });
        f(&j[0], &j[1], &j[2]).deriv(1).clone()
    })
}

pub fn superpotential_gradient<S: Scalar>(a: &S, b: &S, c: &S) -> [S; 3] {
    log_gradient(w_jet, a, b, c)
}

pub fn potential_gradient<S: Scalar>(a: &S, b: &S, c: &S) -> [S; 3] {
    log_gradient(v_jet, a, b, c)
}

/// Lagrangian data at a point `(α, β, γ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagrangianData {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub g: [[i64; 3]; 3],
    pub v: f64,
    pub w: f64,
}

impl LagrangianData {
    pub fn at(alpha: f64, beta: f64, gamma: f64) -> Self {
        let (a, b, c) = (alpha.exp(), beta.exp(), gamma.exp());
        LagrangianData { alpha, beta, gamma, g: KINETIC_METRIC, v: potential(&a, &b, &c), w: superpotential(&a, &b, &c) }
    }
}

/// `V + ½ gⁱʲ ∂ᵢW ∂ⱼW` (vanishes identically).
pub fn superpotential_identity<S: Scalar>(a: &S, b: &S, c: &S) -> S {
    let dw = superpotential_gradient(a, b, c);
    let gi = inverse_kinetic_metric::<S>();
    let mut q = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            q = q + gi[i][j].clone() * dw[i].clone() * dw[j].clone();
        }
    }
    potential(a, b, c) + S::ratio(1, 2) * q
}

/// `|V + ½ gⁱʲ ∂ᵢW ∂ⱼW|` at a point of the Lagrangian.
pub fn superpotential_check(point: &LagrangianData) -> f64 {
    let (a, b, c) = (point.alpha.exp(), point.beta.exp(), point.gamma.exp());
    superpotential_identity(&a, &b, &c).abs()
}

/// The gradient flow `dαⁱ/dρ = gⁱʲ∂ⱼW` mapped back to `t` (`dt = a²bc⁴ dρ`).
pub fn gradient_flow_in_t<S: Scalar>(a: &S, b: &S, c: &S) -> [S; 3] {
    let dw = superpotential_gradient(a, b, c);
    let gi = inverse_kinetic_metric::<S>();
    let n = a.clone() * a.clone() * b.clone() * c.clone() * c.clone() * c.clone() * c.clone();
    let x = [a.clone(), b.clone(), c.clone()];
    std::array::from_fn(|i| {
        let mut s = S::zero();
        for j in 0..3 {
            s = s + gi[i][j].clone() * dw[j].clone();
        }
        x[i].clone() * s / n.clone()
    })
}

/// `αⁱ′ = dαⁱ/dρ` as jets in `t` (one order lower than the triad).
fn log_velocities<S: Scalar>(t: &TriadJet<S>) -> [Jet<S>; 3] {
    let n = t.a.clone() * t.a.clone() * t.b.clone() * t.c.clone() * t.c.clone() * t.c.clone() * t.c.clone();
    [&t.a, &t.b, &t.c].map(|x| x.derivative() / x.clone() * n.clone())
}

/// `T + V` (the Hamiltonian constraint).
pub fn kinetic_plus_potential<S: Scalar>(t: &TriadJet<S>) -> S {
    let v = log_velocities(t).map(|j| j.value().clone());
    let mut kin = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            kin = kin + S::int(KINETIC_METRIC[i][j]) * v[i].clone() * v[j].clone();
        }
    }
    let [a, b, c] = t.values();
    S::ratio(1, 2) * kin + potential(&a, &b, &c)
}

/// Relative residual of `gᵢⱼ αʲ″ + ∂ᵢV = 0` (needs second derivatives).
pub fn euler_lagrange_residual<S: Scalar>(t: &TriadJet<S>) -> Result<f64> {
    if t.order() < 3 {
        return Err(Error::Domain("Euler–Lagrange residual needs second derivatives".into()));
    }
    let n = t.a.clone() * t.a.clone() * t.b.clone() * t.c.clone() * t.c.clone() * t.c.clone() * t.c.clone();
    let vel = log_velocities(t);
    let acc: Vec<S> = vel.iter().map(|v| (v.derivative() * n.clone()).value().clone()).collect();
    let [a, b, c] = t.values();
    let dv = potential_gradient(&a, &b, &c);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..3 {
        let mut lhs = S::zero();
        for j in 0..3 {
            let term = S::int(KINETIC_METRIC[i][j]) * acc[j].clone();
            scale = scale.max(term.to_f64().abs());
            lhs = lhs + term;
        }
        scale = scale.max(dv[i].to_f64().abs());
        worst = worst.max((lhs + dv[i].clone()).to_f64().abs());
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

/// Along a flow line: relative residuals of the third-order equation for
/// `f = c²` and of the factorised form `fQ′ − (f′+1)Q = 0`.
pub fn factorised_residuals<S: Scalar>(t: &TriadJet<S>) -> Result<(f64, f64)> {
    if t.order() < 4 {
        return Err(Error::Domain("needs third derivatives".into()));
    }
    if t.b.value().is_zero() {
        return Err(Error::Domain("r = ∫b dt is not a coordinate where b = 0".into()));
    }
    let ddr = |x: &Jet<S>| x.derivative() / t.b.clone();
    let f = t.c.clone() * t.c.clone();
    let f1 = ddr(&f);
    let f2 = ddr(&f1);
    let f3 = ddr(&f2);
    let g = |j: &Jet<S>| j.value().clone();
    let r19 = ode19_residual(&g(&f), &g(&f1), &g(&f2), &g(&f3));
    let scale19 = [
        S::int(2) * g(&f) * g(&f) * g(&f3),
        S::int(2) * g(&f) * (g(&f1) - S::int(3)) * g(&f2),
        (g(&f1) + S::int(1)) * (g(&f1) - S::int(1)) * (g(&f1) - S::int(3)),
    ]
    .iter()
    .map(|x| x.to_f64().abs())
    .fold(0.0, f64::max);
    let two = Jet::ratio(2, 1);
    let q = two * f.truncate(2) * f2.clone() + (f1.truncate(2) - Jet::ratio(3, 1)) * (f1.truncate(2) - Jet::one());
    let dq = ddr(&q);
    let lhs = g(&f) * g(&dq);
    let rhs = (g(&f1) + S::int(1)) * g(&q);
    let scale_q = lhs.to_f64().abs().max(rhs.to_f64().abs());
    let rq = (lhs - rhs).to_f64().abs();
    let rel = |r: f64, s: f64| if s == 0.0 { r } else { r / s };
    Ok((rel(r19.to_f64().abs(), scale19), rel(rq, scale_q)))
}

/// One accepted integration point with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowPoint {
    pub state: FlowState,
    pub ricci_residual: f64,
    pub el_residual: f64,
    pub t_plus_v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<FlowPoint>,
    /// Why integration stopped early, if it did.
    pub diagnostic: Option<String>,
}

impl Trajectory {
    pub fn last(&self) -> &FlowPoint {
        self.points.last().expect("trajectory has at least the initial point")
    }

    pub fn max_ricci(&self) -> f64 {
        self.points.iter().map(|p| p.ricci_residual).fold(0.0, f64::max)
    }

    pub fn max_el(&self) -> f64 {
        self.points.iter().map(|p| p.el_residual).fold(0.0, f64::max)
    }

    /// `|T + V|` relative to `|V|`.
    pub fn max_constraint(&self) -> f64 {
        self.points.iter().map(|p| p.t_plus_v).fold(0.0, f64::max)
    }
}

/// Diagnostics of the point `(a, b, c)` on a flow line.
pub fn diagnose(state: FlowState, variant: FlowVariant) -> Result<FlowPoint> {
    let tri = flow_triad(&state.a, &state.b, &state.c, variant)?;
    let v = potential(&state.a, &state.b, &state.c);
    let tv = kinetic_plus_potential(&tri);
    Ok(FlowPoint {
        state,
        ricci_residual: ricci_flat_residual(&tri)?,
        el_residual: euler_lagrange_residual(&tri)?,
        t_plus_v: if v == 0.0 { tv.abs() } else { (tv / v).abs() },
    })
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub tol: f64,
    pub variant: FlowVariant,
    /// Compute curvature diagnostics at every accepted step.
    pub diagnostics: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { tol: 1e-10, variant: FlowVariant::Standard, diagnostics: true }
    }
}

/// Adaptive integration of the flow from `s0` to `t_end`.
pub fn integrate_flow(s0: FlowState, t_end: f64, opts: &FlowOptions) -> Result<Trajectory> {
    let scale = s0.a.abs().max(s0.c.abs());
    let guard = 1e-9 * scale;
    let variant = opts.variant;
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        if y[0].abs() < guard || y[2].abs() < guard || !y.iter().all(|x| x.is_finite()) {
            return Err(format!("singular locus reached: (a, b, c) = ({}, {}, {})", y[0], y[1], y[2]));
        }
        let d = flow_rhs_variant(&y[0], &y[1], &y[2], variant).map_err(|e| e.to_string())?;
        dy.copy_from_slice(&d);
        Ok(())
    };
    let mut points = Vec::new();
    let mut failure = None;
    let ode = OdeOptions { rtol: opts.tol, atol: opts.tol * 1e-2 * scale, ..OdeOptions::default() };
    let sol = integrate(rhs, s0.t, &[s0.a, s0.b, s0.c], t_end, &ode, |t, y| {
        let st = FlowState { t, a: y[0], b: y[1], c: y[2] };
        if !opts.diagnostics {
            points.push(FlowPoint { state: st, ricci_residual: f64::NAN, el_residual: f64::NAN, t_plus_v: f64::NAN });
            return StepControl::Continue;
        }
        match diagnose(st, variant) {
            Ok(p) => {
                points.push(p);
                StepControl::Continue
            }
            Err(e) => {
                failure = Some(e.to_string());
                StepControl::Stop(e.to_string())
            }
        }
    })?;
    let diagnostic = failure.or(sol.stopped);
    if points.is_empty() {
        return Err(Error::SingularTrajectory(diagnostic.unwrap_or_default()));
    }
    Ok(Trajectory { points, diagnostic })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TruncationKind {
    AEqB,
    BToZero,
    BEqMinusA,
    AEqC,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationReport {
    pub kind: TruncationKind,
    pub first_order_consistent: bool,
    /// Extra condition under which the truncation is consistent, if any.
    pub requires: Option<String>,
    pub reduced_rhs: String,
    /// Largest violation found on the sample points.
    pub max_violation: f64,
    /// For `a = c`: residual of the compatibility condition of the three
    /// second-order equations restricted to `α = γ`.
    pub second_order_violation: Option<f64>,
}

fn samples() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for i in 0..7 {
        let x = 0.3 + 0.17 * i as f64;
        out.push((x, 0.4 + 0.11 * i as f64 * if i % 2 == 0 { 1.0 } else { -1.0 }, 1.2 - 0.05 * i as f64));
    }
    out
}

/// Consistency of the standard truncations of the flow.
pub fn truncation_report(kind: TruncationKind) -> TruncationReport {
    let mut worst: f64 = 0.0;
    match kind {
        TruncationKind::AEqB => {
            for (a, _, c) in samples() {
                let [da, db, _] = flow_rhs(&a, &a, &c).unwrap();
                worst = worst.max((da - db).abs());
            }
            TruncationReport {
                kind,
                first_order_consistent: worst < 1e-14,
                requires: None,
                reduced_rhs: "ȧ = 1/2 − a²/c², ċ = 3a/(2c)".into(),
                max_violation: worst,
                second_order_violation: None,
            }
        }
        TruncationKind::BToZero => {
            // b = λβ with λ → 0: ḃ/λ → 0 and the (a, c) equations lose their b terms.
            for (a, beta, c) in samples() {
                let lam = 1e-9;
                let [da, db, dc] = flow_rhs(&a, &(lam * beta), &c).unwrap();
                worst = worst.max((da - (1.0 - a * a / (c * c))).abs());
                worst = worst.max((dc - a / c).abs());
                worst = worst.max((db / lam).abs() * lam);
            }
            TruncationReport {
                kind,
                first_order_consistent: worst < 1e-8,
                requires: None,
                reduced_rhs: "ȧ = 1 − a²/c², ċ = a/c".into(),
                max_violation: worst,
                second_order_violation: None,
            }
        }
        TruncationKind::BEqMinusA => {
            let mut joint: f64 = 0.0;
            for (a, _, c) in samples() {
                let [da, db, dc] = flow_rhs(&a, &(-a), &c).unwrap();
                worst = worst.max((da + db).abs());
                let [da, db, dc2] = flow_rhs(&a, &(-a), &a).unwrap();
                joint = joint.max((da + db).abs()).max((da - dc2).abs());
                let _ = dc;
            }
            TruncationReport {
                kind,
                first_order_consistent: joint < 1e-14,
                requires: Some("a = c (then ȧ = ċ = 1/2, the flat metric)".into()),
                reduced_rhs: "ȧ = 1/2".into(),
                max_violation: worst,
                second_order_violation: None,
            }
        }
        TruncationKind::AEqC => {
            let mut second: f64 = 0.0;
            for (a, b, _) in samples() {
                let [da, _, dc] = flow_rhs(&a, &b, &a).unwrap();
                worst = worst.max((da - dc).abs());
                // rows α, β, γ of g restricted to α = γ: γ-row = 2·α-row iff ∂γV = 2∂αV
                let dv = potential_gradient(&a, &b, &a);
                second = second.max((dv[2] - 2.0 * dv[0]).abs() / dv[0].abs().max(dv[2].abs()).max(1e-300));
            }
            TruncationReport {
                kind,
                first_order_consistent: false,
                requires: Some("b = −a (forced by ȧ − ċ = −1 − b/a)".into()),
                reduced_rhs: "ȧ − ċ = −1 − b/a".into(),
                max_violation: worst,
                second_order_violation: Some(second),
            }
        }
    }
}
