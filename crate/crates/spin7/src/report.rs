//! The acceptance dossier: every numbered check, its measured values and a
//! verdict. Used by the `acceptance` test target and by `spin7 report`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::closed_form_solutions::{
    self as cfs, classify, dv_dy, dv_dz, large_k_metric_in_r, small_k_metric_in_r, v_of_y, v_of_z, SolutionParams,
};
use crate::curvature::ricci_flat_residual;
use crate::gradient_flow::{
    flow_rhs_variant, flow_triad, gradient_flow_in_t, integrate_flow, potential, superpotential_identity, FlowOptions,
    FlowState, FlowVariant,
};
use crate::harmonic_forms::{
    b3_norm_squared, closed_form_residuals, closed_form_u, harmonic_rhs, l2_integral, norm_squared, potential_residual,
    printed_norm_squared, Duality, HarmonicFamily, SUPPORTED,
};
use crate::metric_families::{
    algebraic_triad, bolt_expansion, bryant_salamon_coefficients, b8_coefficients, sample_gap, three_r_a_squared,
    Elementary, Family, MetricFamily,
};
use crate::ode::{integrate, OdeOptions, StepControl};
use crate::scalar::{rational_pow, Scalar};
use crate::special::Real;
use crate::spinor_calibration::{
    calibration_check, closure_residual, holonomy_residual, parallel_spinor, random_calibration_max, recover_flow,
    standard_cayley_form, cayley_form, CliffordBasis,
};
use crate::triad::TriadJet;
use crate::Jet;

type Q = BigRational;

/// `Γ(1/4)`, used only as an independent check of `κ̄ = Γ(1/4)²/(2√(2π))`.
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub variant: FlowVariant,
    /// Random 4-planes for the calibration bound.
    pub calibration_planes: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { variant: FlowVariant::Standard, calibration_planes: 100_000, seed: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub value: f64,
    /// Human-readable acceptance bound, e.g. `< 1e-10`.
    pub bound: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub measured: BTreeMap<String, Measurement>,
    pub notes: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &'static str) -> Self {
        Criterion { id, title, passed: true, measured: BTreeMap::new(), notes: Vec::new() }
    }

    fn below(&mut self, name: &str, value: f64, limit: f64) {
        self.record(name, value, format!("< {limit:e}"), value < limit);
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.record(name, value, format!("{target} ± {tol:e}"), (value - target).abs() <= tol);
    }

    fn exact(&mut self, name: &str, ok: bool) {
        self.record(name, if ok { 1.0 } else { 0.0 }, "exact".into(), ok);
    }

    fn record(&mut self, name: &str, value: f64, bound: String, pass: bool) {
        // NaN never passes
        let pass = pass && !value.is_nan();
        self.passed &= pass;
        self.measured.insert(name.to_string(), Measurement { value, bound, pass });
    }

    fn fail(&mut self, what: &str, err: impl std::fmt::Display) {
        self.passed = false;
        self.notes.push(format!("{what}: {err}"));
    }

    /// One-line summary: `PASS 3 closed-form metrics solve the flow (...)`.
    pub fn line(&self) -> String {
        let failing: Vec<String> = self
            .measured
            .iter()
            .filter(|(_, m)| !m.pass)
            .map(|(k, m)| format!("{k} = {:e}, want {}", m.value, m.bound))
            .collect();
        let mut s = format!("{} {:>2} {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title);
        if !failing.is_empty() {
            s.push_str(&format!(" [failing: {}]", failing.join(", ")));
        }
        for n in &self.notes {
            s.push_str(&format!(" | {n}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub variant: FlowVariant,
    pub criteria: Vec<Criterion>,
    /// Constant `C` with `C·∫a²c⁴|G|² dr = 9/4` on A8 (when criterion 10 ran).
    pub measure_calibration: Option<f64>,
}

impl AcceptanceReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<u8> {
        self.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }
}

pub fn run(opts: &ReportOptions) -> AcceptanceReport {
    run_selected(opts, &(1..=12).collect::<Vec<u8>>())
}

/// The listed criteria only, in the given order. Each criterion draws from
/// its own stream seeded by `(seed, id)`, so a subset reproduces the values
/// of the full run.
pub fn run_selected(opts: &ReportOptions, ids: &[u8]) -> AcceptanceReport {
    let v = opts.variant;
    let mut measure_calibration = None;
    let criteria = ids
        .iter()
        .map(|&id| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(1000).wrapping_add(id as u64));
            match id {
                1 => superpotential(v, &mut rng),
                2 => ricci_along_flow(v, &mut rng),
                3 => closed_forms_solve_flow(v),
                4 => elementary_solutions(),
                5 => hypergeometric(),
                6 => limits(),
                7 => spinor_holonomy(v),
                8 => calibration(opts.calibration_planes, &mut rng),
                9 => harmonic_forms(),
                10 => {
                    let (c, calib) = integrals();
                    measure_calibration = Some(calib);
                    c
                }
                11 => potential_b3_check(),
                12 => bolt_regularity(),
                _ => fail(Criterion::new(id, "unknown criterion"), "id", format!("{id} is not in 1..=12")),
            }
        })
        .collect();
    AcceptanceReport { variant: v, criteria, measure_calibration }
}

fn superpotential(variant: FlowVariant, rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(1, "superpotential identity and gradient flow");
    let (mut worst_id, mut worst_flow) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let a = rng.gen_range(-1.5f64..1.5).exp();
        let b = rng.gen_range(-1.5f64..1.5).exp() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let cc = rng.gen_range(-1.5f64..1.5).exp();
        let v = potential(&a, &b, &cc);
        worst_id = worst_id.max(superpotential_identity(&a, &b, &cc).abs() / v.abs());
        match flow_rhs_variant(&a, &b, &cc, variant) {
            Ok(rhs) => {
                let grad = gradient_flow_in_t(&a, &b, &cc);
                for i in 0..3 {
                    worst_flow = worst_flow.max((rhs[i] - grad[i]).abs() / (1.0 + grad[i].abs()));
                }
            }
            Err(e) => return fail(c, "flow", e),
        }
    }
    c.below("max |V + ½|∇W|²|/|V| over 1000 points", worst_id, 1e-10);
    c.below("max |flow − gradient flow of W|", worst_flow, 1e-10);
    let exact = [(1, 1, 1), (2, -3, 5), (7, 2, -4)]
        .iter()
        .all(|&(a, b, cc)| superpotential_identity(&Q::int(a), &Q::int(b), &Q::int(cc)).is_zero());
    c.exact("identity in rational arithmetic", exact);
    c
}

fn fail(mut c: Criterion, what: &str, e: impl std::fmt::Display) -> Criterion {
    c.fail(what, e);
    c
}

fn ricci_along_flow(variant: FlowVariant, rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(2, "gradient flow implies Ricci-flat");
    let mut seeds = Vec::new();
    for fam in [Family::A8, Family::B8] {
        match sample_gap(&MetricFamily::unit(fam), 0.5) {
            Ok(m) => {
                let [a, b, cc] = m.triad.unwrap().values();
                seeds.push((fam.name().to_string(), a, b, cc, 40.0));
            }
            Err(e) => return fail(c, fam.name(), e),
        }
    }
    let opts = FlowOptions { tol: 1e-11, variant, diagnostics: true };
    let (mut ric, mut el, mut steps) = (0.0f64, 0.0f64, 0usize);
    let mut absorb = |tr: &crate::gradient_flow::Trajectory| {
        ric = ric.max(tr.max_ricci());
        el = el.max(tr.max_el());
        steps += tr.points.len();
    };
    for (name, a, b, cc, t_end) in seeds {
        match integrate_flow(FlowState { t: 0.0, a, b, c: cc }, t_end, &opts) {
            Ok(tr) => absorb(&tr),
            Err(e) => c.fail(&name, e),
        }
    }
    // random seeds count once their flow line stays regular up to t = 10;
    // lines that run into a finite-t singularity are drawn again
    let (mut accepted, mut redrawn) = (0, 0);
    while accepted < 5 && redrawn < 100 {
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let cc = rng.gen_range(0.5..2.0);
        let run = integrate_flow(FlowState { t: 0.0, a, b, c: cc }, 10.0, &FlowOptions { diagnostics: false, ..opts });
        match run {
            Ok(tr) if tr.diagnostic.is_none() => {
                match integrate_flow(FlowState { t: 0.0, a, b, c: cc }, 10.0, &opts) {
                    Ok(tr) => absorb(&tr),
                    Err(e) => c.fail("random seed", e),
                }
                accepted += 1;
            }
            _ => redrawn += 1,
        }
    }
    if accepted < 5 {
        c.fail("random seeds", format!("only {accepted} regular seeds found"));
    }
    c.notes.push(format!("{redrawn} random seeds redrawn (flow line singular before t = 10)"));
    c.below("max ‖Ricci‖∞ over accepted steps", ric, 1e-8);
    c.below("max Euler–Lagrange residual over accepted steps", el, 1e-8);
    c.notes.push(format!("{steps} accepted steps on 7 trajectories"));
    c
}

fn closed_forms_solve_flow(variant: FlowVariant) -> Criterion {
    let mut c = Criterion::new(3, "closed-form metrics solve the first-order flow");
    for (fam, sign) in [(Family::A8, -1.0), (Family::B8, 1.0)] {
        let mf = MetricFamily::unit(fam);
        let (mut worst, mut signs_ok) = (0.0f64, true);
        for i in 0..100 {
            let w = 10f64.powf(-6.0 + 10.0 * i as f64 / 99.0);
            let t = match sample_gap(&mf, w) {
                Ok(m) => m.triad.unwrap(),
                Err(e) => return fail(c, fam.name(), e),
            };
            let [a, b, cc] = t.values();
            signs_ok &= b.signum() == sign && a > 0.0 && cc > 0.0;
            match flow_rhs_variant(&a, &b, &cc, variant) {
                Ok(rhs) => {
                    let d = [t.a.deriv(1), t.b.deriv(1), t.c.deriv(1)];
                    for k in 0..3 {
                        worst = worst.max((d[k] - rhs[k]).abs() / (1.0 + rhs[k].abs()));
                    }
                }
                Err(e) => return fail(c, fam.name(), e),
            }
        }
        c.below(&format!("{} max flow residual at 100 radii", fam.name()), worst, 1e-12);
        c.exact(&format!("{} sign convention (b {} 0)", fam.name(), if sign < 0.0 { "<" } else { ">" }), signs_ok);
    }
    c
}

fn elementary_solutions() -> Criterion {
    let mut c = Criterion::new(4, "elementary solutions of the third-order equation");
    let one = Q::int(1);
    // f = −r: Q = 8 and (a², b/a) = (−r, −1), i.e. a = −b = c = t/2
    let mut minus_ok = true;
    for n in [-1, -3, -7] {
        let r = Q::ratio(n, 2);
        let f = Elementary::MinusR.jet(&r, &one);
        minus_ok &= cfs::q_function(&f[0], &f[1], &f[2]) == Q::int(8);
        minus_ok &= cfs::ode19_residual(&f[0], &f[1], &f[2], &f[3]).is_zero();
        minus_ok &= algebraic_triad(&f).map(|t| t == (-r.clone(), Q::int(-1))).unwrap_or(false);
    }
    let t = Q::int(3);
    let lin = |s: i64| Jet::new(&[Q::ratio(s, 2) * t.clone(), Q::ratio(s, 2), Q::zero(), Q::zero()]);
    let flat = ricci_flat_residual(&TriadJet::new(lin(1), lin(-1), lin(1))).map(|x| x == 0.0).unwrap_or(false);
    c.exact("f = −r: Q = 8, residual 0, a² = −r, b = −a", minus_ok);
    c.exact("f = −r: a = −b = c = t/2 has vanishing curvature", flat);

    // f = 3r at r_old = 3r²/20; r = s³ makes x = r^{-10/3} = s⁻¹⁰ rational
    let mut three_ok = true;
    for (num, den) in [(5, 4), (3, 2), (7, 2)] {
        let s = Q::ratio(num, den);
        let r = s.clone() * s.clone() * s.clone();
        let x = rational_pow(&s, -10, 1).unwrap();
        let r_old = Q::ratio(3, 20) * r.clone() * r.clone();
        let f = Elementary::ThreeR.jet(&r_old, &one);
        three_ok &= cfs::q_function(&f[0], &f[1], &f[2]).is_zero() && cfs::ode19_residual(&f[0], &f[1], &f[2], &f[3]).is_zero();
        let a2 = three_r_a_squared(&r_old, &x);
        let bs = bryant_salamon_coefficients(&r, &x);
        let drr = Q::ratio(3, 10) * r;
        three_ok &= Q::int(4) * a2.clone() == bs[1] && bs[1] == bs[2] && f[0] == bs[3] && drr.clone() * drr / a2 == bs[0];
    }
    c.exact("f = 3r: Q = 0 and Bryant–Salamon coefficients reproduced exactly", three_ok);

    let mut quad_ok = true;
    for (num, den) in [(7, 3), (-5, 2), (11, 1), (1, 9)] {
        let r = Q::ratio(num, den);
        let f = Elementary::Quadratic.jet(&r, &one);
        quad_ok &= cfs::ode19_residual(&f[0], &f[1], &f[2], &f[3]).is_zero();
        quad_ok &= cfs::q_function(&f[0], &f[1], &f[2]) == Q::int(2) * r.clone() * r;
    }
    c.exact("f = r + r²/2: residual identically 0, Q = 2r²", quad_ok);
    c
}

fn hypergeometric() -> Criterion {
    let mut c = Criterion::new(5, "hypergeometric solution of the phase-plane equation");
    let (worst, at) = match central_difference_residual::<TwoFloat>(1e-6) {
        Ok(w) => w,
        Err(e) => return fail(c, "central differences", e),
    };
    c.below("max ODE residual with central differences (step 1e-6)", worst, 1e-9);
    if worst >= 1e-9 {
        // separate truncation from roundoff: the former shrinks as h²
        let finer = central_difference_residual::<TwoFloat>(1e-7).map(|w| w.0).unwrap_or(f64::NAN);
        c.notes.push(format!("worst at {at}; step 1e-7 gives {finer:.1e}, so the excess is the O(h²) truncation of the difference"));
    }
    if let Ok((w, _)) = central_difference_residual::<f64>(1e-6) {
        c.notes.push(format!("differences taken in double-double; in f64 the same quotient has roundoff {w:.1e}"));
    }

    // integrate dv/dz from a seed and compare along the way
    let mut dev = 0.0f64;
    for &(k, z0, z1) in &[(1.0, 0.2, 0.95), (0.0, 0.1, 0.9), (2.0, 1.2, 3.0)] {
        let seed = match v_of_z(k, z0) {
            Ok(v) => v,
            Err(e) => return fail(c, "seed", e),
        };
        let rhs = |z: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = (y[0] + 2.0 * z) / (2.0 * z * (1.0 - z * z));
            Ok(())
        };
        let opts = OdeOptions { rtol: 1e-13, atol: 1e-14, ..OdeOptions::default() };
        let sol = integrate(rhs, z0, &[seed], z1, &opts, |z, y| {
            if let Ok(v) = v_of_z(k, z) {
                dev = dev.max((y[0] - v).abs() / (1.0 + v.abs()));
            }
            StepControl::Continue
        });
        if let Err(e) = sol {
            return fail(c, "integration", e);
        }
    }
    c.below("max |v_ODE − v_closed|", dev, 1e-8);

    let mut rel = 0.0f64;
    for p in [SolutionParams::k(0.3), SolutionParams::k(1.0), SolutionParams::k(3.0)] {
        match classify(&p) {
            Ok(cl) => {
                let z0 = cl.z0.unwrap_or(f64::NAN);
                // independent of the stored bolt data: recompute from the closed-form derivative
                let k = if let cfs::Constant::K(k) = p.constant { k } else { unreachable!() };
                rel = rel.max(dv_dz(k, z0).map(|d| (z0 * (1.0 - z0) * d - 1.0).abs()).unwrap_or(f64::NAN));
                rel = rel.max((v_of_z(k, z0).unwrap_or(f64::NAN) - 2.0).abs());
            }
            Err(e) => return fail(c, "classify", e),
        }
    }
    for kappa in [-2.0, 0.0, 1.5] {
        match classify(&SolutionParams::kappa(kappa)) {
            Ok(cl) => {
                let y0 = cl.y0.unwrap_or(f64::NAN);
                rel = rel.max(dv_dy(kappa, y0).map(|d| ((1.0 - y0) * d - 1.0).abs()).unwrap_or(f64::NAN));
            }
            Err(e) => return fail(c, "classify", e),
        }
    }
    c.below("max |z₀(1 − z₀)v′(z₀) − 1| (and y-chart analogue)", rel, 1e-10);
    let oracle = GAMMA_QUARTER * GAMMA_QUARTER / (2.0 * (2.0 * PI).sqrt());
    c.below("|κ̄ − Γ(1/4)²/(2√(2π))|", (cfs::kappa_bar() - oracle).abs(), 1e-10);
    c.within("κ̄", cfs::kappa_bar(), 2.62206, 5e-6);
    c
}

/// `max |2z(1 − z²)v′ − (v + 2z)|` (and the `y` analogue) with `v′` a central
/// difference at step `h`, over both charts of the general solution. Returns
/// the maximum and the point where it occurs.
fn central_difference_residual<R: Real>(h: f64) -> crate::Result<(f64, String)> {
    let h = R::lit(h);
    let (one, two) = (R::one(), R::lit(2.0));
    let mut worst = (0.0f64, String::new());
    let mut keep = |r: R, at: String| {
        let r = r.abs().to_f64().unwrap_or(f64::NAN);
        if !(r <= worst.0) {
            worst = (r, at);
        }
    };
    for &k in &[0.0, 0.25, 1.0, 3.0] {
        for i in 0..40 {
            let zf = if i < 20 { 0.05 + 0.9 * i as f64 / 19.0 } else { 1.05 + 2.0 * (i - 20) as f64 / 19.0 };
            let (kr, z) = (R::lit(k), R::lit(zf));
            let dv = (v_of_z(kr, z + h)? - v_of_z(kr, z - h)?) / (two * h);
            keep(two * z * (one - z * z) * dv - (v_of_z(kr, z)? + two * z), format!("k = {k}, z = {zf:.4}"));
        }
    }
    for &kappa in &[-2.0, 0.0, 1.5, cfs::kappa_bar()] {
        for i in 0..40 {
            let yf = -0.95 + 1.9 * i as f64 / 39.0;
            let (kr, y) = (R::lit(kappa), R::lit(yf));
            let dv = (v_of_y(kr, y + h)? - v_of_y(kr, y - h)?) / (two * h);
            keep(two * (one - y * y) * dv - (y * v_of_y(kr, y)? + two), format!("κ = {kappa:.5}, y = {yf:.4}"));
        }
    }
    Ok(worst)
}

fn limits() -> Criterion {
    let mut c = Criterion::new(6, "limits of the general family");
    let mut worst = 0.0f64;
    for i in 0..20 {
        let r = 3.0 + 0.01 * 1.6f64.powi(i);
        let m = match small_k_metric_in_r(1e-3, 1.0, r) {
            Ok(m) => m,
            Err(e) => return fail(c, "small k", e),
        };
        let (g, [r12, r3, s4]) = b8_coefficients(&r, &1.0);
        for (x, y) in [(m.g, g.unwrap()), (m.r12, r12), (m.r3, r3), (m.s4, s4)] {
            worst = worst.max((x / y - 1.0).abs());
        }
    }
    c.below("ε = 1e-3: max relative deviation from B8 at 20 radii", worst, 1e-6);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let r = 1.0 + 0.01 * 1.5f64.powi(i);
        let m = match large_k_metric_in_r(1e8, r) {
            Ok(m) => m,
            Err(e) => return fail(c, "large k", e),
        };
        let g = cfs::g2_seven_metric(r);
        for (x, y) in [(m.g, g.g), (m.r12, g.r12), (m.r3, g.r3), (m.s4, g.s4)] {
            worst = worst.max((x / y - 1.0).abs());
        }
    }
    c.below("k = 1e8: max relative deviation from the G₂ metric at 20 radii", worst, 1e-6);
    c
}

fn spinor_holonomy(variant: FlowVariant) -> Criterion {
    let mut c = Criterion::new(7, "parallel spinor and Cayley form");
    let cl = CliffordBasis::build();
    c.exact("Clifford anticommutators {Γ_A, Γ_B} = 2δ_AB", cl.anticommutator_defect() == 0);
    let eta = match parallel_spinor(&cl) {
        Ok(e) => e,
        Err(e) => return fail(c, "projector kernel", e),
    };
    c.exact("joint projector kernel is 1-dimensional", true);
    let phi = match cayley_form(&cl, &eta) {
        Ok(p) => p,
        Err(e) => return fail(c, "bilinear", e),
    };
    c.exact("Φ is self-dual", phi.is_self_dual());
    let legible = [
        (vec![0, 1, 2, 3], -1),
        (vec![7, 4, 5, 6], -1),
        (vec![5, 6, 0, 1], 1),
        (vec![5, 6, 2, 3], 1),
        (vec![7, 4, 0, 1], 1),
        (vec![7, 6, 1, 2], 1),
    ];
    c.exact("legible coefficients of Φ", legible.iter().all(|(i, s)| phi.coefficient_of(i) == *s));
    c.exact("bilinear equals the reference Cayley form", standard_cayley_form().map(|p| p == phi).unwrap_or(false));
    let (mut hol, mut clo) = (0.0f64, 0.0f64);
    for &(a, b, cc) in &[(1.0, 0.5, 1.2), (0.7, -0.4, 1.9), (2.5, 1.1, 0.8), (1.3, -1.0, 1.3)] {
        match flow_triad(&a, &b, &cc, variant) {
            Ok(t) => {
                hol = hol.max(holonomy_residual(&t).unwrap_or(f64::NAN));
                clo = clo.max(closure_residual(&phi, &t).unwrap_or(f64::NAN));
            }
            Err(e) => return fail(c, "flow triad", e),
        }
    }
    c.below("max |∇η| on flow triads", hol, 1e-12);
    c.below("max |dΦ| on flow triads", clo, 1e-10);
    let mut unique = true;
    for &(a, b, cc) in &[(1, 1, 1), (3, -2, 5), (2, 7, 3)] {
        let (a, b, cc) = (Q::int(a), Q::int(b), Q::int(cc));
        unique &= match (recover_flow(&phi, &a, &b, &cc), flow_rhs_variant(&a, &b, &cc, variant)) {
            (Ok(x), Ok(y)) => x == y,
            _ => false,
        };
    }
    c.exact("dΦ = 0 determines (ȧ, ḃ, ċ) uniquely and reproduces the flow", unique);
    c
}

fn calibration(n: usize, rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(8, "Cayley form is a calibration");
    let phi = match standard_cayley_form() {
        Ok(p) => p,
        Err(e) => return fail(c, "Φ", e),
    };
    let unit = |i: usize| -> [f64; 8] { std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 }) };
    for (name, plane) in [("S⁴ section plane", [unit(0), unit(1), unit(2), unit(3)]), ("fibre plane e⁸e¹̂e²̂e³̂", [unit(7), unit(4), unit(5), unit(6)])] {
        match calibration_check(&phi, &plane) {
            Ok(v) => c.within(&format!("|Φ| on the {name}"), v, 1.0, 1e-12),
            Err(e) => c.fail(name, e),
        }
    }
    match random_calibration_max(&phi, n, rng) {
        Ok(m) => c.record(&format!("max |Φ| over {n} random 4-planes"), m, "≤ 1 + 1e-9".into(), m <= 1.0 + 1e-9),
        Err(e) => c.fail("random planes", e),
    }
    c
}

fn harmonic_forms() -> Criterion {
    let mut c = Criterion::new(9, "harmonic 4-forms");
    let (mut sys, mut closed) = (0.0f64, 0.0f64);
    for (f, d, _, _) in SUPPORTED {
        for i in 0..40 {
            let w = 10f64.powf(-3.0 + 6.0 * i as f64 / 39.0);
            match closed_form_residuals(f, d, w) {
                Ok((dg, res)) => {
                    closed = closed.max(dg);
                    sys = sys.max(res);
                }
                Err(e) => return fail(c, f.name(), e),
            }
        }
    }
    c.below("max residual of the first-order system", sys, 1e-10);
    c.below("max |dG|", closed, 1e-10);
    let mut norms = true;
    for (f, d, _, _) in SUPPORTED {
        for i in 0..50 {
            let r = Q::int(f.bolt()) + Q::ratio(2 * i + 1, 7);
            norms &= match (closed_form_u(f, d, &r), printed_norm_squared(f, d, &r)) {
                (Ok(u), Ok(p)) => norm_squared(&u) == p,
                _ => false,
            };
        }
    }
    c.exact("|G|² equals the quoted rational functions at 50 points each", norms);
    let mut cayley = true;
    let k = [Q::int(-1), Q::int(-1), Q::int(1)];
    for &(a, b, cc) in &[(2, -3, 5), (1, 1, 1), (3, 2, 7)] {
        cayley &= match crate::spinor_calibration::flow_point(Q::int(a), Q::int(b), Q::int(cc)) {
            Ok(t) => harmonic_rhs(&k, Duality::SelfDual, &t).map(|r| r.iter().all(Zero::is_zero)).unwrap_or(false),
            Err(_) => false,
        };
    }
    c.exact("constant member (−1, −1, 1) solves the system identically", cayley);
    c
}

/// Criterion 10 and the calibration constant of the radial measure.
fn integrals() -> (Criterion, f64) {
    let mut c = Criterion::new(10, "L² norms of the harmonic forms");
    let get = |f, d| l2_integral(f, d);
    let (a8, b8a, b8b) = match (
        get(HarmonicFamily::A8, Duality::SelfDual),
        get(HarmonicFamily::B8, Duality::SelfDual),
        get(HarmonicFamily::B8, Duality::AntiSelfDual),
    ) {
        (Ok(a), Ok(b), Ok(d)) => (a, b, d),
        (a, b, d) => {
            for e in [a.err(), b.err(), d.err()].into_iter().flatten() {
                c.fail("integral", e);
            }
            return (c, f64::NAN);
        }
    };
    let calib = 2.25 / a8.value;
    c.record("measure calibration constant (A8 → 9/4)", calib, "reported".into(), calib.is_finite());
    c.within("B8 form with u₃ ∝ (r²+14r−11): calibrated ∫", calib * b8a.value / (189.0 / 16.0), 1.0, 1e-6);
    c.within("B8 form with u₃ ∝ (r−3): calibrated ∫", calib * b8b.value / (189.0 / 4.0), 1.0, 1e-6);
    c.within("convention-free ratio", b8b.value / b8a.value, 4.0, 4e-9);
    c.notes.push(format!(
        "values {:.15} / {:.15} / {:.15}; the 189/16 form solves the self-dual system and the 189/4 form the anti-self-dual one (labels follow the signs of the system)",
        a8.value, b8a.value, b8b.value
    ));
    (c, calib)
}

fn potential_b3_check() -> Criterion {
    let mut c = Criterion::new(11, "potential for the A8 harmonic form");
    let mut worst = 0.0f64;
    for i in 0..100 {
        let w = 10f64.powf(-4.0 + 7.0 * i as f64 / 99.0);
        match potential_residual(w) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return fail(c, "dB", e),
        }
    }
    c.below("max |dB₃ − G| at 100 radii", worst, 1e-10);
    let (w1, w2) = (1e-7, 1e-6);
    match (b3_norm_squared(w1), b3_norm_squared(w2)) {
        (Ok(n1), Ok(n2)) => {
            let order = (n2 / n1).ln() / (w2 / w1).ln();
            c.record("|B₃|² at r − 1 = 1e-6", n2, "→ 0".into(), n2 < n1 * 11.0 && n2 < 1e-4);
            c.within("fitted vanishing order of |B₃|² in (r − 1)", order, 2.0, 0.05);
            let rho = |w: f64| (w * (w + 4.0)).sqrt();
            c.notes.push(format!(
                "order in proper distance ρ = {:.4}; |G|² at the nut is {} ≠ 0, so any potential has |B₃|² ∝ ρ² ∝ (r − 1)",
                (n2 / n1).ln() / (rho(w2) / rho(w1)).ln(),
                printed_norm_squared::<f64>(HarmonicFamily::A8, Duality::SelfDual, &1.0).unwrap_or(f64::NAN)
            ));
        }
        (a, b) => {
            for e in [a.err(), b.err()].into_iter().flatten() {
                c.fail("|B₃|²", e);
            }
        }
    }
    c
}

fn bolt_regularity() -> Criterion {
    let mut c = Criterion::new(12, "bolt regularity");
    for fam in [Family::A8, Family::B8] {
        match bolt_expansion(&MetricFamily::unit(fam)) {
            Ok(rep) => {
                for col in &rep.collapses {
                    if col.bolt_value > 0.0 {
                        c.within(&format!("{} {} survives (power)", fam.name(), col.coefficient), col.power, 0.0, 1e-3);
                    } else {
                        c.within(&format!("{} {} collapse power", fam.name(), col.coefficient), col.power, 1.0, 1e-3);
                        c.within(&format!("{} {} collapse rate", fam.name(), col.coefficient), col.rate, 1.0, 1e-3);
                    }
                }
            }
            Err(e) => c.fail(fam.name(), e),
        }
    }
    c
}
