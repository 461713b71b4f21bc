//! Levi-Civita connection and curvature of the cohomogeneity-one metric,
//! computed in an orthonormal frame inside the invariant-form algebra.
//!
//! Writing `deᴬ = ½ Cᴬ_BC eᴮ∧eᶜ`, the torsion-free connection is
//! `ω_{AB,C} = ½(C_ABC + C_BCA − C_CAB)`. Terms `g∧eᴮ` with `g` a gauge
//! generator (the `Lᵢ`) give `ω_{AB,g} = −(coefficient of g∧eᴮ in deᴬ)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::invariant_forms::{Form, Frame, Generator};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::triad::TriadJet;

#[derive(Clone)]
pub struct ConnectionTable<S> {
    pub frame: Frame<S>,
    /// `ω_{AB,C}` (frame direction `C`), antisymmetric in `A, B`.
    comps: Vec<Jet<S>>,
    /// `ω_{AB,g}` along gauge generators.
    gauge: BTreeMap<(usize, usize, Generator), Jet<S>>,
    /// Connection one-forms `ω_AB` in the generator basis.
    forms: Vec<Form<S>>,
    /// Failure of `ω_{AB,g} = −ω_{BA,g}` (zero for invariant metrics).
    pub gauge_asymmetry: f64,
}

fn at(a: usize, b: usize, c: usize) -> usize {
    (a * 8 + b) * 8 + c
}

impl<S: Scalar> ConnectionTable<S> {
    pub fn component(&self, a: usize, b: usize, c: usize) -> &Jet<S> {
        &self.comps[at(a, b, c)]
    }

    pub fn gauge_component(&self, a: usize, b: usize, g: Generator) -> Option<&Jet<S>> {
        self.gauge.get(&(a, b, g))
    }

    pub fn one_form(&self, a: usize, b: usize) -> &Form<S> {
        &self.forms[a * 8 + b]
    }

    /// `max_A |deᴬ + ωᴬ_B ∧ eᴮ|`.
    pub fn reassembly_residual(&self) -> f64 {
        (0..8)
            .map(|a| {
                let mut t = self.frame.one_form(a).d();
                for b in 0..8 {
                    t = t.add(&self.one_form(a, b).wedge(&self.frame.one_form(b)));
                }
                t.max_abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max |ω_{AB,C} + ω_{BA,C}|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let s = self.component(a, b, c).clone() + self.component(b, a, c).clone();
                    m = m.max(s.value().to_f64().abs());
                }
            }
        }
        m
    }
}

/// Connection of an arbitrary frame/gauge split.
pub fn connection_for_frame<S: Scalar>(frame: &Frame<S>) -> Result<ConnectionTable<S>> {
    let zero = || Jet::<S>::zero();
    let mut cst = vec![zero(); 512];
    let mut gz: BTreeMap<(usize, Generator, usize), Jet<S>> = BTreeMap::new();
    for a in 0..8 {
        let de = frame.one_form(a).d();
        for (mask, coef) in de.terms() {
            let gens: Vec<Generator> =
                (0..16u8).filter(|b| mask & (1 << b) != 0).filter_map(Generator::from_code).collect();
            if gens.len() != 2 {
                return Err(Error::Domain("exterior derivative of a frame form is not a 2-form".into()));
            }
            let (x, y) = (gens[0], gens[1]);
            match (frame.index_of(x), frame.index_of(y)) {
                (Some(i), Some(j)) => {
                    let v = coef.clone() / (frame.scales[i].clone() * frame.scales[j].clone());
                    cst[at(a, i, j)] = cst[at(a, i, j)].clone() + v.clone();
                    cst[at(a, j, i)] = cst[at(a, j, i)].clone() - v;
                }
                (None, Some(j)) if frame.is_gauge(x) => {
                    let v = coef.clone() / frame.scales[j].clone();
                    let e = gz.entry((a, x, j)).or_insert_with(zero);
                    *e = e.clone() + v;
                }
                (Some(i), None) if frame.is_gauge(y) => {
                    let v = coef.clone() / frame.scales[i].clone();
                    let e = gz.entry((a, y, i)).or_insert_with(zero);
                    *e = e.clone() - v;
                }
                _ => {
                    return Err(Error::Domain(format!(
                        "term {}∧{} is neither frame nor gauge",
                        x.label(),
                        y.label()
                    )))
                }
            }
        }
    }
    let half = S::ratio(1, 2);
    let mut comps = vec![zero(); 512];
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                let v = cst[at(a, b, c)].clone() + cst[at(b, c, a)].clone() - cst[at(c, a, b)].clone();
                comps[at(a, b, c)] = v.scale(&half);
            }
        }
    }
    let mut gauge = BTreeMap::new();
    let mut asym: f64 = 0.0;
    for (&(a, g, b), v) in &gz {
        gauge.insert((a, b, g), -v.clone());
        let other = gz.get(&(b, g, a)).cloned().unwrap_or_else(zero);
        asym = asym.max((v.clone() + other).value().to_f64().abs());
    }
    let mut forms = Vec::with_capacity(64);
    for a in 0..8 {
        for b in 0..8 {
            let mut w = Form::zero();
            for c in 0..8 {
                let k = &comps[at(a, b, c)];
                if !k.is_zero() {
                    w = w.add(&frame.one_form(c).scale_jet(k));
                }
            }
            for g in &frame.gauge {
                if let Some(k) = gauge.get(&(a, b, *g)) {
                    w = w.add(&Form::generator(*g).scale_jet(k));
                }
            }
            forms.push(w);
        }
    }
    Ok(ConnectionTable { frame: frame.clone(), comps, gauge, forms, gauge_asymmetry: asym })
}

/// Levi-Civita connection of the Spin(7) ansatz; needs first derivatives.
pub fn connection<S: Scalar>(triad: &TriadJet<S>) -> Result<ConnectionTable<S>> {
    if triad.order() < 2 {
        return Err(Error::Domain("connection needs first derivatives of the triad".into()));
    }
    connection_for_frame(&Frame::spin7(triad)?)
}

#[derive(Clone, Debug)]
pub struct CurvatureTensor<S> {
    /// `R_ABCD`, index `((A·8+B)·8+C)·8+D`.
    riemann: Vec<S>,
    pub ricci: [[S; 8]; 8],
    /// Largest curvature component along gauge generators (must vanish).
    pub gauge_leak: f64,
}

impl<S: Scalar> CurvatureTensor<S> {
    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> &S {
        &self.riemann[((a * 8 + b) * 8 + c) * 8 + d]
    }

    pub fn ricci_max_abs(&self) -> f64 {
        self.ricci.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn bianchi_residual(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    for d in 0..8 {
                        let s = self.riemann(a, b, c, d).clone()
                            + self.riemann(a, c, d, b).clone()
                            + self.riemann(a, d, b, c).clone();
                        m = m.max(s.to_f64().abs());
                    }
                }
            }
        }
        m
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    for d in 0..8 {
                        let r = self.riemann(a, b, c, d).clone();
                        m = m.max((r.clone() + self.riemann(b, a, c, d).clone()).to_f64().abs());
                        m = m.max((r + self.riemann(a, b, d, c).clone()).to_f64().abs());
                    }
                }
            }
        }
        m
    }
}

/// `Θ_AB = dω_AB + ω_AC∧ω_CB`, read off in the frame.
pub fn curvature_for_frame<S: Scalar>(conn: &ConnectionTable<S>) -> Result<CurvatureTensor<S>> {
    let frame = &conn.frame;
    let gauge_mask = frame.gauge.iter().fold(0u16, |m, g| m | g.bit());
    let mut riemann = vec![S::zero(); 4096];
    let mut leak: f64 = 0.0;
    for a in 0..8 {
        for b in a + 1..8 {
            let mut theta = conn.one_form(a, b).d();
            for c in 0..8 {
                theta = theta.add(&conn.one_form(a, c).wedge(conn.one_form(c, b)));
            }
            let gauge_part = theta.touching(gauge_mask);
            leak = leak.max(gauge_part.max_abs());
            let framed = frame.to_frame(&theta.sub(&gauge_part))?;
            for (mask, v) in framed.terms() {
                let idx: Vec<usize> = (0..8).filter(|i| mask & (1 << i) != 0).collect();
                let (c, d) = (idx[0], idx[1]);
                let v = v.value().clone();
                for (p, q, s) in [(a, b, 1), (b, a, -1)] {
                    riemann[((p * 8 + q) * 8 + c) * 8 + d] = if s > 0 { v.clone() } else { -v.clone() };
                    riemann[((p * 8 + q) * 8 + d) * 8 + c] = if s > 0 { -v.clone() } else { v.clone() };
                }
            }
        }
    }
    let mut ricci: [[S; 8]; 8] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
    for (b, row) in ricci.iter_mut().enumerate() {
        for (d, slot) in row.iter_mut().enumerate() {
            let mut acc = S::zero();
            for a in 0..8 {
                acc = acc + riemann[((a * 8 + b) * 8 + a) * 8 + d].clone();
            }
            *slot = acc;
        }
    }
    Ok(CurvatureTensor { riemann, ricci, gauge_leak: leak })
}

/// Riemann and Ricci tensors of the Spin(7) ansatz; needs second derivatives.
pub fn ricci<S: Scalar>(triad: &TriadJet<S>) -> Result<CurvatureTensor<S>> {
    if triad.order() < 3 {
        return Err(Error::Domain("curvature needs second derivatives of the triad".into()));
    }
    curvature_for_frame(&connection(triad)?)
}

/// `‖Ricci‖_∞`.
pub fn ricci_flat_residual<S: Scalar>(triad: &TriadJet<S>) -> Result<f64> {
    Ok(ricci(triad)?.ricci_max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    /// Flat ℝ⁸: a = t/2, b = −t/2, c = t/2.
    fn flat(t: Q) -> TriadJet<Q> {
        let h = t * q(1, 2);
        TriadJet::new(
            Jet::new(&[h.clone(), q(1, 2), q(0, 1)]),
            Jet::new(&[-h.clone(), q(-1, 2), q(0, 1)]),
            Jet::new(&[h, q(1, 2), q(0, 1)]),
        )
    }

    #[test]
    fn flat_space_is_exactly_flat() {
        let curv = ricci(&flat(q(2, 1))).unwrap();
        assert!(curv.riemann.iter().all(|x| *x == q(0, 1)));
        assert_eq!(curv.gauge_leak, 0.0);
    }

    #[test]
    fn connection_reassembles_exactly() {
        let t = TriadJet::first_order(q(1, 1), q(3, 10), q(6, 5), q(2, 7), q(-1, 3), q(5, 4));
        let conn = connection(&t).unwrap();
        assert_eq!(conn.reassembly_residual(), 0.0);
        assert_eq!(conn.antisymmetry_residual(), 0.0);
        assert_eq!(conn.gauge_asymmetry, 0.0);
        // ω_{08,0} = ċ/c
        assert_eq!(conn.component(0, 7, 0).value(), &(q(5, 4) / q(6, 5)));
    }

    #[test]
    fn generic_metric_is_not_ricci_flat() {
        let t: TriadJet<f64> = TriadJet::new(
            Jet::new(&[1.1, 0.2, 0.3]),
            Jet::new(&[0.4, -0.5, 0.1]),
            Jet::new(&[1.3, 0.7, -0.2]),
        );
        let curv = ricci(&t).unwrap();
        assert!(curv.ricci_max_abs() > 0.01);
        assert!(curv.bianchi_residual() < 1e-12);
        assert!(curv.symmetry_residual() < 1e-12);
        assert!(curv.gauge_leak < 1e-12);
    }

    #[test]
    fn value_only_triad_rejected() {
        let t: TriadJet<f64> = TriadJet::new(Jet::new(&[1.0]), Jet::new(&[1.0]), Jet::new(&[1.0]));
        assert!(ricci(&t).is_err());
    }
}
