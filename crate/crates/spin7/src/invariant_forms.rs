//! Exterior algebra on the invariant coframe of S⁷ = SO(5)/SU(2).
//!
//! Generators are encoded as bits of a `u16`: `P0..P3 → 0..3`, `R1..R3 → 4..6`,
//! `dt → 7`. The left-SU(2) forms `L1..L3 → 8..10` are carried so that their
//! cancellation in invariant expressions is checked rather than assumed, and
//! `φ → 11` is a closed circle direction used for product metrics.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::triad::TriadJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    P0,
    P1,
    P2,
    P3,
    R1,
    R2,
    R3,
    Dt,
    L1,
    L2,
    L3,
    Phi,
}

impl Generator {
    pub const ALL: [Generator; 12] = [
        Generator::P0,
        Generator::P1,
        Generator::P2,
        Generator::P3,
        Generator::R1,
        Generator::R2,
        Generator::R3,
        Generator::Dt,
        Generator::L1,
        Generator::L2,
        Generator::L3,
        Generator::Phi,
    ];

    /// The eight generators of the 8-dimensional coframe `{Pₐ, Rᵢ, dt}`.
    pub const COFRAME: [Generator; 8] = [
        Generator::P0,
        Generator::P1,
        Generator::P2,
        Generator::P3,
        Generator::R1,
        Generator::R2,
        Generator::R3,
        Generator::Dt,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Generator> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn label(self) -> &'static str {
        ["P0", "P1", "P2", "P3", "R1", "R2", "R3", "DT", "L1", "L2", "L3", "PHI"][self as usize]
    }

    pub fn from_label(s: &str) -> Option<Generator> {
        Self::ALL.iter().copied().find(|g| g.label().eq_ignore_ascii_case(s))
    }

    pub fn bit(self) -> u16 {
        1 << self.code()
    }

    pub fn is_coframe(self) -> bool {
        self.code() < 8
    }

    pub fn p(a: usize) -> Generator {
        Self::ALL[a]
    }

    pub fn r(i: usize) -> Generator {
        Self::ALL[3 + i]
    }

    pub fn l(i: usize) -> Generator {
        Self::ALL[7 + i]
    }
}

pub const GAUGE_L_MASK: u16 = 0b0111_0000_0000;

/// Sign of `e_I ∧ e_J` relative to `e_{I∪J}`, or `None` if they overlap.
pub fn wedge_sign(i: u16, j: u16) -> Option<i32> {
    if i & j != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        swaps += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

fn bits(mask: u16) -> impl Iterator<Item = u8> {
    (0..16u8).filter(move |b| mask & (1 << b) != 0)
}

/// Structure equations: `d` of each generator as `(i, j, num, den)` terms of `eᵢ∧eⱼ`.
fn structure(g: Generator) -> &'static [(u8, u8, i64, i64)] {
    use Generator::*;
    const P0_: u8 = P0 as u8;
    const P1_: u8 = P1 as u8;
    const P2_: u8 = P2 as u8;
    const P3_: u8 = P3 as u8;
    const R1_: u8 = R1 as u8;
    const R2_: u8 = R2 as u8;
    const R3_: u8 = R3 as u8;
    const L1_: u8 = L1 as u8;
    const L2_: u8 = L2 as u8;
    const L3_: u8 = L3 as u8;
    match g {
        P0 => &[
            (P1_, R1_, -1, 1),
            (P1_, L1_, -1, 1),
            (P2_, R2_, -1, 1),
            (P2_, L2_, -1, 1),
            (P3_, R3_, -1, 1),
            (P3_, L3_, -1, 1),
        ],
        P1 => &[
            (P0_, R1_, 1, 1),
            (P0_, L1_, 1, 1),
            (P2_, R3_, -1, 1),
            (P2_, L3_, 1, 1),
            (P3_, R2_, 1, 1),
            (P3_, L2_, -1, 1),
        ],
        P2 => &[
            (P0_, R2_, 1, 1),
            (P0_, L2_, 1, 1),
            (P1_, R3_, 1, 1),
            (P1_, L3_, -1, 1),
            (P3_, R1_, -1, 1),
            (P3_, L1_, 1, 1),
        ],
        P3 => &[
            (P0_, R3_, 1, 1),
            (P0_, L3_, 1, 1),
            (P1_, R2_, -1, 1),
            (P1_, L2_, 1, 1),
            (P2_, R1_, 1, 1),
            (P2_, L1_, -1, 1),
        ],
        R1 => &[(P0_, P1_, -1, 2), (P2_, P3_, -1, 2), (R2_, R3_, -2, 1)],
        R2 => &[(P0_, P2_, -1, 2), (P1_, P3_, 1, 2), (R1_, R3_, 2, 1)],
        R3 => &[(P0_, P3_, -1, 2), (P1_, P2_, -1, 2), (R1_, R2_, -2, 1)],
        L1 => &[(P0_, P1_, -1, 2), (P2_, P3_, 1, 2), (L2_, L3_, 2, 1)],
        L2 => &[(P0_, P2_, -1, 2), (P1_, P3_, -1, 2), (L1_, L3_, -2, 1)],
        L3 => &[(P0_, P3_, -1, 2), (P1_, P2_, 1, 2), (L1_, L2_, 2, 1)],
        Dt | Phi => &[],
    }
}

/// A differential form on the cohomogeneity-one manifold whose coefficients
/// are jets in `t`. Keys are generator bitmasks; zero terms are never stored.
#[derive(Clone, PartialEq)]
pub struct Form<S> {
    terms: BTreeMap<u16, Jet<S>>,
}

/// Alias kept for the algebra of invariant forms.
pub type InvariantForm<S> = Form<S>;

impl<S: Scalar> Default for Form<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<&str> =
                bits(*m).map(|b| Generator::from_code(b).map(|g| g.label()).unwrap_or("?")).collect();
            write!(f, "({:?})·{}", c.value(), if names.is_empty() { "1".into() } else { names.join("∧") })?;
        }
        Ok(())
    }
}

impl<S: Scalar> Form<S> {
    pub fn zero() -> Self {
        Form { terms: BTreeMap::new() }
    }

    pub fn scalar(c: Jet<S>) -> Self {
        Self::monomial(0, c)
    }

    pub fn generator(g: Generator) -> Self {
        Self::monomial(g.bit(), Jet::one())
    }

    /// `c · e_{g₁}∧…∧e_{gₖ}` with generators in any order.
    pub fn product(gens: &[Generator], c: Jet<S>) -> Self {
        let mut f = Self::scalar(c);
        for g in gens {
            f = f.wedge(&Self::generator(*g));
        }
        f
    }

    pub fn monomial(mask: u16, c: Jet<S>) -> Self {
        let mut f = Self::zero();
        f.add_term(mask, c);
        f
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u16, Jet<S>)>) -> Self {
        let mut f = Self::zero();
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn add_term(&mut self, mask: u16, c: Jet<S>) {
        let merged = match self.terms.remove(&mask) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(mask, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u16, &Jet<S>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mask: u16) -> Option<&Jet<S>> {
        self.terms.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree if all terms share one; `None` for the zero form or mixed degree.
    pub fn grade(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = it.next()?;
        it.all(|g| g == first).then_some(first)
    }

    pub fn add(&self, o: &Form<S>) -> Form<S> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Form<S>) -> Form<S> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form<S> {
        Form { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }

    pub fn scale(&self, s: &S) -> Form<S> {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.scale(s))))
    }

    pub fn scale_jet(&self, j: &Jet<S>) -> Form<S> {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone() * j.clone())))
    }

    pub fn wedge(&self, o: &Form<S>) -> Form<S> {
        let mut out = Form::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                if let Some(sign) = wedge_sign(*m1, *m2) {
                    let c = c1.clone() * c2.clone();
                    out.add_term(m1 | m2, if sign > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// Exterior derivative: `d(f e_I) = f′ dt∧e_I + f Σₖ (−1)ᵏ d(e_{gₖ})∧e_{I∖gₖ}`.
    pub fn d(&self) -> Form<S> {
        let dt = Generator::Dt.bit();
        let mut out = Form::zero();
        for (mask, f) in &self.terms {
            if f.len() >= 2 {
                if let Some(sign) = wedge_sign(dt, *mask) {
                    let c = f.derivative();
                    out.add_term(mask | dt, if sign > 0 { c } else { -c });
                }
            }
            for (k, b) in bits(*mask).enumerate() {
                let rest = mask & !(1 << b);
                let g = Generator::from_code(b).expect("valid generator bit");
                for &(i, j, num, den) in structure(g) {
                    let pair = (1u16 << i) | (1u16 << j);
                    if let Some(sign) = wedge_sign(pair, rest) {
                        let s = if k % 2 == 0 { sign } else { -sign };
                        out.add_term(pair | rest, f.scale(&S::ratio(s as i64 * num, den)));
                    }
                }
            }
        }
        out
    }

    /// Largest |value| over all stored coefficients.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.value().to_f64().abs()).fold(0.0, f64::max)
    }

    /// Terms that involve any generator in `mask`.
    pub fn touching(&self, mask: u16) -> Form<S> {
        Self::from_terms(self.terms.iter().filter(|(m, _)| *m & mask != 0).map(|(m, c)| (*m, c.clone())))
    }

    pub fn has_gauge_terms(&self) -> bool {
        self.terms.keys().any(|m| m & GAUGE_L_MASK != 0)
    }

    /// Keep only the values of the coefficients (drops derivative data).
    pub fn values_only(&self) -> Form<S> {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.truncate(1))))
    }

    pub fn to_f64(&self) -> Form<f64> {
        Form::from_terms(self.terms.iter().map(|(m, c)| (*m, c.map_to_f64())))
    }
}

/// An orthonormal coframe `eᴬ = s_A · g_A` together with the generators that
/// play the role of gauge (connection) one-forms.
#[derive(Clone, Debug)]
pub struct Frame<S> {
    pub gens: [Generator; 8],
    pub scales: [Jet<S>; 8],
    pub gauge: Vec<Generator>,
}

impl<S: Scalar> Frame<S> {
    /// `e⁰⁻³ = cPₐ, e^{1̂,2̂} = 2aR₁,₂, e^{3̂} = 2bR₃, e⁸ = dt` (codes 0..7).
    pub fn spin7(t: &TriadJet<S>) -> Result<Self> {
        if !t.is_regular() {
            return Err(Error::SingularFrame(format!("triad {:?}", t.values())));
        }
        let two = S::int(2);
        let c = t.c.clone();
        let a2 = t.a.scale(&two);
        Ok(Frame {
            gens: Generator::COFRAME,
            scales: [
                c.clone(),
                c.clone(),
                c.clone(),
                c,
                a2.clone(),
                a2,
                t.b.scale(&two),
                Jet::one(),
            ],
            gauge: vec![Generator::L1, Generator::L2, Generator::L3],
        })
    }

    /// Product of the `b → 0` truncation with a flat circle: `R₃` becomes a
    /// connection form and frame slot 6 is the closed direction `φ`.
    pub fn g2_circle(a: &Jet<S>, c: &Jet<S>) -> Result<Self> {
        if a.value().is_zero() || c.value().is_zero() {
            return Err(Error::SingularFrame("a or c vanishes".into()));
        }
        let a2 = a.scale(&S::int(2));
        Ok(Frame {
            gens: [
                Generator::P0,
                Generator::P1,
                Generator::P2,
                Generator::P3,
                Generator::R1,
                Generator::R2,
                Generator::Phi,
                Generator::Dt,
            ],
            scales: [c.clone(), c.clone(), c.clone(), c.clone(), a2.clone(), a2, Jet::one(), Jet::one()],
            gauge: vec![Generator::L1, Generator::L2, Generator::L3, Generator::R3],
        })
    }

    pub fn index_of(&self, g: Generator) -> Option<usize> {
        self.gens.iter().position(|x| *x == g)
    }

    pub fn is_gauge(&self, g: Generator) -> bool {
        self.gauge.contains(&g)
    }

    /// `eᴬ` as a form in the generator basis.
    pub fn one_form(&self, a: usize) -> Form<S> {
        Form::monomial(self.gens[a].bit(), self.scales[a].clone())
    }

    /// Monomial `e^{A₁}∧…∧e^{Aₖ}` (frame indices in any order).
    pub fn monomial(&self, idx: &[usize]) -> Form<S> {
        let mut f = Form::scalar(Jet::one());
        for &a in idx {
            f = f.wedge(&self.one_form(a));
        }
        f
    }

    /// Frame components: the returned form's bit `A` stands for `eᴬ`.
    pub fn to_frame(&self, f: &Form<S>) -> Result<Form<S>> {
        let mut out = Form::zero();
        for (mask, c) in f.terms() {
            let mut idx = Vec::new();
            let mut scale = Jet::one();
            for b in bits(*mask) {
                let g = Generator::from_code(b).unwrap();
                let a = self.index_of(g).ok_or_else(|| {
                    Error::Domain(format!("generator {} is not part of the frame", g.label()))
                })?;
                idx.push(a);
                scale = scale * self.scales[a].clone();
            }
            let (sign, fmask) = sort_sign(&idx);
            let coef = c.clone() / scale;
            out.add_term(fmask, if sign > 0 { coef } else { -coef });
        }
        Ok(out)
    }

    /// Inverse of [`Frame::to_frame`].
    pub fn from_frame(&self, f: &Form<S>) -> Form<S> {
        let mut out = Form::zero();
        for (fmask, c) in f.terms() {
            let idx: Vec<usize> = bits(*fmask).map(|b| b as usize).collect();
            out = out.add(&self.monomial(&idx).scale_jet(c));
        }
        out
    }

    /// Hodge star with `vol = e⁰¹²³∧e^{8 1̂ 2̂ 3̂}` (= −e^{01234567} in code order).
    pub fn hodge_star(&self, f: &Form<S>) -> Result<Form<S>> {
        for s in &self.scales {
            if s.value().is_zero() {
                return Err(Error::SingularFrame("vanishing frame scale".into()));
            }
        }
        let framed = self.to_frame(f)?;
        Ok(self.from_frame(&frame_hodge_star(&framed)))
    }
}

/// Flat Hodge star on frame components with the fixed orientation.
pub fn frame_hodge_star<S: Scalar>(f: &Form<S>) -> Form<S> {
    let all: u16 = 0xff;
    let mut out = Form::zero();
    for (m, c) in f.terms() {
        let comp = all & !m;
        let sign = -wedge_sign(*m, comp).expect("complementary masks are disjoint");
        out.add_term(comp, if sign > 0 { c.clone() } else { -c.clone() });
    }
    out
}

/// Sign of the permutation sorting `idx` and the resulting bitmask.
pub fn sort_sign(idx: &[usize]) -> (i32, u16) {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    (sign, idx.iter().fold(0u16, |m, a| m | (1 << a)))
}

/// Hodge star of a form on the Spin(7) ansatz with triad `t`.
pub fn hodge_star<S: Scalar>(f: &Form<S>, t: &TriadJet<S>) -> Result<Form<S>> {
    Frame::spin7(t)?.hodge_star(f)
}

/// `Jⁱ = P₀∧Pᵢ + ½εᵢⱼₖPⱼ∧Pₖ` on the unit four-sphere.
pub fn j_form<S: Scalar>(i: usize) -> Form<S> {
    use Generator::*;
    let (a, b, c) = match i {
        1 => (P1, P2, P3),
        2 => (P2, P3, P1),
        3 => (P3, P1, P2),
        _ => panic!("J index must be 1..=3"),
    };
    Form::product(&[P0, a], Jet::one()).add(&Form::product(&[b, c], Jet::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn gen(g: Generator) -> Form<Q> {
        Form::generator(g)
    }

    #[test]
    fn basis_products() {
        use Generator::*;
        assert!(gen(P0).wedge(&gen(P0)).is_zero());
        assert_eq!(gen(P0).wedge(&gen(P1)), Form::monomial(0b11, Jet::one()));
        assert_eq!(gen(P1).wedge(&gen(P0)), Form::monomial(0b11, -Jet::one()));
        let p01 = gen(P0).wedge(&gen(P1));
        let p23 = gen(P2).wedge(&gen(P3));
        assert_eq!(p01.wedge(&p23), Form::monomial(0b1111, Jet::one()));
    }

    #[test]
    fn d_of_r1_matches_structure_equation() {
        use Generator::*;
        let expect = Form::product(&[R2, R3], Jet::ratio(-2, 1))
            .add(&Form::product(&[P0, P1], Jet::ratio(-1, 2)))
            .add(&Form::product(&[P2, P3], Jet::ratio(-1, 2)));
        assert_eq!(gen(R1).d(), expect);
        assert!(Form::<Q>::scalar(Jet::one()).d().is_zero());
    }

    #[test]
    fn structure_equations_follow_from_so5() {
        // L_{0i} = Rᵢ + Lᵢ, L_{jk} = εᵢⱼₖ(Rᵢ − Lᵢ), L_{a4} = Pₐ, dL_AB = L_AC ∧ L_CB
        fn l(a: usize, b: usize) -> Form<Q> {
            if a == b {
                return Form::zero();
            }
            if a > b {
                return l(b, a).neg();
            }
            if b == 4 {
                return gen(Generator::p(a));
            }
            if a == 0 {
                return gen(Generator::r(b)).add(&gen(Generator::l(b)));
            }
            let i = 6 - a - b;
            let eps = if (a, b) == (1, 3) { -1 } else { 1 };
            gen(Generator::r(i)).sub(&gen(Generator::l(i))).scale(&Q::int(eps))
        }
        let dl = |a: usize, b: usize| {
            (0..5).fold(Form::zero(), |acc, c| acc.add(&l(a, c).wedge(&l(c, b))))
        };
        for a in 0..4 {
            assert_eq!(gen(Generator::p(a)).d(), dl(a, 4), "dP{a}");
        }
        for i in 1..=3 {
            let (j, k) = [(2, 3), (3, 1), (1, 2)][i - 1];
            let (lo, hi, s) = if j < k { (j, k, 1) } else { (k, j, -1) };
            let r = dl(0, i).add(&dl(lo, hi).scale(&Q::int(s))).scale(&Q::ratio(1, 2));
            let lf = dl(0, i).sub(&dl(lo, hi).scale(&Q::int(s))).scale(&Q::ratio(1, 2));
            assert_eq!(gen(Generator::r(i)).d(), r, "dR{i}");
            assert_eq!(gen(Generator::l(i)).d(), lf, "dL{i}");
        }
    }

    #[test]
    fn d_squared_vanishes_on_generators() {
        for g in Generator::ALL {
            assert!(gen(g).d().d().is_zero(), "d² {}", g.label());
        }
    }

    #[test]
    fn star_of_s4_volume() {
        let t: TriadJet<Q> = TriadJet::new(Jet::ratio(1, 1), Jet::ratio(1, 3), Jet::ratio(2, 1));
        let frame = Frame::spin7(&t).unwrap();
        let vol4 = frame.monomial(&[0, 1, 2, 3]);
        let star = frame.hodge_star(&vol4).unwrap();
        // e^{1̂2̂3̂8} = e4567 in code order
        assert_eq!(frame.to_frame(&star).unwrap(), Form::monomial(0xf0, Jet::ratio(-1, 1)));
        let vol = frame.monomial(&[0, 1, 2, 3, 7, 4, 5, 6]);
        assert_eq!(frame.hodge_star(&vol).unwrap(), Form::scalar(Jet::one()));
    }

    #[test]
    fn singular_triad_rejected() {
        let t: TriadJet<f64> = TriadJet::new(Jet::constant(1.0), Jet::constant(0.0), Jet::constant(1.0));
        assert!(matches!(hodge_star(&Form::generator(Generator::P0), &t), Err(Error::SingularFrame(_))));
    }
}
