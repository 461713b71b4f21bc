use num_traits::Zero;
use proptest::prelude::*;
use spin7::invariant_forms::frame_hodge_star;
use spin7::{Exact, Form, FormQ, Jet, JetQ, Scalar};

fn q(n: i64, d: i64) -> Exact {
    Exact::ratio(n, d)
}

fn jet() -> impl Strategy<Value = JetQ> {
    prop::collection::vec((-9i64..=9, 1i64..=5), 4).prop_map(|e| Jet::new(&e.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>()))
}

/// Random invariant form over the coframe (no L generators).
fn form(max_terms: usize) -> impl Strategy<Value = FormQ> {
    prop::collection::vec((0u16..=0xff, jet()), 1..=max_terms).prop_map(Form::from_terms)
}

fn frame_norm(f: &FormQ) -> Exact {
    f.terms().fold(Exact::zero(), |acc, (_, c)| acc + c.value().clone() * c.value().clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_squared_is_exactly_zero(f in form(6)) {
        prop_assert!(f.d().d().is_zero());
    }

    #[test]
    fn d_squared_float_mode(f in form(6)) {
        prop_assert!(f.to_f64().d().d().max_abs() < 1e-12);
    }

    #[test]
    fn leibniz_rule(k in 0usize..=4, l in 0usize..=3, a in prop::collection::vec(jet(), 1..=3), b in prop::collection::vec(jet(), 1..=3), offset in 0u32..8) {
        let grade = |jets: Vec<JetQ>, g: usize, start: u32| {
            Form::from_terms(jets.into_iter().enumerate().map(|(i, c)| {
                let mask = (0..g as u32).fold(0u16, |m, j| m | 1 << ((start + 2 * i as u32 + j) % 8));
                (mask, c)
            }))
        };
        let alpha = grade(a, k, offset);
        let beta = grade(b, l, offset + 3);
        let lhs = alpha.wedge(&beta).d();
        let sign = if k % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        let rhs = alpha.d().wedge(&beta).add(&alpha.wedge(&beta.d()).scale(&sign));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn frame_star_is_an_isometry(g in 0usize..=8, f in prop::collection::vec((prop::sample::subsequence((0u16..8).collect::<Vec<_>>(), 0..=8), -20i64..=20), 1..=6)) {
        let f = Form::from_terms(f.into_iter().filter(|(b, _)| b.len() == g).map(|(bits, c)| {
            (bits.iter().fold(0u16, |m, b| m | 1 << b), Jet::constant(q(c, 1)))
        }));
        let star = frame_hodge_star(&f);
        prop_assert_eq!(frame_norm(&star), frame_norm(&f));
        // ⋆⋆ = (−1)^{k(8−k)} = (−1)^k
        let sign = if g % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        prop_assert!(frame_hodge_star(&star).sub(&f.scale(&sign)).is_zero());
    }
}

#[test]
fn gauge_generators_cancel_in_invariant_composites() {
    use spin7::invariant_forms::j_form;
    for i in 1..=3 {
        let j: FormQ = j_form(i);
        assert!(!j.d().has_gauge_terms(), "dJ{i}");
    }
}
