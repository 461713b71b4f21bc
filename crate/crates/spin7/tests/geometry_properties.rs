use proptest::prelude::*;
use spin7::gradient_flow::flow_rhs;
use spin7::harmonic_forms::*;
use spin7::invariant_forms::hodge_star;
use spin7::metric_families::*;
use spin7::spinor_calibration::{calibration_check, standard_cayley_form};
use spin7::{Exact, Scalar};

fn rational(lo: i64, hi: i64) -> impl Strategy<Value = Exact> {
    (lo * 7..=hi * 7).prop_map(|n| Exact::ratio(n, 7))
}

fn scaled((g, c): &ExactCoefficients<Exact>, l: &Exact) -> ExactCoefficients<Exact> {
    let l2 = l.clone() * l.clone();
    (g.clone(), [c[0].clone() * l2.clone(), c[1].clone() * l2.clone(), c[2].clone() * l2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn a8_and_b8_are_related_by_reflection(r in rational(4, 30), ell in rational(1, 1)) {
        prop_assert_eq!(a8_coefficients(&-r.clone(), &ell), b8_coefficients(&r, &ell));
    }

    #[test]
    fn coefficients_scale_homogeneously(r in rational(4, 30), l in rational(1, 5)) {
        let one = Exact::int(1);
        prop_assert_eq!(a8_coefficients(&(l.clone() * r.clone()), &l), scaled(&a8_coefficients(&r, &one), &l));
        prop_assert_eq!(b8_coefficients(&(l.clone() * r.clone()), &l), scaled(&b8_coefficients(&r, &one), &l));
    }

    #[test]
    fn sampled_triads_solve_the_flow(w in 0.01f64..50.0, scale in 0.5f64..3.0, b8 in any::<bool>()) {
        let fam = MetricFamily::new(if b8 { Family::B8 } else { Family::A8 }, scale);
        let t = sample_gap(&fam, w).unwrap().triad.unwrap();
        let [a, b, c] = t.values();
        prop_assert!(b.signum() == fam.b_sign());
        let rhs = flow_rhs(&a, &b, &c).unwrap();
        for (leg, want) in [&t.a, &t.b, &t.c].into_iter().zip(rhs) {
            prop_assert!((leg.deriv(1) - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn cayley_form_calibrates(plane in prop::array::uniform4(prop::array::uniform8(-1.0f64..1.0))) {
        let phi = standard_cayley_form().unwrap();
        if let Ok(v) = calibration_check(&phi, &plane) {
            prop_assert!(v <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn printed_norms_hold_exactly(r in rational(1, 40), which in 0usize..3) {
        let (fam, dual, _, _) = SUPPORTED[which];
        let r = r + Exact::int(fam.bolt());
        let u = closed_form_u(fam, dual, &r).unwrap();
        prop_assert_eq!(norm_squared(&u), printed_norm_squared(fam, dual, &r).unwrap());
    }

    #[test]
    fn closed_forms_are_harmonic(w in 0.05f64..40.0, which in 0usize..3) {
        let (fam, dual, _, _) = SUPPORTED[which];
        let (dg, res) = closed_form_residuals(fam, dual, w).unwrap();
        prop_assert!(dg < 1e-10 && res < 1e-10, "dG {dg}, system {res}");
    }

    #[test]
    fn g_has_the_declared_duality(w in 0.05f64..40.0, which in 0usize..3) {
        let (fam, dual, _, _) = SUPPORTED[which];
        let (triad, u) = closed_form_on_metric(fam, dual, w).unwrap();
        let g = g_form(&u, dual, &triad).unwrap().values_only();
        let star = hodge_star(&g, &triad).unwrap().values_only();
        let sign = dual.sign() as f64;
        prop_assert!(star.sub(&g.scale(&sign)).max_abs() < 1e-10 * g.max_abs());
    }
}
