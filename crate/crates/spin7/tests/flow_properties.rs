use num_traits::Zero;
use proptest::prelude::*;
use spin7::curvature::ricci_flat_residual;
use spin7::gradient_flow::*;
use spin7::{Exact, Jet, Scalar, TriadJet};

fn positive() -> impl Strategy<Value = Exact> {
    (1i64..=40, 1i64..=12).prop_map(|(n, d)| Exact::ratio(n, d))
}

fn nonzero() -> impl Strategy<Value = Exact> {
    (positive(), any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn superpotential_identity_is_exact(a in positive(), b in nonzero(), c in positive()) {
        prop_assert!(superpotential_identity(&a, &b, &c).is_zero());
    }

    #[test]
    fn gradient_flow_is_the_first_order_system(a in positive(), b in nonzero(), c in positive()) {
        let grad = gradient_flow_in_t(&a, &b, &c);
        let rhs = flow_rhs(&a, &b, &c).unwrap();
        prop_assert_eq!(grad, rhs);
    }

    #[test]
    fn flow_rhs_is_scale_invariant(a in positive(), b in nonzero(), c in positive(), l in positive()) {
        let scaled = flow_rhs(&(l.clone() * a.clone()), &(l.clone() * b.clone()), &(l * c.clone())).unwrap();
        prop_assert_eq!(scaled, flow_rhs(&a, &b, &c).unwrap());
    }

    #[test]
    fn hamiltonian_constraint_holds_on_flow(a in positive(), b in nonzero(), c in positive()) {
        let t = flow_triad(&a, &b, &c, FlowVariant::Standard).unwrap();
        prop_assert!(kinetic_plus_potential(&t).is_zero());
    }

    #[test]
    fn flow_data_is_exactly_ricci_flat(a in positive(), b in nonzero(), c in positive()) {
        let t = flow_triad(&a, &b, &c, FlowVariant::Standard).unwrap();
        prop_assert_eq!(ricci_flat_residual(&t).unwrap(), 0.0);
        prop_assert_eq!(euler_lagrange_residual(&t).unwrap(), 0.0);
        let (r19, fact) = factorised_residuals(&t).unwrap();
        prop_assert_eq!((r19, fact), (0.0, 0.0));
    }

    #[test]
    fn sign_flipped_flow_is_not_ricci_flat(a in positive(), b in nonzero(), c in positive()) {
        let t = flow_triad(&a, &b, &c, FlowVariant::SignFlipped).unwrap();
        prop_assert!(ricci_flat_residual(&t).unwrap() > 1e-6);
    }
}

#[test]
fn perturbed_velocity_is_detected() {
    for &(a, b, c) in &[(1.0, 0.5, 2.0), (2.0, -1.0, 1.5), (0.7, 0.3, 0.9)] {
        let t = flow_triad(&a, &b, &c, FlowVariant::Standard).unwrap();
        assert!(ricci_flat_residual(&t).unwrap() < 1e-12);
        let mut e = t.a.entries().to_vec();
        e[1] += 1e-3;
        let bumped = TriadJet::new(Jet::new(&e), t.b.clone(), t.c.clone());
        assert!(ricci_flat_residual(&bumped).unwrap() > 1e-5);
    }
}

#[test]
fn integrated_flow_is_scale_covariant() {
    let opts = FlowOptions { tol: 1e-12, ..FlowOptions::default() };
    let s0 = FlowState { t: 0.0, a: 1.0, b: 0.8, c: 1.3 };
    let base = integrate_flow(s0, 2.0, &FlowOptions { diagnostics: false, ..opts }).unwrap();
    let end = base.last().state;
    for &l in &[0.5, 2.0] {
        let s = FlowState { t: 0.0, a: l * s0.a, b: l * s0.b, c: l * s0.c };
        let tr = integrate_flow(s, 2.0 * l, &opts).unwrap();
        let e = tr.last().state;
        for (x, y) in [(e.a, end.a), (e.b, end.b), (e.c, end.c)] {
            assert!((x - l * y).abs() < 1e-9 * l, "λ = {l}: {x} vs {}", l * y);
        }
        assert!(tr.max_ricci() < 1e-8 && tr.max_el() < 1e-8);
    }
}

#[test]
fn product_metric_with_frozen_circle_is_ricci_flat() {
    use spin7::curvature::{connection_for_frame, curvature_for_frame};
    use spin7::metric_families::{g2_pair, MetricFamily, Family};
    use spin7::Frame;
    let fam = MetricFamily::unit(Family::G2xS1);
    for &w in &[0.3, 1.0, 4.0] {
        let (a, c) = g2_pair(&fam, w).unwrap();
        let frame = Frame::g2_circle(&a, &c).unwrap();
        let conn = connection_for_frame(&frame).unwrap();
        let curv = curvature_for_frame(&conn).unwrap();
        assert!(curv.ricci_max_abs() < 1e-8, "w = {w}");
    }
}
