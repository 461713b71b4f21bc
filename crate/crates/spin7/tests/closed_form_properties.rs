use proptest::prelude::*;
use spin7::closed_form_solutions::*;
use spin7::{Exact, Scalar};

fn slope(f: impl Fn(f64) -> f64, u1: f64, u2: f64) -> f64 {
    (f(u1).abs().ln() - f(u2).abs().ln()) / (u1.ln() - u2.ln())
}

#[test]
fn exponents_near_the_asymptotic_end() {
    for &k in &[0.3, 1.0, 4.0] {
        let v = |u: f64| v_of_z_offset(k, u).unwrap() + 2.0;
        let f = |u: f64| f_at(Chart::Z, k, 1.0, u).unwrap();
        // corrections to both exponents fall off only like u^{1/4}
        let (u1, u2) = (1e-17, 1e-18);
        assert!((slope(v, u1, u2) + 0.25).abs() < 1e-3, "k = {k}: v exponent {}", slope(v, u1, u2));
        assert!((slope(f, u1, u2) + 0.5).abs() < 1e-3, "k = {k}: f exponent {}", slope(f, u1, u2));
        // leading coefficients 2^{3/4}k and c₀
        assert!((v(u2) * u2.powf(0.25) / (2f64.powf(0.75) * k) - 1.0).abs() < 1e-3);
        assert!((f(u2) * u2.sqrt() - 1.0).abs() < 1e-3);
    }
}

#[test]
fn asymptotically_locally_conical() {
    let cases = [SolutionParams::k(0.5), SolutionParams::k(2.0), SolutionParams::kappa(0.0), SolutionParams::kappa(-1.0)];
    for p in cases {
        let cls = classify(&p).unwrap();
        let r3_inf = cls.asymptotic_r3.unwrap();
        let m = |u: f64| metric_at(&p, u).unwrap();
        let (near, far) = (m(1e-16), m(1e-20));
        // the circle stabilises while the S⁴ and the transverse two-sphere grow together
        assert!((far.r3 / r3_inf - 1.0).abs() < 1e-3, "{p:?}: {} vs {r3_inf}", far.r3);
        let growth = (far.s4 / near.s4).ln();
        assert!(growth > 4.0);
        assert!(((far.r12 / near.r12).ln() / growth - 1.0).abs() < 1e-3);
        assert!((far.r12 / far.s4 - 2.0).abs() < 1e-3);
    }
}

#[test]
fn phase_field_examples() {
    let q = |n, d| Exact::ratio(n, d);
    assert_eq!(phase_field(&q(1, 2), &q(2, 1)), (q(3, 4), q(3, 1)));
    assert_eq!(phase_field(&q(1, 1), &q(-2, 1)), (q(0, 1), q(0, 1)));
}

#[test]
fn classification_examples() {
    let b8 = classify(&SolutionParams::k(0.0).with_branch(Branch::B8)).unwrap();
    assert_eq!(b8.branch, Branch::B8);
    let m = classify(&SolutionParams::k(1.0)).unwrap();
    assert_eq!(m.branch, Branch::B8Minus);
    let z0 = m.z0.unwrap();
    assert!(z0 > 0.0 && z0 < 1.0);
    assert!((v_of_z(1.0, z0).unwrap() - 2.0).abs() < 1e-10);
    let p = classify(&SolutionParams::kappa(0.0)).unwrap();
    assert_eq!(p.branch, Branch::B8Plus);
    assert!((v_of_y(0.0, p.y0.unwrap()).unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(classify(&SolutionParams::k(-1.0)).unwrap().branch, Branch::Singular);
    assert_eq!(classify(&SolutionParams::kappa(3.0)).unwrap().branch, Branch::Singular);
    assert_eq!(classify(&SolutionParams::k(f64::INFINITY)).unwrap().branch, Branch::G2Limit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_trajectories_follow_the_field(k in 0.0f64..5.0, z in prop_oneof![0.05f64..0.95, 1.05f64..3.0]) {
        let v = v_of_z(k, z).unwrap();
        let (dz, dv) = phase_field(&z, &v);
        let res = dz * dv_dz(k, z).unwrap() - dv;
        prop_assert!(res.abs() < 1e-9 * (1.0 + v.abs()), "residual {res}");
    }

    #[test]
    fn y_chart_derivative_matches_differences(kappa in -2.6f64..2.6, y in -0.95f64..0.95) {
        use num_traits::ToPrimitive;
        use twofloat::TwoFloat;
        let h = TwoFloat::from(1e-7);
        let (k, yt) = (TwoFloat::from(kappa), TwoFloat::from(y));
        let fd = ((v_of_y(k, yt + h).unwrap() - v_of_y(k, yt - h).unwrap()) / (TwoFloat::from(2.0) * h)).to_f64().unwrap();
        let d = dv_dy(kappa, y).unwrap();
        prop_assert!((fd - d).abs() < 1e-8 * (1.0 + d.abs()), "{fd} vs {d}");
    }

    #[test]
    fn bolt_relation_at_every_bolt(k in 0.05f64..20.0) {
        let cls = classify(&SolutionParams::k(k)).unwrap();
        let bolt = cls.bolt.unwrap();
        prop_assert!(bolt.bolt_relation.abs() < 1e-10);
        prop_assert!(bolt.v_prime != 0.0);
    }

    #[test]
    fn bolt_relation_y_chart(kappa in -2.55f64..2.55) {
        let cls = classify(&SolutionParams::kappa(kappa)).unwrap();
        prop_assert_eq!(cls.branch, Branch::B8Plus);
        prop_assert!(cls.bolt.unwrap().bolt_relation.abs() < 1e-10);
    }

    #[test]
    fn double_double_agrees_with_f64(k in 0.0f64..5.0, z in prop_oneof![0.05f64..0.95, 1.05f64..3.0]) {
        use num_traits::ToPrimitive;
        use twofloat::TwoFloat;
        let lo = v_of_z(k, z).unwrap();
        let hi = v_of_z(TwoFloat::from(k), TwoFloat::from(z)).unwrap().to_f64().unwrap();
        prop_assert!((lo - hi).abs() < 1e-13 * (1.0 + hi.abs()));
    }
}
