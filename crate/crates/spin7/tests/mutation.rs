//! The acceptance checks must notice a sign flip in the first-order system.

use spin7::gradient_flow::FlowVariant;
use spin7::report::{run, ReportOptions};

#[test]
fn sign_flip_fails_superpotential_and_ricci_criteria() {
    let opts = ReportOptions { variant: FlowVariant::SignFlipped, calibration_planes: 1000, ..ReportOptions::default() };
    let report = run(&opts);
    let failing = report.failing();
    assert!(failing.contains(&1), "criterion 1 should fail, failing = {failing:?}");
    assert!(failing.contains(&2), "criterion 2 should fail, failing = {failing:?}");
    // checks that never touch the flow right-hand side are unaffected
    for id in [4, 8, 9] {
        assert!(!failing.contains(&id), "criterion {id} should not depend on the variant");
    }
}
