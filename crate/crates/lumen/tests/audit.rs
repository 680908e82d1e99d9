use lumen::audit::{conformance_markdown, run_audit, Resolution, DEFAULT_AUDIT_SIZES};
use lumen::pcs::{setup, SetupConfig};
use lumen::snark;

#[test]
fn audit_is_consistent_and_matches_the_pinned_calibration() {
    let pp = setup(&SetupConfig::new(64, 2, b"audit")).unwrap();
    let report = run_audit(&pp, &DEFAULT_AUDIT_SIZES, 1).unwrap();
    println!("{}", conformance_markdown(&report));
    assert!(report.consistent());
    assert_eq!(report.descriptor, snark::CALIBRATION_DESCRIPTOR);
    assert_eq!(report.calibration_id, snark::calibration_id());
}

#[test]
fn audit_outcome_does_not_depend_on_seed_or_parameters() {
    let a = run_audit(&setup(&SetupConfig::new(64, 2, b"a")).unwrap(), &[2, 4], 5).unwrap();
    let b = run_audit(&setup(&SetupConfig::new(128, 3, b"b")).unwrap(), &[4, 8], 6).unwrap();
    assert_eq!(a.descriptor, b.descriptor);
}

#[test]
fn encoder_identities_hold_literally() {
    let pp = setup(&SetupConfig::new(64, 2, b"audit")).unwrap();
    let report = run_audit(&pp, &[4], 2).unwrap();
    for e in report.entries.iter().filter(|e| e.name.starts_with("piop.encoder.q")) {
        assert_eq!(e.resolution, Resolution::Literal, "{}", e.name);
    }
}
