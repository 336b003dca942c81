mod common;

use c7to8_core::canonical::canonicalize;
use c7to8_core::{parse_bpmn, render_section, serialize_bpmn};
use common::{fixtures, run};

#[test]
fn parse_serialize_is_canonical_identity() {
    for (path, bytes) in fixtures() {
        let doc = parse_bpmn(&bytes, &path).unwrap();
        let out = String::from_utf8(serialize_bpmn(&doc)).unwrap();
        assert_eq!(
            canonicalize(&out).unwrap(),
            canonicalize(std::str::from_utf8(&bytes).unwrap()).unwrap(),
            "{}",
            path.display()
        );
    }
}

#[test]
fn conversion_is_deterministic() {
    for (path, bytes) in fixtures() {
        let a = run(&path, &bytes);
        let b = run(&path, &bytes);
        assert_eq!(a.output, b.output, "{}", path.display());
        assert_eq!(render_section(&a.report, None), render_section(&b.report, None));
    }
}

#[test]
fn converting_an_output_again_is_stable() {
    for (path, bytes) in fixtures() {
        let first = run(&path, &bytes).output.unwrap();
        let second = run(&path, &first).output.unwrap();
        let third = run(&path, &second).output.unwrap();
        assert_eq!(second, third, "{}", path.display());
    }
}

#[test]
fn round_trip_check_passes() {
    common::check_round_trip_and_determinism().unwrap();
}
