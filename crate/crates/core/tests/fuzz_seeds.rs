//! Replays the checked-in fuzz seeds through the same harnesses the fuzz targets use.

use std::path::PathBuf;

#[path = "../../../fuzz/src/harness.rs"]
mod harness;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), std::fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn replay(target: &str, run: fn(&[u8])) {
    for (name, data) in seeds(target) {
        let result = std::panic::catch_unwind(|| run(&data));
        assert!(result.is_ok(), "{target} panicked on {name}");
    }
}

#[test]
fn parse_poly_seeds() {
    replay("parse_poly", harness::parse_poly);
}

#[test]
fn poly_json_seeds() {
    replay("poly_json", harness::poly_json);
}

#[test]
fn ring_element_seeds() {
    replay("ring_element", harness::ring_element);
}

#[test]
fn series_json_seeds() {
    replay("series_json", harness::series_json);
}

#[test]
fn harnesses_survive_arbitrary_bytes() {
    let junk: [&[u8]; 6] = [
        b"",
        b"\xff\xfe",
        b"((((((((((",
        b"x^-",
        b"{\"vars\":",
        b"9999999999999999999999999*x",
    ];
    for data in junk {
        harness::parse_poly(data);
        harness::poly_json(data);
        harness::ring_element(data);
        harness::series_json(data);
    }
}

mod random_inputs {
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn polynomial_text(s in "[xyab0-9^*+() -]{0,24}") {
            super::harness::parse_poly(s.as_bytes());
            super::harness::ring_element(s.as_bytes());
        }

        #[test]
        fn term_json(e in proptest::collection::vec(-4i64..5, 0..3), c in "-?[0-9a/]{0,6}") {
            let json = format!(r#"{{"vars":["x","y"],"params":["a"],"terms":[{{"exp":{e:?},"coeff":"{c}"}}]}}"#);
            super::harness::poly_json(json.as_bytes());
        }
    }
}
