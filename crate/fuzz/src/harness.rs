//! Fuzz harnesses. Each accepts arbitrary bytes, must never panic, and checks that
//! whatever parses survives a round trip through its printed form.

use hwcong::laurent::{parse_poly_with_budget, parse_ring_element_with_budget, LaurentPoly};
use hwcong::ring::{BaseRing, Ring, RingDescriptor};
use hwcong::series::{SeriesJson, TruncatedSeries};
use hwcong::Budget;

fn budget() -> Budget {
    Budget {
        max_terms: 4096,
        max_work: 1 << 20,
    }
}

fn rings() -> Vec<Ring> {
    let params = vec!["a".to_string(), "b".to_string()];
    vec![
        RingDescriptor::integers(),
        RingDescriptor::new(BaseRing::Integers, params.clone(), None).expect("valid ring"),
        RingDescriptor::new(BaseRing::ModPk { p: 5, k: 3 }, params, Some(4)).expect("valid ring"),
    ]
}

fn text(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

pub fn parse_poly(data: &[u8]) {
    let Some(text) = text(data) else { return };
    let vars = vec!["x".to_string(), "y".to_string()];
    let budget = budget();
    for ring in rings() {
        if let Ok(f) = parse_poly_with_budget(text, &vars, &ring, &budget) {
            let again = parse_poly_with_budget(&f.to_text(), &vars, &ring, &budget)
                .expect("printed form parses");
            assert_eq!(f, again, "round trip of {text:?}");
        }
    }
}

pub fn poly_json(data: &[u8]) {
    let Some(text) = text(data) else { return };
    let Ok(json) = serde_json::from_str::<hwcong::laurent::PolyJson>(text) else {
        return;
    };
    for base in rings() {
        let Ok(ring) = LaurentPoly::ring_for_json(&json, &base) else {
            continue;
        };
        if let Ok(f) = LaurentPoly::from_json(&json, &ring) {
            let again = LaurentPoly::from_json(&f.to_json(), &ring).expect("emitted json decodes");
            assert_eq!(f, again, "round trip of {text:?}");
        }
    }
}

pub fn ring_element(data: &[u8]) {
    let Some(text) = text(data) else { return };
    let budget = budget();
    for ring in rings() {
        if let Ok(c) = parse_ring_element_with_budget(text, &ring, &budget) {
            let again = parse_ring_element_with_budget(&c.to_text(), &ring, &budget)
                .expect("printed form parses");
            assert_eq!(c, again, "round trip of {text:?}");
        }
    }
}

pub fn series_json(data: &[u8]) {
    let Some(text) = text(data) else { return };
    let Ok(json) = serde_json::from_str::<SeriesJson>(text) else {
        return;
    };
    if json.n > 64 || json.vars.len() > 4 {
        return;
    }
    if let Ok(s) = TruncatedSeries::from_json(&json) {
        let again = TruncatedSeries::from_json(&s.to_json()).expect("emitted json decodes");
        assert_eq!(s, again, "round trip of {text:?}");
    }
}
