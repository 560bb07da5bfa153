#![no_main]

use libfuzzer_sys::fuzz_target;
use qterm::model::json::{parse_term, term_to_json};
use qterm::model::AnyTerm;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(term) = parse_term(text) else { return };
    // accepted documents must survive a round trip unchanged
    let again = parse_term(&term_to_json(&term).to_string()).expect("serialized term parses");
    assert_eq!(again, term);
    if let AnyTerm::Special(s) = &term {
        let _ = s.polytope_points(3);
    }
});
