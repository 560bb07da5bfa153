#![no_main]

use libfuzzer_sys::fuzz_target;
use qterm::model::json::{laurent_to_json, parse_laurent};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_laurent(text) else { return };
    let again = parse_laurent(&laurent_to_json(&p).to_string()).expect("serialized polynomial parses");
    assert_eq!(again, p);
    let _ = p.eval_root_of_unity(7);
});
