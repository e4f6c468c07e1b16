#![no_main]

use bdqbf_core::dimacs::{emit_qdimacs, parse_qdimacs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_qdimacs(text) {
        let again = parse_qdimacs(&emit_qdimacs(&f)).expect("emitted QDIMACS parses");
        assert_eq!(f, again);
    }
});
