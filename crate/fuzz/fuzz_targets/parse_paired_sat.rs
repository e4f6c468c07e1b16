#![no_main]

use bdqbf_core::dimacs::{emit_paired_sat, parse_paired_sat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_paired_sat(text) {
        let again = parse_paired_sat(&emit_paired_sat(&p)).expect("emitted Paired-SAT parses");
        assert_eq!(p, again);
    }
});
