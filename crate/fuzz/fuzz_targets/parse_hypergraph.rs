#![no_main]

use bdqbf_core::hypergraph::{emit_hypergraph, parse_hypergraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = parse_hypergraph(text) {
        let again = parse_hypergraph(&emit_hypergraph(&h)).expect("emitted hypergraph parses");
        assert_eq!(h, again);
    }
});
