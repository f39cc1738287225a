#![no_main]

use a12::lie::CompactLieAlgebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Large su(n) is slow to build; the parser itself is what is under test.
    if data.len() > 16 {
        return;
    }
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = CompactLieAlgebra::parse(s) {
            assert_eq!(CompactLieAlgebra::parse(&g.spec()).unwrap().dim(), g.dim());
        }
    }
});
