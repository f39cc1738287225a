#![no_main]

use a12::family::GeneratingFamily;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(f) = GeneratingFamily::parse(s) {
            let again = GeneratingFamily::parse(&f.spec()).expect("printed spec reparses");
            assert_eq!(again.spec(), f.spec());
        }
    }
});
