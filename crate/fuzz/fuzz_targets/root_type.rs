#![no_main]

use a12::roots::RootSystem;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(rs) = RootSystem::parse(s) {
            assert_eq!(RootSystem::parse(&rs.label()).unwrap().len(), rs.len());
        }
    }
});
