#![no_main]

use a12_cli::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(s) {
            let again = parse_config(&cfg.to_config_text()).expect("serialized config reparses");
            assert_eq!(again, cfg);
        }
    }
});
