#![no_main]

use a12::expr::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(e) = Expr::parse(s) {
            Expr::parse(&e.to_string()).expect("printed expression reparses");
        }
    }
});
