#![no_main]

use libfuzzer_sys::fuzz_target;
use mlc_core::ldpc::{parse_alist, write_alist};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(code) = parse_alist(text) {
        let again = parse_alist(&write_alist(&code)).expect("written alist must parse");
        assert_eq!(again.rows(), code.rows());
        assert!(code.k() <= code.n());
    }
});
