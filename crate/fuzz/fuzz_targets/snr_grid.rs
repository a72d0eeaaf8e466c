#![no_main]

use libfuzzer_sys::fuzz_target;
use mlc_core::config::{parse_m_list, parse_snr_grid};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_snr_grid(text) {
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|g| g.is_finite()));
    }
    if let Ok(ms) = parse_m_list(text) {
        assert!(ms.iter().all(|&m| m >= 1));
    }
});
