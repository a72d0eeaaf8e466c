#![no_main]

use libfuzzer_sys::fuzz_target;
use mlc_core::mi::CurveLevel;
use mlc_core::table::{curve_from_rows, read_mi_curve, write_mi_curve};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_mi_curve(data) {
        let mut out = Vec::new();
        write_mi_curve(&mut out, &rows).expect("in-memory write");
        let again = read_mi_curve(&out[..]).expect("written curve must parse");
        assert_eq!(again.len(), rows.len());
        if let Ok(curve) = curve_from_rows(&rows, CurveLevel::Low) {
            let (lo, hi) = curve.gamma_range();
            let _ = curve.value_at(0.5 * (lo + hi));
            let _ = curve.gamma_for(0.5);
        }
    }
});
