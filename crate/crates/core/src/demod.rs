//! Exact per-level LLRs for the partitioned QPSK alphabet.
//!
//! Convention: a positive LLR favours bit 0 (`v^L = 0 ⇔ llr_low > 0`).

use num_complex::Complex64;

use crate::channel::{combine, RepetitionScheme};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrPair {
    pub low: f64,
    pub high: f64,
}

/// `ln[(e^{-|y-A|²/σ²} + e^{-|y+A|²/σ²}) / (e^{-|y-jA|²/σ²} + e^{-|y+jA|²/σ²})]`.
///
/// The common `-(|y|² + A²)/σ²` factor is cancelled analytically, leaving
/// `ln cosh` terms that are evaluated without overflow.
pub fn llr_low(y: Complex64, amplitude: f64, noise_variance: f64) -> f64 {
    let k = 2.0 * amplitude / noise_variance;
    let (ar, ai) = ((k * y.re).abs(), (k * y.im).abs());
    // ln(e^a + e^-a) = a + ln(1 + e^{-2a})
    (ar - ai) + (-2.0 * ar).exp().ln_1p() - (-2.0 * ai).exp().ln_1p()
}

/// Decision-directed high-level LLR: the real-axis pair when `llr_low > 0`,
/// otherwise (ties included) the imaginary-axis pair.
pub fn llr_high(y: Complex64, llr_low: f64, amplitude: f64, noise_variance: f64) -> f64 {
    let v_low = if llr_low > 0.0 { 0 } else { 1 };
    llr_high_given_low(y, v_low, amplitude, noise_variance)
}

/// High-level LLR inside the pair selected by a known `v^L`, for multistage
/// receivers that feed back the decoded low level.
pub fn llr_high_given_low(y: Complex64, v_low: u8, amplitude: f64, noise_variance: f64) -> f64 {
    let q = if v_low == 0 {
        Complex64::new(amplitude, 0.0)
    } else {
        Complex64::new(0.0, amplitude)
    };
    ((y + q).norm_sqr() - (y - q).norm_sqr()) / noise_variance
}

pub fn llr_pair(y: Complex64, amplitude: f64, noise_variance: f64) -> LlrPair {
    let low = llr_low(y, amplitude, noise_variance);
    LlrPair {
        low,
        high: llr_high(y, low, amplitude, noise_variance),
    }
}

/// Sum-combines each group of `M` slots and demaps the result.
///
/// `amplitude` is the unrepeated constellation amplitude `A` and
/// `noise_variance` the per-slot `σ²`. The combined sample carries `√M·x` in
/// noise of variance `M·σ²`; it is scaled by `1/√M` and demapped at `(A, σ²)`,
/// i.e. at the unrepeated SNR.
pub fn demap_frame(
    ys: &[Complex64],
    scheme: &RepetitionScheme,
    amplitude: f64,
    noise_variance: f64,
) -> Result<Vec<LlrPair>> {
    let m = scheme.m();
    if !ys.len().is_multiple_of(m) {
        return domain(format!(
            "frame of {} samples is not a multiple of M = {m}",
            ys.len()
        ));
    }
    if !(amplitude > 0.0) || !(noise_variance > 0.0) {
        return domain("amplitude and noise variance must be positive");
    }
    ys.chunks(m)
        .map(|slots| {
            let y = combine(slots)? * scheme.scale();
            Ok(llr_pair(y, amplitude, noise_variance))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::LabeledConstellation;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Literal log of the ratio of exponential sums.
    fn llr_low_direct(y: Complex64, a: f64, s2: f64) -> f64 {
        let e = |q: Complex64| (-(y - q).norm_sqr() / s2).exp();
        ((e(c(a, 0.0)) + e(c(-a, 0.0))) / (e(c(0.0, a)) + e(c(0.0, -a)))).ln()
    }

    #[test]
    fn low_examples() {
        assert_eq!(llr_low(c(0.0, 0.0), 1.0, 1.0), 0.0);
        let want = ((1.0 + (-4.0f64).exp()) / (2.0 * (-2.0f64).exp())).ln();
        assert!((llr_low(c(1.0, 0.0), 1.0, 1.0) - want).abs() < 1e-12);
        assert!((want - 1.3250).abs() < 5e-5);
        assert!((llr_low(c(0.0, 1.0), 1.0, 1.0) + want).abs() < 1e-12);
    }

    #[test]
    fn high_examples() {
        assert!((llr_high(c(1.0, 0.0), 1.0, 1.0, 1.0) - 4.0).abs() < 1e-12);
        assert_eq!(llr_high(c(0.0, 0.0), 1.0, 1.0, 1.0), 0.0);
        assert_eq!(llr_high(c(0.0, 0.0), -1.0, 1.0, 1.0), 0.0);
        assert!((llr_high(c(0.0, -1.0), -0.5, 1.0, 1.0) + 4.0).abs() < 1e-12);
        // tie goes to the imaginary pair
        assert!((llr_high(c(0.3, 0.7), 0.0, 1.0, 1.0) - 2.8).abs() < 1e-12);
    }

    #[test]
    fn noiseless_signs_decode_every_label() {
        let q = LabeledConstellation::qpsk(1.3).unwrap();
        for h in 0..2u8 {
            for l in 0..2u8 {
                let p = llr_pair(q.map_bits([h, l]), 1.3, 0.4);
                assert_eq!(p.low > 0.0, l == 0, "label [{h},{l}]");
                assert_eq!(p.high > 0.0, h == 0, "label [{h},{l}]");
            }
        }
    }

    #[test]
    fn stable_for_huge_outputs() {
        for y in [c(1e6, 0.0), c(0.0, -1e6), c(1e6, 1e6 - 1.0), c(-3e5, 7e5)] {
            let p = llr_pair(y, 1.0, 1.0);
            assert!(p.low.is_finite() && p.high.is_finite(), "{y}");
        }
        assert!((llr_low(c(1e6, 0.0), 1.0, 1.0) - 2e6).abs() < 1.0);
    }

    #[test]
    fn demap_frame_cases() {
        let a = 1.0;
        let s2 = 0.5;
        let ys = vec![c(0.2, -0.9), c(1.1, 0.4), c(-0.3, 0.05)];
        let one = RepetitionScheme::new(1).unwrap();
        let out = demap_frame(&ys, &one, a, s2).unwrap();
        for (y, p) in ys.iter().zip(&out) {
            assert_eq!(*p, llr_pair(*y, a, s2));
        }

        let four = RepetitionScheme::new(4).unwrap();
        let slot = c(a / 2.0, 0.0);
        let out = demap_frame(&[slot; 8], &four, a, s2).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|p| p.low > 0.0 && p.high > 0.0));
        // noiseless combine lands exactly on A
        assert!((out[0].low - llr_low(c(a, 0.0), a, s2)).abs() < 1e-12);

        assert!(demap_frame(&ys, &four, a, s2).is_err());
    }

    proptest! {
        #[test]
        fn low_matches_direct_form(re in -3.0f64..3.0, im in -3.0f64..3.0,
                                   a in 0.2f64..2.0, s2 in 0.2f64..4.0) {
            let y = c(re, im);
            prop_assert!((llr_low(y, a, s2) - llr_low_direct(y, a, s2)).abs() < 1e-10);
        }

        #[test]
        fn invariant_under_joint_scaling(re in -3.0f64..3.0, im in -3.0f64..3.0,
                                         a in 0.2f64..2.0, s2 in 0.2f64..4.0,
                                         k in 0.1f64..10.0) {
            let p = llr_pair(c(re, im), a, s2);
            let q = llr_pair(c(re, im) * k, a * k, s2 * k * k);
            prop_assert!((p.low - q.low).abs() < 1e-9 * (1.0 + p.low.abs()));
            prop_assert!((p.high - q.high).abs() < 1e-9 * (1.0 + p.high.abs()));
        }

        #[test]
        fn rotation_swaps_low_hypotheses(re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let y = c(re, im);
            let jy = y * c(0.0, 1.0);
            prop_assert!((llr_low(y, 1.0, 1.0) + llr_low(jy, 1.0, 1.0)).abs() < 1e-12);
        }
    }
}
