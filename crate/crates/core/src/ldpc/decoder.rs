//! Flooding belief propagation in the LLR domain.
//!
//! LLRs are `ln P(bit = 0) / P(bit = 1)`, so a positive value decides 0.

use super::LdpcCode;
use crate::error::{domain, Result};

/// Largest check-to-variable magnitude produced by the sum-product rule.
const TANH_CLAMP: f64 = 1.0 - 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckRule {
    /// Exact tanh rule.
    SumProduct,
    /// Scaled min-sum approximation.
    MinSum { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub max_iters: usize,
    pub rule: CheckRule,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            rule: CheckRule::SumProduct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Hard decisions on every codeword position.
    pub bits: Vec<u8>,
    pub iterations: usize,
    /// The hard decisions satisfy every check and no posterior LLR is
    /// exactly zero (an undecided bit never counts as decoded).
    pub converged: bool,
}

/// Decoder with reusable message memory. One per worker.
#[derive(Debug, Clone)]
pub struct BpDecoder {
    config: DecoderConfig,
    c2v: Vec<f64>,
    total: Vec<f64>,
    scratch: Vec<f64>,
    prefix: Vec<f64>,
}

impl BpDecoder {
    pub fn new(config: DecoderConfig) -> Result<Self> {
        if config.max_iters == 0 {
            return domain("max_iters must be at least 1");
        }
        if let CheckRule::MinSum { scale } = config.rule {
            if !(scale > 0.0 && scale <= 1.0) {
                return domain(format!("min-sum scale must lie in (0, 1], got {scale}"));
            }
        }
        Ok(Self {
            config,
            c2v: Vec::new(),
            total: Vec::new(),
            scratch: Vec::new(),
            prefix: Vec::new(),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn decode(&mut self, code: &LdpcCode, llrs: &[f64]) -> Result<DecodeResult> {
        if llrs.len() != code.n() {
            return domain(format!(
                "expected {} channel LLRs, got {}",
                code.n(),
                llrs.len()
            ));
        }
        if let Some(i) = llrs.iter().position(|l| !l.is_finite()) {
            return domain(format!("channel LLR {i} is not finite"));
        }
        self.c2v.clear();
        self.c2v.resize(code.edges(), 0.0);
        self.total.clear();
        self.total.extend_from_slice(llrs);
        let mut bits = vec![0u8; code.n()];

        for iter in 1..=self.config.max_iters {
            let mut e = 0;
            for row in code.rows() {
                let d = row.len();
                self.scratch.clear();
                for (j, &v) in row.iter().enumerate() {
                    self.scratch.push(self.total[v as usize] - self.c2v[e + j]);
                }
                let out = &mut self.c2v[e..e + d];
                match self.config.rule {
                    CheckRule::SumProduct => {
                        sum_product(&mut self.scratch, &mut self.prefix, out)
                    }
                    CheckRule::MinSum { scale } => min_sum(&self.scratch, scale, out),
                }
                e += d;
            }

            self.total.copy_from_slice(llrs);
            let mut e = 0;
            for row in code.rows() {
                for &v in row {
                    self.total[v as usize] += self.c2v[e];
                    e += 1;
                }
            }

            let mut undecided = false;
            for (b, &t) in bits.iter_mut().zip(&self.total) {
                *b = (t < 0.0) as u8;
                undecided |= t == 0.0;
            }
            if !undecided && code.is_codeword(&bits) {
                return Ok(DecodeResult {
                    bits,
                    iterations: iter,
                    converged: true,
                });
            }
        }
        Ok(DecodeResult {
            bits,
            iterations: self.config.max_iters,
            converged: false,
        })
    }
}

/// `c2v_j = 2 atanh(Π_{i≠j} tanh(v2c_i / 2))`, with the exclusion done by
/// prefix and suffix products so zero factors are handled exactly.
fn sum_product(msgs: &mut [f64], prefix: &mut Vec<f64>, out: &mut [f64]) {
    for m in msgs.iter_mut() {
        // tanh(m/2) = expm1(m) / (expm1(m) + 2), symmetric in sign
        let e = m.abs().min(80.0).exp_m1();
        *m = (e / (e + 2.0)).copysign(*m);
    }
    prefix.clear();
    let mut acc = 1.0;
    for &t in msgs.iter() {
        prefix.push(acc);
        acc *= t;
    }
    let mut suffix = 1.0;
    for j in (0..msgs.len()).rev() {
        let p = (prefix[j] * suffix).clamp(-TANH_CLAMP, TANH_CLAMP);
        // 2 atanh(p) = ln1p(2|p| / (1 - |p|)), with the sign of p
        let a = p.abs();
        out[j] = (2.0 * a / (1.0 - a)).ln_1p().copysign(p);
        suffix *= msgs[j];
    }
}

fn min_sum(msgs: &[f64], scale: f64, out: &mut [f64]) {
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut arg = 0;
    let mut negative = false;
    for (j, &m) in msgs.iter().enumerate() {
        let a = m.abs();
        negative ^= m < 0.0;
        if a < min1 {
            min2 = min1;
            min1 = a;
            arg = j;
        } else if a < min2 {
            min2 = a;
        }
    }
    for (j, (&m, o)) in msgs.iter().zip(out.iter_mut()).enumerate() {
        let mag = if j == arg { min2 } else { min1 };
        let neg = negative ^ (m < 0.0);
        *o = if neg { -scale * mag } else { scale * mag };
    }
}

/// One-shot decode with a fresh decoder.
pub fn decode_bp(code: &LdpcCode, llrs: &[f64], max_iters: usize) -> Result<DecodeResult> {
    BpDecoder::new(DecoderConfig {
        max_iters,
        ..DecoderConfig::default()
    })?
    .decode(code, llrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::toy::toy;

    fn llrs_for(word: &[u8], mag: f64) -> Vec<f64> {
        word.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn noiseless_word_converges_in_one_iteration() {
        let c = toy();
        let w = c.encode(&[1, 0, 1]).unwrap();
        let r = decode_bp(&c, &llrs_for(&w, 30.0), 50).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.bits, w);
    }

    #[test]
    fn zero_llrs_never_converge() {
        let c = toy();
        let r = decode_bp(&c, &[0.0; 6], 20).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 20);
    }

    #[test]
    fn every_single_flip_is_corrected_on_the_toy_code() {
        let c = toy();
        for v in 0..8u8 {
            let info = [v & 1, (v >> 1) & 1, (v >> 2) & 1];
            let w = c.encode(&info).unwrap();
            for flip in 0..6 {
                let mut l = llrs_for(&w, 2.0);
                l[flip] = -l[flip];
                for rule in [CheckRule::SumProduct, CheckRule::MinSum { scale: 0.75 }] {
                    let mut dec = BpDecoder::new(DecoderConfig { max_iters: 50, rule }).unwrap();
                    let r = dec.decode(&c, &l).unwrap();
                    assert!(r.converged, "info {info:?} flip {flip} {rule:?}");
                    assert_eq!(r.bits, w, "info {info:?} flip {flip} {rule:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let c = toy();
        assert!(decode_bp(&c, &[0.0; 5], 10).is_err());
        assert!(decode_bp(&c, &[0.0, 0.0, f64::NAN, 0.0, 0.0, 0.0], 10).is_err());
        assert!(decode_bp(&c, &[0.0; 6], 0).is_err());
        assert!(BpDecoder::new(DecoderConfig {
            max_iters: 5,
            rule: CheckRule::MinSum { scale: 0.0 }
        })
        .is_err());
    }

    #[test]
    fn converged_implies_zero_syndrome() {
        let c = toy();
        let patterns = [
            [1.0, -0.5, 0.3, 2.0, -1.0, 0.1],
            [0.2, 0.2, -0.2, 0.2, 0.2, -0.2],
            [-3.0, 1.0, 1.0, 1.0, -0.1, 0.4],
        ];
        for l in patterns {
            let r = decode_bp(&c, &l, 30).unwrap();
            assert_eq!(r.converged, c.is_codeword(&r.bits), "{l:?}");
        }
    }
}
