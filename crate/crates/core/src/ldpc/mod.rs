//! Binary LDPC codes: sparse parity-check matrices, encoding and belief
//! propagation decoding.

mod alist;
pub mod construct;
mod decoder;
mod encoder;

pub use alist::{parse_alist, write_alist};
pub use decoder::{decode_bp, BpDecoder, CheckRule, DecodeResult, DecoderConfig};
pub use encoder::Encoder;

use std::path::Path;

use crate::error::{domain, Result};

/// A parity-check matrix `H` ((n-k) × n) with its encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    /// Column indices of each check, sorted.
    rows: Vec<Vec<u32>>,
    /// Check indices of each variable, sorted.
    cols: Vec<Vec<u32>>,
    encoder: Encoder,
}

impl LdpcCode {
    /// Builds a code from check-node adjacency lists over `n` variables.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || rows.is_empty() {
            return domain("parity-check matrix must be non-empty");
        }
        if n > u32::MAX as usize || rows.len() > u32::MAX as usize {
            return domain("matrix dimensions exceed u32 indexing");
        }
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut out_rows = Vec::with_capacity(rows.len());
        for (r, row) in rows.into_iter().enumerate() {
            let mut row: Vec<u32> = row
                .into_iter()
                .map(|c| {
                    if c >= n {
                        domain(format!("row {r} references column {c} >= n = {n}"))
                    } else {
                        Ok(c as u32)
                    }
                })
                .collect::<Result<_>>()?;
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return domain(format!("row {r} lists a column twice"));
            }
            for &c in &row {
                cols[c as usize].push(r as u32);
            }
            out_rows.push(row);
        }
        if let Some(c) = cols.iter().position(|c| c.is_empty()) {
            return domain(format!("column {c} has no checks"));
        }
        let encoder = Encoder::new(n, &out_rows);
        Ok(Self {
            n,
            rows: out_rows,
            cols,
            encoder,
        })
    }

    pub fn load_alist(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_alist(&text)
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity checks (rows of `H`).
    pub fn checks(&self) -> usize {
        self.rows.len()
    }

    /// True code dimension, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.encoder.info_positions().len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    /// Codeword positions that carry the information bits, in order.
    pub fn info_positions(&self) -> &[usize] {
        self.encoder.info_positions()
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return domain(format!(
                "expected {} information bits, got {}",
                self.k(),
                info.len()
            ));
        }
        let mut out = vec![0u8; self.n];
        self.encoder.encode_into(info, &mut out);
        Ok(out)
    }

    /// Information bits of a codeword.
    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions().iter().map(|&p| word[p]).collect()
    }

    /// `H·cᵀ` over GF(2) is zero.
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n
            && self
                .rows
                .iter()
                .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ word[c as usize]) == 0)
    }

    /// Number of unsatisfied checks.
    pub fn syndrome_weight(&self, word: &[u8]) -> usize {
        self.rows
            .iter()
            .filter(|row| row.iter().fold(0u8, |acc, &c| acc ^ word[c as usize]) != 0)
            .count()
    }
}
