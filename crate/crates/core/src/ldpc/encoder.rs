//! Systematic encoders derived from `H`.

/// Encoder structure, chosen once per code.
#[derive(Debug, Clone)]
pub struct Encoder {
    info_positions: Vec<usize>,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// The last `m` columns of `H` are lower triangular with a unit diagonal
    /// (the staircase parity of IRA / DVB-S2 style codes). Parity bit `i` is
    /// the XOR of the other entries of row `i`.
    Staircase { k: usize, rows: Vec<Vec<u32>> },
    /// Reduced row echelon form of `H` over GF(2) as bit rows; row `i` has
    /// its pivot at `pivots[i]` and no other pivot column set.
    Dense {
        words: usize,
        pivots: Vec<usize>,
        reduced: Vec<Vec<u64>>,
    },
}

impl Encoder {
    pub(super) fn new(n: usize, rows: &[Vec<u32>]) -> Self {
        let m = rows.len();
        if n > m {
            let k = n - m;
            let staircase = rows
                .iter()
                .enumerate()
                .all(|(i, r)| r.last().map(|&c| c as usize) == Some(k + i));
            if staircase {
                return Self {
                    info_positions: (0..k).collect(),
                    kind: Kind::Staircase {
                        k,
                        rows: rows.to_vec(),
                    },
                };
            }
        }
        Self::dense(n, rows)
    }

    fn dense(n: usize, rows: &[Vec<u32>]) -> Self {
        let words = n.div_ceil(64);
        let mut mat: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                let mut bits = vec![0u64; words];
                for &c in r {
                    bits[c as usize / 64] ^= 1 << (c % 64);
                }
                bits
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        // pivot from the right so parity lands at the end where possible
        for col in (0..n).rev() {
            if rank == mat.len() {
                break;
            }
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..mat.len()).find(|&r| mat[r][w] & b != 0) else {
                continue;
            };
            mat.swap(rank, p);
            let pivot_row = mat[rank].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != rank && row[w] & b != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        mat.truncate(rank);
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        Self {
            info_positions: (0..n).filter(|&c| !is_pivot[c]).collect(),
            kind: Kind::Dense {
                words,
                pivots,
                reduced: mat,
            },
        }
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn is_staircase(&self) -> bool {
        matches!(self.kind, Kind::Staircase { .. })
    }

    /// Writes the codeword for `info` into `out` (length n).
    pub(super) fn encode_into(&self, info: &[u8], out: &mut [u8]) {
        match &self.kind {
            Kind::Staircase { k, rows } => {
                out[..*k].copy_from_slice(info);
                for (i, row) in rows.iter().enumerate() {
                    let body = &row[..row.len() - 1];
                    out[k + i] = body.iter().fold(0u8, |acc, &c| acc ^ out[c as usize]);
                }
            }
            Kind::Dense {
                words,
                pivots,
                reduced,
            } => {
                let mut bits = vec![0u64; *words];
                for (&pos, &b) in self.info_positions.iter().zip(info) {
                    if b & 1 == 1 {
                        bits[pos / 64] |= 1 << (pos % 64);
                    }
                }
                // pivot columns of `bits` are still zero, so each product
                // only sees information positions
                let parity: Vec<u8> = reduced
                    .iter()
                    .map(|row| {
                        let ones: u32 = row
                            .iter()
                            .zip(&bits)
                            .map(|(a, b)| (a & b).count_ones())
                            .sum();
                        (ones & 1) as u8
                    })
                    .collect();
                out.fill(0);
                for (&pos, &b) in self.info_positions.iter().zip(info) {
                    out[pos] = b & 1;
                }
                for (&p, &b) in pivots.iter().zip(&parity) {
                    out[p] = b;
                }
            }
        }
    }
}
