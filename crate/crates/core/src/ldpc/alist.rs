//! The alist text format for sparse binary matrices.
//!
//! ```text
//! N M                      columns, rows
//! cmax rmax                largest column / row weight
//! c_1 ... c_N              column weights
//! r_1 ... r_M              row weights
//! N lines                  1-based row indices of each column, 0-padded
//! M lines                  1-based column indices of each row, 0-padded
//! ```

use std::fmt::Write as _;

use super::LdpcCode;
use crate::error::{parse_err, Error, Result};

/// Dimensions above this are rejected before anything is allocated.
const MAX_DIM: usize = 1 << 24;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as (1-based number, numbers).
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (i, line) in self.inner.by_ref() {
            let lineno = i + 1;
            self.last = lineno;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("expected a non-negative integer in {what}, found {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((lineno, nums));
        }
        parse_err(0, format!("unexpected end of input while reading {what}"))
    }

    fn has_more(&mut self) -> Option<usize> {
        self.inner
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .map(|(i, _)| i + 1)
    }
}

fn exact<const N: usize>(line: usize, nums: &[usize], what: &str) -> Result<[usize; N]> {
    nums.try_into().map_err(|_| Error::Parse {
        line,
        msg: format!("{what}: expected {N} numbers, found {}", nums.len()),
    })
}

/// Reads one adjacency line: `weight` indices in `1..=limit`, then zero padding.
fn adjacency(
    line: usize,
    nums: &[usize],
    weight: usize,
    limit: usize,
    what: &str,
) -> Result<Vec<usize>> {
    let nonzero = nums.iter().take_while(|&&v| v != 0).count();
    if nums[nonzero..].iter().any(|&v| v != 0) {
        return parse_err(line, format!("{what}: zero padding followed by an index"));
    }
    if nonzero != weight {
        return parse_err(
            line,
            format!("{what}: declared weight {weight} but lists {nonzero} indices"),
        );
    }
    let mut out = Vec::with_capacity(weight);
    for &v in &nums[..nonzero] {
        if v > limit {
            return parse_err(line, format!("{what}: index {v} exceeds {limit}"));
        }
        out.push(v - 1);
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return parse_err(line, format!("{what}: repeated index"));
    }
    Ok(out)
}

/// Parses alist text into a code, validating that column and row lists agree.
pub fn parse_alist(text: &str) -> Result<LdpcCode> {
    let mut lines = Lines::new(text);

    let (l, nums) = lines.next_numbers("dimensions")?;
    let [n, m] = exact::<2>(l, &nums, "dimensions")?;
    if n == 0 || m == 0 || n > MAX_DIM || m > MAX_DIM {
        return parse_err(l, format!("unsupported dimensions {n} x {m}"));
    }

    let (l, nums) = lines.next_numbers("maximum weights")?;
    let [cmax, rmax] = exact::<2>(l, &nums, "maximum weights")?;

    let (l_cw, col_weights) = lines.next_numbers("column weights")?;
    if col_weights.len() != n {
        return parse_err(
            l_cw,
            format!("expected {n} column weights, found {}", col_weights.len()),
        );
    }
    let (l_rw, row_weights) = lines.next_numbers("row weights")?;
    if row_weights.len() != m {
        return parse_err(
            l_rw,
            format!("expected {m} row weights, found {}", row_weights.len()),
        );
    }
    if let Some(j) = col_weights.iter().position(|&w| w == 0) {
        return parse_err(l_cw, format!("column {} has zero weight", j + 1));
    }
    if let Some(&w) = col_weights.iter().find(|&&w| w > cmax || w > m) {
        return parse_err(l_cw, format!("column weight {w} exceeds maximum {cmax} or {m} rows"));
    }
    if let Some(&w) = row_weights.iter().find(|&&w| w > rmax || w > n) {
        return parse_err(l_rw, format!("row weight {w} exceeds maximum {rmax} or {n} columns"));
    }
    let total_c: usize = col_weights.iter().sum();
    let total_r: usize = row_weights.iter().sum();
    if total_c != total_r {
        return parse_err(
            l_rw,
            format!("column weights sum to {total_c} but row weights sum to {total_r}"),
        );
    }

    let mut col_lists = Vec::with_capacity(n);
    for (j, &w) in col_weights.iter().enumerate() {
        let what = format!("column {}", j + 1);
        let (l, nums) = lines.next_numbers(&what)?;
        col_lists.push((l, adjacency(l, &nums, w, m, &what)?));
    }
    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for (i, &w) in row_weights.iter().enumerate() {
        let what = format!("row {}", i + 1);
        let (l, nums) = lines.next_numbers(&what)?;
        rows.push(adjacency(l, &nums, w, n, &what)?);
        row_lines.push(l);
    }
    if let Some(l) = lines.has_more() {
        return parse_err(l, "trailing data after the last row");
    }

    // column lists must describe the same matrix as the row lists
    let mut from_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            from_rows[j].push(i);
        }
    }
    for (j, (l, list)) in col_lists.iter_mut().enumerate() {
        list.sort_unstable();
        if *list != from_rows[j] {
            return parse_err(
                *l,
                format!("column {} disagrees with the row lists", j + 1),
            );
        }
    }

    LdpcCode::from_rows(n, rows)
}

/// Serializes `H` in alist form with zero padding.
pub fn write_alist(code: &LdpcCode) -> String {
    let cols = code.cols();
    let rows = code.rows();
    let cmax = cols.iter().map(Vec::len).max().unwrap_or(0);
    let rmax = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", code.n(), code.checks());
    let _ = writeln!(s, "{cmax} {rmax}");
    let join = |v: &mut dyn Iterator<Item = usize>| -> String {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(s, "{}", join(&mut cols.iter().map(Vec::len)));
    let _ = writeln!(s, "{}", join(&mut rows.iter().map(Vec::len)));
    for (lists, width) in [(cols, cmax), (rows, rmax)] {
        for list in lists {
            let mut it = list
                .iter()
                .map(|&x| x as usize + 1)
                .chain(std::iter::repeat_n(0, width - list.len()));
            let _ = writeln!(s, "{}", join(&mut it));
        }
    }
    s
}
