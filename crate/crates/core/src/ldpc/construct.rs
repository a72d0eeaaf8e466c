//! Pseudorandom parity-check matrix constructions.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::LdpcCode;
use crate::channel::stream_rng;
use crate::error::{domain, Result};

/// Progressive edge growth with constant column weight.
///
/// Each new edge of a variable goes to a check as far away as possible in the
/// current graph among checks below the row-degree cap `ceil(n·w/checks)`,
/// preferring the lowest check degree and breaking remaining ties with the
/// seeded generator. With `n·w` divisible by `checks` the result is regular.
///
/// The degree cap can force a 4-cycle late in the construction; up to
/// `PEG_ATTEMPTS` generator streams of `seed` are tried and the first
/// 4-cycle-free graph is returned (the last attempt otherwise).
pub fn peg(n: usize, checks: usize, col_weight: usize, seed: u64) -> Result<LdpcCode> {
    let mut last = None;
    for attempt in 0..PEG_ATTEMPTS {
        let code = peg_once(n, checks, col_weight, seed, attempt)?;
        if !has_four_cycle(&code) {
            return Ok(code);
        }
        last = Some(code);
    }
    Ok(last.expect("at least one attempt"))
}

pub const PEG_ATTEMPTS: u64 = 64;

fn peg_once(
    n: usize,
    checks: usize,
    col_weight: usize,
    seed: u64,
    stream: u64,
) -> Result<LdpcCode> {
    if n == 0 || checks == 0 || checks >= n {
        return domain(format!("need 0 < checks < n, got n={n}, checks={checks}"));
    }
    if col_weight == 0 || col_weight > checks {
        return domain(format!("column weight {col_weight} invalid for {checks} checks"));
    }
    let cap = (n * col_weight).div_ceil(checks);
    let mut rng = stream_rng(seed, stream);
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut chk_adj: Vec<Vec<usize>> = vec![Vec::new(); checks];
    let mut dist = vec![usize::MAX; checks];
    let mut var_seen = vec![false; n];

    for v in 0..n {
        for _ in 0..col_weight {
            check_distances(v, &var_adj, &chk_adj, &mut dist, &mut var_seen);
            let open = |c: usize| chk_adj[c].len() < cap && !var_adj[v].contains(&c);
            let far = (0..checks).filter(|&c| open(c)).map(|c| dist[c]).max();
            let Some(far) = far else {
                return domain("no check left below the degree cap");
            };
            let pool: Vec<usize> = (0..checks).filter(|&c| open(c) && dist[c] == far).collect();
            let min_deg = pool.iter().map(|&c| chk_adj[c].len()).min().unwrap_or(0);
            let best: Vec<usize> = pool
                .into_iter()
                .filter(|&c| chk_adj[c].len() == min_deg)
                .collect();
            let &c = best.choose(&mut rng).expect("pool is non-empty");
            var_adj[v].push(c);
            chk_adj[c].push(v);
        }
    }
    if let Some(c) = chk_adj.iter().position(Vec::is_empty) {
        return domain(format!("check {c} received no edges; use fewer checks"));
    }
    LdpcCode::from_rows(n, chk_adj)
}

/// Breadth-first check distances (in check layers) from variable `v`;
/// unreachable checks get `usize::MAX`.
fn check_distances(
    v: usize,
    var_adj: &[Vec<usize>],
    chk_adj: &[Vec<usize>],
    dist: &mut [usize],
    var_seen: &mut [bool],
) {
    dist.fill(usize::MAX);
    var_seen.fill(false);
    var_seen[v] = true;
    let mut frontier = vec![v];
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &c in &var_adj[u] {
                if dist[c] == usize::MAX {
                    dist[c] = depth;
                    for &w in &chk_adj[c] {
                        if !var_seen[w] {
                            var_seen[w] = true;
                            next.push(w);
                        }
                    }
                }
            }
        }
        frontier = next;
        depth += 1;
    }
}

/// Repeat-accumulate structure: `k` information columns of weight
/// `info_col_weight` placed at random, then a dual-diagonal parity part.
/// The encoder for such a matrix is a forward substitution.
pub fn ira(n: usize, k: usize, info_col_weight: usize, seed: u64) -> Result<LdpcCode> {
    if k == 0 || k >= n {
        return domain(format!("need 0 < k < n, got n={n}, k={k}"));
    }
    let m = n - k;
    if info_col_weight == 0 || info_col_weight > m {
        return domain("information column weight must be in 1..=n-k");
    }
    let mut rng = stream_rng(seed, 0);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m];
    for col in 0..k {
        let mut picked: Vec<usize> = Vec::with_capacity(info_col_weight);
        while picked.len() < info_col_weight {
            let r = rng.random_range(0..m);
            if !picked.contains(&r) {
                picked.push(r);
            }
        }
        for r in picked {
            rows[r].push(col);
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        if i > 0 {
            row.push(k + i - 1);
        }
        row.push(k + i);
    }
    LdpcCode::from_rows(n, rows)
}

/// Girth-4 check: true when two checks share two or more variables.
pub fn has_four_cycle(code: &LdpcCode) -> bool {
    let mut seen = std::collections::HashSet::new();
    for row in code.rows() {
        for (a, &x) in row.iter().enumerate() {
            for &y in &row[a + 1..] {
                if !seen.insert((x, y)) {
                    return true;
                }
            }
        }
    }
    false
}
