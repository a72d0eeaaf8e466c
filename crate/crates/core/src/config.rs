//! Flat `key = value` option files and the small value grammars the tools share.

use crate::error::{domain, parse_err, Result};
use crate::mi::linear_grid;

/// One option; keys are case-sensitive and use the command-line spelling
/// without the leading dashes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Parses `key = value` lines. `#` starts a comment, blank lines are skipped,
/// a key may appear once. A bare `key` is shorthand for `key = true`.
pub fn parse_config(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (body, "true"),
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() {
            return parse_err(line, "missing key");
        }
        if !key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return parse_err(line, format!("invalid key {key:?}"));
        }
        if value.is_empty() {
            return parse_err(line, format!("missing value for {key:?}"));
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return parse_err(line, format!("{key:?} already set on line {}", prev.line));
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}

/// `start:step:stop` (inclusive) or a comma-separated list, in dB.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return domain("empty SNR grid");
    }
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .or_else(|_| domain(format!("bad number {s:?} in SNR grid")))?;
        if !v.is_finite() {
            return domain(format!("non-finite value {s:?} in SNR grid"));
        }
        Ok(v)
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, stop] = parts[..] else {
            return domain(format!("range {spec:?} must be start:step:stop"));
        };
        linear_grid(num(start)?, num(stop)?, num(step)?)
    } else {
        spec.split(',').map(num).collect()
    }
}

/// Comma-separated positive integers, e.g. `1,2,4,8`.
pub fn parse_m_list(spec: &str) -> Result<Vec<usize>> {
    let ms = spec
        .split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(m) if m >= 1 => Ok(m),
            _ => domain(format!("bad repetition factor {s:?}")),
        })
        .collect::<Result<Vec<_>>>()?;
    if ms.is_empty() {
        return domain("empty repetition list");
    }
    Ok(ms)
}
