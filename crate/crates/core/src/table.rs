//! CSV tables written and read by the command-line tools.

use std::io::{Read, Write};

use crate::error::{parse_err, Error, Result};
use crate::format::g9;
use crate::mi::{BackendKind, CurveLevel, MiCurve, MiPoint, MiRow};
use crate::rate::GainPoint;
use crate::sim::BerRecord;

pub const MI_CURVE_HEADER: [&str; 7] = [
    "snr_linear",
    "snr_db",
    "mi_low",
    "mi_high",
    "mi_total",
    "backend",
    "stderr",
];

pub const AR_POINTS_HEADER: [&str; 6] = ["M", "snr_linear", "snr_db", "ar_bits", "mi_bits", "gain_db"];

pub const BER_HEADER: [&str; 11] = [
    "snr_db",
    "snr_linear",
    "M",
    "mode",
    "frames",
    "bit_errors",
    "frame_errors",
    "ber",
    "stderr",
    "avg_iterations",
    "high_level_ber",
];

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

fn io_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// One line of an MI curve file. `stderr` belongs to `mi_low`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiCurveRow {
    pub snr_linear: f64,
    pub snr_db: f64,
    pub mi_low: f64,
    pub mi_high: f64,
    pub mi_total: f64,
    pub backend: BackendKind,
    pub stderr: f64,
}

impl From<&MiRow> for MiCurveRow {
    fn from(r: &MiRow) -> Self {
        Self {
            snr_linear: r.gamma,
            snr_db: crate::channel::to_db(r.gamma),
            mi_low: r.low.value,
            mi_high: r.high.value,
            mi_total: r.total.value,
            backend: r.low.backend,
            stderr: r.low.stderr,
        }
    }
}

pub fn write_mi_curve<W: Write>(out: W, rows: &[MiCurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MI_CURVE_HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record([
            g9(r.snr_linear),
            g9(r.snr_db),
            g9(r.mi_low),
            g9(r.mi_high),
            g9(r.mi_total),
            r.backend.as_str().to_string(),
            g9(r.stderr),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file produced by [`write_mi_curve`]. Errors name the 1-based line.
pub fn read_mi_curve<R: Read>(input: R) -> Result<Vec<MiCurveRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = r.records();
    let header = match records.next() {
        Some(h) => h.map_err(csv_err)?,
        None => return parse_err(0, "empty file"),
    };
    if header.iter().ne(MI_CURVE_HEADER) {
        return parse_err(1, format!("expected header {}", MI_CURVE_HEADER.join(",")));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != MI_CURVE_HEADER.len() {
            return parse_err(line, format!("expected 7 fields, found {}", rec.len()));
        }
        let num = |i: usize| -> Result<f64> {
            match rec[i].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => parse_err(line, format!("bad {} value {:?}", MI_CURVE_HEADER[i], &rec[i])),
            }
        };
        let backend = match rec[5].parse::<BackendKind>() {
            Ok(b) => b,
            Err(_) => return parse_err(line, format!("bad backend {:?}", &rec[5])),
        };
        rows.push(MiCurveRow {
            snr_linear: num(0)?,
            snr_db: num(1).or_else(|e| if &rec[1] == "-inf" { Ok(f64::NEG_INFINITY) } else { Err(e) })?,
            mi_low: num(2)?,
            mi_high: num(3)?,
            mi_total: num(4)?,
            backend,
            stderr: num(6)?,
        });
    }
    Ok(rows)
}

/// Builds one level's curve from file rows; γ must be strictly increasing.
pub fn curve_from_rows(rows: &[MiCurveRow], level: CurveLevel) -> Result<MiCurve> {
    let points = rows
        .iter()
        .map(|r| MiPoint {
            gamma: r.snr_linear,
            value: match level {
                CurveLevel::Low => r.mi_low,
                CurveLevel::High => r.mi_high,
                CurveLevel::Total => r.mi_total,
            },
            backend: r.backend,
            stderr: if level == CurveLevel::Low { r.stderr } else { 0.0 },
        })
        .collect();
    MiCurve::new(level, points)
}

pub fn write_ar_points<W: Write>(out: W, points: &[GainPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AR_POINTS_HEADER).map_err(io_err)?;
    for p in points {
        w.write_record([
            p.m.to_string(),
            g9(p.gamma_m),
            g9(crate::channel::to_db(p.gamma_m)),
            g9(p.ar),
            g9(p.mi_at_gamma_m),
            p.gain_db.map(g9).unwrap_or_default(),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ber<W: Write>(out: W, m: usize, mode: &str, records: &[BerRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BER_HEADER).map_err(io_err)?;
    for r in records {
        w.write_record([
            g9(r.snr_db),
            g9(r.snr_linear),
            m.to_string(),
            mode.to_string(),
            r.frames.to_string(),
            r.bit_errors.to_string(),
            r.frame_errors.to_string(),
            g9(r.ber),
            g9(r.stderr),
            g9(r.avg_iterations),
            g9(r.high_level_ber),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}
