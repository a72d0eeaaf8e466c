//! Achievable rate of the repeated low level.
//!
//! Repeating `x/√M` over `M` slots and sum-combining keeps the post-combining
//! SNR, so a rate `R1` that works at `γ1` gives `R1/M` at per-slot SNR `γ1/M`.
//! The resulting points lie on the line `R(γ) = (R1/γ1)·γ`, which sits above
//! the MI curve wherever the curve is convex below its chord.

use crate::channel::to_db;
use crate::error::{domain, Result};
use crate::mi::MiCurve;

/// `R(γ) = κ·γ` through the origin and the anchor `(γ1, R1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateLine {
    gamma1: f64,
    rate1: f64,
    slope: f64,
}

impl RateLine {
    /// Line through an arbitrary anchor, e.g. a simulated operating point.
    pub fn new(gamma1: f64, rate1: f64) -> Result<Self> {
        if !(gamma1 > 0.0) || !gamma1.is_finite() {
            return domain(format!("anchor SNR must be positive, got {gamma1}"));
        }
        if !(rate1 > 0.0) || !rate1.is_finite() {
            return domain(format!("anchor rate must be positive, got {rate1}"));
        }
        Ok(Self {
            gamma1,
            rate1,
            slope: rate1 / gamma1,
        })
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn rate1(&self) -> f64 {
        self.rate1
    }

    /// `κ = R1/γ1`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// `R1·(γ/γ1)`; exact at the anchor.
    pub fn rate_at(&self, gamma: f64) -> f64 {
        self.rate1 * (gamma / self.gamma1)
    }
}

/// Anchors the line on the MI curve itself: `R1 = I^L(γ1)`.
pub fn line_from_mi(gamma1: f64, curve: &MiCurve) -> Result<RateLine> {
    let rate1 = curve.value_at(gamma1)?;
    RateLine::new(gamma1, rate1)
}

/// One repetition factor's operating point on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    pub m: usize,
    /// `γ1/M`.
    pub gamma_m: f64,
    /// `κ·γ_M`.
    pub ar: f64,
    pub mi_at_gamma_m: f64,
    /// `10·log10(γ*(ar)/γ_M)`, where `γ*(r)` is the SNR at which the MI curve
    /// reaches `r`. `None` when `ar` lies outside the curve's value range.
    pub gain_db: Option<f64>,
}

pub fn ar_points(line: &RateLine, curve: &MiCurve, ms: &[usize]) -> Result<Vec<GainPoint>> {
    ms.iter()
        .map(|&m| {
            if m == 0 {
                return domain("repetition factor must be at least 1");
            }
            let gamma_m = line.gamma1() / m as f64;
            let ar = line.rate_at(gamma_m);
            let mi_at_gamma_m = curve.value_at(gamma_m)?;
            let gain_db = if ar == mi_at_gamma_m {
                Some(0.0)
            } else {
                curve.gamma_for(ar).map(|g| to_db(g / gamma_m))
            };
            Ok(GainPoint {
                m,
                gamma_m,
                ar,
                mi_at_gamma_m,
                gain_db,
            })
        })
        .collect()
}

/// Maximal SNR intervals where `κ·γ - I(γ) > tolerance`.
///
/// Sign changes between curve samples are refined by bisection on the
/// interpolant to `1e-9`.
pub fn crossover(line: &RateLine, curve: &MiCurve, tolerance: f64) -> Vec<(f64, f64)> {
    if !tolerance.is_finite() && tolerance > 0.0 {
        return Vec::new();
    }
    let excess = |g: f64| -> f64 {
        match curve.value_at(g) {
            Ok(v) => line.rate_at(g) - v - tolerance,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let refine = |mut below: f64, mut above: f64| -> f64 {
        // `below` has excess <= 0, `above` has excess > 0
        while (above - below).abs() > 1e-9 {
            let mid = 0.5 * (below + above);
            if excess(mid) > 0.0 {
                above = mid;
            } else {
                below = mid;
            }
        }
        above
    };

    let gammas: Vec<f64> = curve.points().iter().map(|p| p.gamma).collect();
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev: Option<(f64, bool)> = None;
    for &g in &gammas {
        let inside = excess(g) > 0.0;
        match (prev, inside) {
            (None, true) => start = Some(g),
            (Some((pg, false)), true) => start = Some(refine(pg, g)),
            (Some((pg, true)), false) => {
                let end = refine(g, pg);
                out.push((start.take().unwrap_or(pg), end));
            }
            _ => {}
        }
        prev = Some((g, inside));
    }
    if let (Some(s), Some((last, true))) = (start, prev) {
        out.push((s, last));
    }
    out
}

/// Information bits per channel use delivered by a level coded at `code_rate`
/// and repeated `m` times.
pub fn info_throughput(code_rate: f64, bits_per_use: f64, m: usize) -> f64 {
    code_rate * bits_per_use / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mi::{BackendKind, CurveLevel, MiPoint};

    fn curve_of(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> MiCurve {
        let pts = (0..=n)
            .map(|i| {
                let g = lo + (hi - lo) * i as f64 / n as f64;
                MiPoint {
                    gamma: g,
                    value: f(g),
                    backend: BackendKind::Quadrature,
                    stderr: 0.0,
                }
            })
            .collect();
        MiCurve::new(CurveLevel::Low, pts).unwrap()
    }

    #[test]
    fn line_definition() {
        let curve = curve_of(|g| g / 4.0, 0.0, 4.0, 40);
        let line = line_from_mi(2.0, &curve).unwrap();
        assert_eq!(line.rate1(), 0.5);
        assert_eq!(line.slope(), 0.25);
        assert_eq!(line.rate_at(2.0), 0.5);
        for m in 1..=64usize {
            let r = line.rate_at(2.0 / m as f64) * m as f64;
            assert!((r - 0.5).abs() <= 4.0 * f64::EPSILON, "M={m}");
        }
        assert!(line_from_mi(5.0, &curve).is_err());
    }

    #[test]
    fn rejects_degenerate_anchor() {
        assert!(RateLine::new(0.0, 0.5).is_err());
        assert!(RateLine::new(1.0, 0.0).is_err());
    }

    #[test]
    fn anchor_point_has_zero_gain() {
        let curve = curve_of(|g| g * g, 0.0, 1.0, 20);
        let line = line_from_mi(0.95, &curve).unwrap();
        let pts = ar_points(&line, &curve, &[1]).unwrap();
        assert_eq!(pts[0].gain_db, Some(0.0));
        assert!(ar_points(&line, &curve, &[0]).is_err());
    }

    #[test]
    fn convex_curve_gains_are_positive() {
        let curve = curve_of(|g| g * g, 0.0, 1.0, 100);
        let line = line_from_mi(1.0, &curve).unwrap();
        let pts = ar_points(&line, &curve, &[2, 4]).unwrap();
        for p in pts {
            assert!(p.ar > p.mi_at_gamma_m);
            // γ* = sqrt(ar) = sqrt(1/M), γ_M = 1/M → gain = 10 log10 √M
            let want = 5.0 * (p.m as f64).log10();
            assert!((p.gain_db.unwrap() - want).abs() < 1e-3, "{p:?}");
        }
    }

    #[test]
    fn crossover_cases() {
        let concave = curve_of(|g| g.sqrt(), 0.0, 1.0, 50);
        let line = line_from_mi(1.0, &concave).unwrap();
        assert!(crossover(&line, &concave, 0.0).is_empty());

        let convex = curve_of(|g| g * g, 0.0, 1.0, 50);
        let line = line_from_mi(1.0, &convex).unwrap();
        let iv = crossover(&line, &convex, 0.0);
        assert_eq!(iv.len(), 1);
        assert!(iv[0].0 < 1e-6 && iv[0].1 > 1.0 - 1e-6, "{iv:?}");
        assert!(crossover(&line, &convex, f64::INFINITY).is_empty());

        // chord - curve peaks at 0.25 for g²; a 0.2 tolerance leaves a band around 0.5
        let iv = crossover(&line, &convex, 0.2);
        assert_eq!(iv.len(), 1);
        let half_width = (0.25f64 - 0.2).sqrt();
        assert!((iv[0].0 - (0.5 - half_width)).abs() < 1e-3);
        assert!((iv[0].1 - (0.5 + half_width)).abs() < 1e-3);
    }

    #[test]
    fn throughput_bookkeeping() {
        assert_eq!(info_throughput(0.5, 1.0, 1), 0.5);
        assert_eq!(info_throughput(0.5, 1.0, 4), 0.125);
        assert_eq!(info_throughput(0.5, 1.0, 4), info_throughput(0.125, 1.0, 1));
    }
}
