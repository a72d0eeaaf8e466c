//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).

use crate::error::{domain, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return domain("abscissae and ordinates differ in length");
        }
        if xs.len() < 2 {
            return domain("need at least two samples to interpolate");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("abscissae must be strictly increasing");
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return domain("samples must be finite");
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = end_slope(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        slopes[n - 1] = end_slope(
            h[n - 2],
            n.checked_sub(3).map(|i| h[i]),
            delta[n - 2],
            n.checked_sub(3).map(|i| delta[i]),
        );
        for i in 1..n - 1 {
            let (d0, d1) = (delta[i - 1], delta[i]);
            if d0 * d1 <= 0.0 {
                slopes[i] = 0.0;
            } else {
                // weighted harmonic mean keeps each cubic piece monotone
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.x_range();
        x >= lo && x <= hi
    }

    /// Value at `x`, which must lie inside the sampled range.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            let (lo, hi) = self.x_range();
            return domain(format!("{x} outside interpolation range [{lo}, {hi}]"));
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return Ok(self.ys[i]),
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.ys[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.slopes[i + 1])
    }

    /// Smallest `x` with `eval(x) >= y`, to `1e-9` in `x`, assuming the data are
    /// non-decreasing. `None` when `y` lies outside the sampled value range.
    pub fn invert(&self, y: f64) -> Option<f64> {
        let (mut lo, mut hi) = self.x_range();
        let first = self.ys[0];
        let last = self.ys[self.ys.len() - 1];
        if !(y >= first && y <= last) {
            return None;
        }
        if y == first {
            return Some(lo);
        }
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid).ok()? < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }
}

/// Three-point end slope, clipped so the end piece stays monotone.
fn end_slope(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
    let (Some(h1), Some(d1)) = (h1, d1) else {
        return d0;
    };
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}
