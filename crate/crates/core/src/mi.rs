//! Per-level mutual information of the partitioned QPSK channel.
//!
//! Two independent routes are provided for the low level:
//!
//! * [`mi_low_quadrature`] integrates the definition
//!   `I = 1 - ½ Σ_d ∫ P(y|d) log2(Σ_k P(y|k) / P(y|d)) dy` over the complex
//!   plane with a tensor-product Gauss-Hermite rule, using the conditional
//!   densities of each subset.
//! * [`mi_low_expectation`] estimates the closed four-term expectation in the
//!   normalized noise `W ~ CN(0,1)` with `f(W, a) = exp(-|W - a|²)`, by
//!   Monte-Carlo draws of `W`.
//!
//! Both use `γ = A²/σ²` with `σ²` the total complex noise variance, and report
//! bits.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::stream_rng;
use crate::constellation::{LabeledConstellation, LevelSubset};
use crate::error::{domain, Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{GaussHermite, MAX_NODES};

/// Chord violations must be below `-CONVEX_MARGIN` for a strict convexity verdict.
pub const CONVEX_MARGIN: f64 = 1e-6;

/// Minimum Monte-Carlo sample count accepted by [`mi_low_expectation`].
pub const MIN_MC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Starting order per axis.
    pub nodes: usize,
    /// Doubling stops once successive values differ by less than this.
    pub tolerance: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 64,
            tolerance: 1e-5,
            max_nodes: MAX_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Quadrature(QuadratureSpec),
    MonteCarlo { samples: usize, seed: u64 },
}

impl Backend {
    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Quadrature(_) => BackendKind::Quadrature,
            Backend::MonteCarlo { .. } => BackendKind::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Quadrature,
    MonteCarlo,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Quadrature => "quad",
            BackendKind::MonteCarlo => "mc",
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(BackendKind::Quadrature),
            "mc" => Ok(BackendKind::MonteCarlo),
            _ => domain(format!("unknown backend {s:?} (expected quad or mc)")),
        }
    }
}

/// One sampled MI value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiPoint {
    pub gamma: f64,
    /// Bits per channel use.
    pub value: f64,
    pub backend: BackendKind,
    /// Standard error; zero for quadrature.
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveLevel {
    Low,
    High,
    Total,
}

/// A set of sibling subsets: the bit being measured picks one of them, given
/// that the true point lies in their union.
type Split = Vec<LevelSubset>;

fn splits_for(c: &LabeledConstellation, level: CurveLevel) -> Vec<Split> {
    match level {
        CurveLevel::Low => vec![vec![c.low_subset(0), c.low_subset(1)]],
        CurveLevel::High => (0..2)
            .map(|vl| vec![c.high_subset(vl, 0), c.high_subset(vl, 1)])
            .collect(),
        CurveLevel::Total => vec![vec![
            c.high_subset(0, 0),
            c.high_subset(1, 0),
            c.high_subset(0, 1),
            c.high_subset(1, 1),
        ]],
    }
}

/// `ln Σ exp(v)` without overflow.
pub(crate) fn log_sum_exp(vals: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = vals.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + vals.into_iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln P(y | subset)` for the uniform mixture of complex Gaussians
/// `(1/(πσ²)) exp(-|y - q|²/σ²)` over the subset members.
pub fn log_conditional_density(
    y: Complex64,
    subset: &LevelSubset,
    c: &LabeledConstellation,
    sigma2: f64,
) -> f64 {
    let pts = c.points();
    let lse = log_sum_exp(subset.members.iter().map(|&i| -(y - pts[i]).norm_sqr() / sigma2));
    lse - (subset.members.len() as f64).ln() - (PI * sigma2).ln()
}

/// `P(y | subset)`.
pub fn conditional_density(
    y: Complex64,
    subset: &LevelSubset,
    c: &LabeledConstellation,
    sigma2: f64,
) -> Result<f64> {
    if subset.members.is_empty() {
        return domain("conditional density of an empty subset");
    }
    if !(sigma2 > 0.0) {
        return domain(format!("noise variance must be positive, got {sigma2}"));
    }
    Ok(log_conditional_density(y, subset, c, sigma2).exp())
}

/// `log2(Σ_k P(y|k) / P(y|d))` averaged over every (split, d, q ∈ d) with
/// `y = q + σW`; equal weights since labels are uniform.
fn mean_log_ratio(c: &LabeledConstellation, sigma2: f64, splits: &[Split], w: Complex64) -> f64 {
    let sigma = sigma2.sqrt();
    let pts = c.points();
    let mut acc = 0.0;
    let mut count = 0usize;
    for split in splits {
        for own in split {
            for &qi in &own.members {
                let y = pts[qi] + w * sigma;
                let own_ln = log_conditional_density(y, own, c, sigma2);
                let all_ln = log_sum_exp(
                    split
                        .iter()
                        .map(|s| log_conditional_density(y, s, c, sigma2)),
                );
                acc += (all_ln - own_ln) / LN_2;
                count += 1;
            }
        }
    }
    acc / count as f64
}

fn split_bits(splits: &[Split]) -> f64 {
    (splits[0].len() as f64).log2()
}

/// Level MI of `c` at noise variance `sigma2`, by a fixed Gauss-Hermite rule.
pub fn level_mi_with_rule(
    c: &LabeledConstellation,
    sigma2: f64,
    level: CurveLevel,
    rule: &GaussHermite,
) -> Result<f64> {
    let splits = splits_for(c, level);
    let e = rule.expect_complex(|w| mean_log_ratio(c, sigma2, &splits, w));
    if !e.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite quadrature sum for {level:?} at σ²={sigma2} with {} nodes",
            rule.len()
        )));
    }
    Ok(split_bits(&splits) - e)
}

/// Doubles the rule until successive values change by less than the tolerance.
fn converged_quadrature(
    c: &LabeledConstellation,
    sigma2: f64,
    level: CurveLevel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut n = spec.nodes;
    let mut prev = level_mi_with_rule(c, sigma2, level, &GaussHermite::new(n)?)?;
    loop {
        let next = 2 * n;
        if next > spec.max_nodes {
            return Err(Error::Numerical(format!(
                "{level:?} quadrature not converged at {n} nodes (σ²={sigma2})"
            )));
        }
        let v = level_mi_with_rule(c, sigma2, level, &GaussHermite::new(next)?)?;
        if (v - prev).abs() < spec.tolerance {
            return Ok(v);
        }
        prev = v;
        n = next;
    }
}

fn montecarlo_level(
    c: &LabeledConstellation,
    sigma2: f64,
    level: CurveLevel,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let splits = splits_for(c, level);
    let mut rng = stream_rng(seed, 0);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let w = unit_complex_gaussian(&mut rng);
        let h = mean_log_ratio(c, sigma2, &splits, w);
        s1 += h;
        s2 += h * h;
    }
    finish_mc(split_bits(&splits), s1, s2, samples)
}

fn unit_complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn finish_mc(bits: f64, s1: f64, s2: f64, n: usize) -> Result<(f64, f64)> {
    let nf = n as f64;
    let mean = s1 / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    let value = bits - mean;
    if !value.is_finite() {
        return Err(Error::Numerical("non-finite Monte-Carlo estimate".into()));
    }
    Ok((value, (var / nf).sqrt()))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return domain(format!("SNR must be finite and non-negative, got {gamma}"));
    }
    Ok(())
}

/// Unit-noise QPSK at linear SNR `gamma`, or `None` at `gamma = 0` where every
/// hypothesis has the same density and each level carries exactly nothing.
fn unit_noise_qpsk(gamma: f64) -> Result<Option<LabeledConstellation>> {
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(None);
    }
    LabeledConstellation::qpsk(gamma.sqrt()).map(Some)
}

fn clamp_bits(v: f64, level: CurveLevel) -> f64 {
    let max = if level == CurveLevel::Total { 2.0 } else { 1.0 };
    v.clamp(0.0, max)
}

fn level_point(gamma: f64, level: CurveLevel, backend: &Backend) -> Result<MiPoint> {
    let Some(c) = unit_noise_qpsk(gamma)? else {
        return Ok(MiPoint {
            gamma,
            value: 0.0,
            backend: backend.kind(),
            stderr: 0.0,
        });
    };
    let (value, stderr) = match backend {
        Backend::Quadrature(spec) => (converged_quadrature(&c, 1.0, level, spec)?, 0.0),
        Backend::MonteCarlo { samples, seed } => {
            if *samples < 2 {
                return domain("Monte-Carlo backend needs at least two samples");
            }
            montecarlo_level(&c, 1.0, level, *samples, *seed)?
        }
    };
    Ok(MiPoint {
        gamma,
        value: clamp_bits(value, level),
        backend: backend.kind(),
        stderr,
    })
}

/// Low-level MI by deterministic 2-D quadrature of the defining integral.
pub fn mi_low_quadrature(gamma: f64, spec: &QuadratureSpec) -> Result<MiPoint> {
    level_point(gamma, CurveLevel::Low, &Backend::Quadrature(*spec))
}

/// Low-level MI from the four-term expectation in `W ~ CN(0,1)`.
pub fn mi_low_expectation(gamma: f64, samples: usize, seed: u64) -> Result<MiPoint> {
    check_gamma(gamma)?;
    if samples < MIN_MC_SAMPLES {
        return domain(format!(
            "need at least {MIN_MC_SAMPLES} samples, got {samples}"
        ));
    }
    let s = gamma.sqrt();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    // (numerator arguments, denominator arguments) of each log(1 + ·) term
    let terms: [([Complex64; 2], [Complex64; 2]); 4] = [
        ([c(-s, s), c(-s, -s)], [c(0.0, 0.0), c(-2.0 * s, 0.0)]),
        ([c(s, s), c(s, -s)], [c(2.0 * s, 0.0), c(0.0, 0.0)]),
        ([c(s, -s), c(-s, -s)], [c(0.0, 0.0), c(0.0, -2.0 * s)]),
        ([c(s, s), c(-s, s)], [c(0.0, 2.0 * s), c(0.0, 0.0)]),
    ];
    // ln f(W, a) = -|W - a|²
    let ln_f = |w: Complex64, a: Complex64| -(w - a).norm_sqr();
    let mut rng = stream_rng(seed, 0);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let w = unit_complex_gaussian(&mut rng);
        let mut h = 0.0;
        for (num, den) in &terms {
            let (n0, n1) = (ln_f(w, num[0]), ln_f(w, num[1]));
            let (d0, d1) = (ln_f(w, den[0]), ln_f(w, den[1]));
            // log(1 + (f_n0 + f_n1)/(f_d0 + f_d1))
            h += log_sum_exp([n0, n1, d0, d1]) - log_sum_exp([d0, d1]);
        }
        let h = h / (4.0 * LN_2);
        s1 += h;
        s2 += h * h;
    }
    let (value, stderr) = finish_mc(1.0, s1, s2, samples)?;
    Ok(MiPoint {
        gamma,
        value: clamp_bits(value, CurveLevel::Low),
        backend: BackendKind::MonteCarlo,
        stderr,
    })
}

/// `I(V^L; Y)`. The Monte-Carlo backend uses the four-term expectation.
pub fn mi_low(gamma: f64, backend: &Backend) -> Result<MiPoint> {
    match backend {
        Backend::Quadrature(spec) => mi_low_quadrature(gamma, spec),
        Backend::MonteCarlo { samples, seed } => mi_low_expectation(gamma, *samples, *seed),
    }
}

/// `I(V^H; Y | V^L)`: the binary MI inside each antipodal pair, averaged over `v^L`.
pub fn mi_high(gamma: f64, backend: &Backend) -> Result<MiPoint> {
    level_point(gamma, CurveLevel::High, backend)
}

/// Symmetric-input 4-ary MI of QPSK, in `[0, 2]`.
pub fn mi_total_qpsk(gamma: f64, backend: &Backend) -> Result<MiPoint> {
    level_point(gamma, CurveLevel::Total, backend)
}

pub fn mi_level(gamma: f64, level: CurveLevel, backend: &Backend) -> Result<MiPoint> {
    match level {
        CurveLevel::Low => mi_low(gamma, backend),
        CurveLevel::High => mi_high(gamma, backend),
        CurveLevel::Total => mi_total_qpsk(gamma, backend),
    }
}

/// Sampled MI of one level with a monotone interpolant over the samples.
#[derive(Debug, Clone)]
pub struct MiCurve {
    level: CurveLevel,
    points: Vec<MiPoint>,
    interp: MonotoneCubic,
}

impl MiCurve {
    pub fn new(level: CurveLevel, points: Vec<MiPoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].gamma > w[0].gamma)) {
            return domain("curve SNRs must be strictly increasing");
        }
        let interp = MonotoneCubic::new(
            points.iter().map(|p| p.gamma).collect(),
            points.iter().map(|p| p.value).collect(),
        )?;
        Ok(Self {
            level,
            points,
            interp,
        })
    }

    /// Evaluates `level` at every SNR of `gammas`, in parallel.
    pub fn compute(level: CurveLevel, gammas: &[f64], backend: &Backend) -> Result<Self> {
        let points = gammas
            .par_iter()
            .map(|&g| mi_level(g, level, backend))
            .collect::<Result<Vec<_>>>()?;
        Self::new(level, points)
    }

    pub fn level(&self) -> CurveLevel {
        self.level
    }

    pub fn points(&self) -> &[MiPoint] {
        &self.points
    }

    pub fn gamma_range(&self) -> (f64, f64) {
        self.interp.x_range()
    }

    /// Interpolated MI at `gamma`.
    pub fn value_at(&self, gamma: f64) -> Result<f64> {
        self.interp.eval(gamma)
    }

    /// Smallest SNR at which the curve reaches `rate`.
    pub fn gamma_for(&self, rate: f64) -> Option<f64> {
        self.interp.invert(rate)
    }
}

/// Outcome of the chord test on `[gamma_a, gamma_b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub is_convex: bool,
    /// Largest `f(γ) - chord(γ)` over interior samples; positive means the
    /// curve rises above the chord somewhere.
    pub max_chord_violation: f64,
    pub interior_samples: usize,
}

/// Checks `f(γ) < chord(γ)` at every sample strictly inside `(gamma_a, gamma_b)`,
/// where the chord joins the curve at both ends.
pub fn is_convex_on(curve: &MiCurve, gamma_a: f64, gamma_b: f64) -> Result<ConvexityReport> {
    if !(gamma_a < gamma_b) {
        return domain(format!("need gamma_a < gamma_b, got [{gamma_a}, {gamma_b}]"));
    }
    let ya = curve.value_at(gamma_a)?;
    let yb = curve.value_at(gamma_b)?;
    let slope = (yb - ya) / (gamma_b - gamma_a);
    let interior: Vec<&MiPoint> = curve
        .points()
        .iter()
        .filter(|p| p.gamma > gamma_a && p.gamma < gamma_b)
        .collect();
    if interior.len() < 3 {
        return domain(format!(
            "need at least 3 samples inside ({gamma_a}, {gamma_b}), found {}",
            interior.len()
        ));
    }
    let max_chord_violation = interior
        .iter()
        .map(|p| p.value - (ya + slope * (p.gamma - gamma_a)))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ConvexityReport {
        gamma_a,
        gamma_b,
        is_convex: max_chord_violation < -CONVEX_MARGIN,
        max_chord_violation,
        interior_samples: interior.len(),
    })
}

/// One row of the per-level MI table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiRow {
    pub gamma: f64,
    pub low: MiPoint,
    pub high: MiPoint,
    pub total: MiPoint,
}

/// Low, high and total MI on a grid.
pub fn mi_table(gammas: &[f64], backend: &Backend) -> Result<Vec<MiRow>> {
    gammas
        .par_iter()
        .map(|&gamma| {
            Ok(MiRow {
                gamma,
                low: mi_low(gamma, backend)?,
                high: mi_high(gamma, backend)?,
                total: mi_total_qpsk(gamma, backend)?,
            })
        })
        .collect()
}

/// `start, start+step, ...` up to `stop` inclusive, allowing for rounding in `step`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return domain(format!("bad grid {start}:{step}:{stop}"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return domain("grid too large");
    }
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}
