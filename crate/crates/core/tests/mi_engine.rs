use std::f64::consts::{FRAC_PI_2, PI};

use mlc_core::constellation::LabeledConstellation;
use mlc_core::mi::{
    conditional_density, is_convex_on, level_mi_with_rule, linear_grid, mi_high, mi_low,
    mi_low_expectation, mi_low_quadrature, mi_total_qpsk, Backend, BackendKind, CurveLevel,
    MiCurve, MiPoint, QuadratureSpec,
};
use mlc_core::quadrature::GaussHermite;
use num_complex::Complex64;
use proptest::prelude::*;

const QUAD: Backend = Backend::Quadrature(QuadratureSpec {
    nodes: 64,
    tolerance: 1e-5,
    max_nodes: 512,
});

/// Midpoint rule on `[-half, half]²` with step `h`.
fn plane_integral(half: f64, h: f64, mut f: impl FnMut(Complex64) -> f64) -> f64 {
    let n = (2.0 * half / h).round() as usize;
    let mut acc = 0.0;
    for i in 0..n {
        let re = -half + (i as f64 + 0.5) * h;
        for j in 0..n {
            let im = -half + (j as f64 + 0.5) * h;
            acc += f(Complex64::new(re, im));
        }
    }
    acc * h * h
}

/// Refines the midpoint grid until two successive estimates agree.
fn adaptive_plane_integral(half: f64, f: impl Fn(Complex64) -> f64) -> f64 {
    let mut h = 0.2;
    let mut prev = plane_integral(half, h, &f);
    loop {
        h /= 2.0;
        let next = plane_integral(half, h, &f);
        if (next - prev).abs() < 1e-10 || h < 0.01 {
            return next;
        }
        prev = next;
    }
}

#[test]
fn density_at_own_point_beats_other_subset() {
    let c = LabeledConstellation::qpsk(1.0).unwrap();
    let y = c.points()[0];
    let own = conditional_density(y, &c.low_subset(0), &c, 1.0).unwrap();
    let other = conditional_density(y, &c.low_subset(1), &c, 1.0).unwrap();
    // mean of e^0 and e^-4 over π
    let want = (1.0 + (-4.0f64).exp()) / (2.0 * PI);
    assert!((own - want).abs() < 1e-15);
    assert!(own > other);
    assert!((other - (-2.0f64).exp() / PI).abs() < 1e-15);
}

#[test]
fn density_rotation_symmetry() {
    let c = LabeledConstellation::qpsk(1.3).unwrap();
    let j = Complex64::new(0.0, 1.0);
    for &(re, im) in &[(0.3, -0.7), (1.3, 0.0), (-2.0, 0.5), (0.0, 0.0)] {
        let y = Complex64::new(re, im);
        let a = conditional_density(y, &c.low_subset(0), &c, 0.8).unwrap();
        let b = conditional_density(j * y, &c.low_subset(1), &c, 0.8).unwrap();
        assert!((a - b).abs() < 1e-15 * a.max(1.0));
    }
}

#[test]
fn density_integrates_to_one() {
    let c = LabeledConstellation::qpsk(1.0).unwrap();
    for sigma2 in [0.5f64, 1.0] {
        for subset in [c.low_subset(0), c.low_subset(1), c.high_subset(0, 1)] {
            let half = 1.0 + 8.0 * sigma2.sqrt();
            let total = adaptive_plane_integral(half, |y| {
                conditional_density(y, &subset, &c, sigma2).unwrap()
            });
            assert!((total - 1.0).abs() < 1e-6, "σ²={sigma2}: {total}");
        }
    }
}

#[test]
fn density_rejects_bad_inputs() {
    let c = LabeledConstellation::qpsk(1.0).unwrap();
    let y = Complex64::new(0.1, 0.2);
    assert!(conditional_density(y, &c.low_subset(0), &c, 0.0).is_err());
    let mut empty = c.low_subset(0);
    empty.members.clear();
    assert!(conditional_density(y, &empty, &c, 1.0).is_err());
}

/// Brute-force midpoint integral of the defining expression for the low level.
fn mi_low_by_grid(gamma: f64) -> f64 {
    let c = LabeledConstellation::qpsk(gamma.sqrt()).unwrap();
    let (s0, s1) = (c.low_subset(0), c.low_subset(1));
    let half = gamma.sqrt() + 9.0;
    let integrand = |y: Complex64| {
        let p0 = conditional_density(y, &s0, &c, 1.0).unwrap();
        let p1 = conditional_density(y, &s1, &c, 1.0).unwrap();
        let mut h = 0.0;
        for p in [p0, p1] {
            if p > 0.0 {
                h += 0.5 * p * ((p0 + p1) / p).log2();
            }
        }
        h
    };
    1.0 - plane_integral(half, 0.02, integrand)
}

#[test]
fn quadrature_matches_brute_force_grid() {
    for gamma in [0.5f64, 2.1] {
        let quad = mi_low_quadrature(gamma, &QuadratureSpec::default()).unwrap();
        let grid = mi_low_by_grid(gamma);
        assert!((quad.value - grid).abs() < 1e-6, "γ={gamma}: {} vs {grid}", quad.value);
        assert_eq!(quad.backend, BackendKind::Quadrature);
        assert_eq!(quad.stderr, 0.0);
    }
}

#[test]
fn golden_value_at_anchor() {
    let v = mi_low_quadrature(2.1, &QuadratureSpec::default()).unwrap().value;
    assert!((v - 0.553032170).abs() < 1e-8, "{v}");
}

#[test]
fn quadrature_converged_under_refinement() {
    for gamma in [0.1, 1.0, 4.0, 10.0] {
        let base = mi_low_quadrature(gamma, &QuadratureSpec::default()).unwrap().value;
        let fine = mi_low_quadrature(
            gamma,
            &QuadratureSpec {
                nodes: 256,
                ..QuadratureSpec::default()
            },
        )
        .unwrap()
        .value;
        assert!((base - fine).abs() < 1e-5, "γ={gamma}");
    }
}

#[test]
fn quadrature_reports_non_convergence() {
    let spec = QuadratureSpec {
        nodes: 2,
        tolerance: 1e-15,
        max_nodes: 4,
    };
    assert!(mi_low_quadrature(1.0, &spec).is_err());
}

#[test]
fn endpoints() {
    let lo = mi_low_quadrature(0.0, &QuadratureSpec::default()).unwrap();
    assert!(lo.value.abs() < 1e-3);
    let hi = mi_low_quadrature(100.0, &QuadratureSpec::default()).unwrap();
    assert!((hi.value - 1.0).abs() < 1e-3);
    let mc0 = mi_low_expectation(0.0, 10_000, 3).unwrap();
    assert_eq!(mc0.value, 0.0);
    assert!(mi_high(0.0, &QUAD).unwrap().value.abs() < 1e-3);
    assert!((mi_high(100.0, &QUAD).unwrap().value - 1.0).abs() < 1e-3);
    assert!(mi_total_qpsk(0.0, &QUAD).unwrap().value.abs() < 1e-3);
    assert!((mi_total_qpsk(100.0, &QUAD).unwrap().value - 2.0).abs() < 1e-3);
}

#[test]
fn rejects_bad_arguments() {
    assert!(mi_low_quadrature(-0.1, &QuadratureSpec::default()).is_err());
    assert!(mi_low_quadrature(f64::NAN, &QuadratureSpec::default()).is_err());
    assert!(mi_low_expectation(1.0, 10, 1).is_err());
    assert!(mi_low_expectation(f64::INFINITY, 10_000, 1).is_err());
}

#[test]
fn monte_carlo_seeds_agree() {
    let a = mi_low_expectation(1.5, 200_000, 11).unwrap();
    let b = mi_low_expectation(1.5, 200_000, 12).unwrap();
    assert_ne!(a.value, b.value);
    let combined = a.stderr.hypot(b.stderr);
    assert!(a.stderr > 0.0);
    assert!((a.value - b.value).abs() <= 3.0 * combined);
    let again = mi_low_expectation(1.5, 200_000, 11).unwrap();
    assert_eq!(a, again);
}

#[test]
fn monte_carlo_matches_quadrature_at_golden_point() {
    let q = mi_low_quadrature(2.1, &QuadratureSpec::default()).unwrap();
    let m = mi_low(
        2.1,
        &Backend::MonteCarlo {
            samples: 400_000,
            seed: 5,
        },
    )
    .unwrap();
    assert!((q.value - m.value).abs() <= (3.0 * m.stderr).max(1e-3));
}

#[test]
fn chain_rule_at_unit_snr() {
    let low = mi_low(1.0, &QUAD).unwrap().value;
    let high = mi_high(1.0, &QUAD).unwrap().value;
    let total = mi_total_qpsk(1.0, &QUAD).unwrap().value;
    assert!((low + high - total).abs() < 1e-3);
}

#[test]
fn curves_are_monotone_and_ordered() {
    let grid = linear_grid(0.0, 6.0, 0.25).unwrap();
    let mut prev: Option<(f64, f64, f64)> = None;
    for &g in &grid {
        let low = mi_low(g, &QUAD).unwrap().value;
        let high = mi_high(g, &QUAD).unwrap().value;
        let total = mi_total_qpsk(g, &QUAD).unwrap().value;
        assert!((0.0..=1.0).contains(&low) && (0.0..=1.0).contains(&high));
        assert!((0.0..=2.0).contains(&total));
        assert!(low <= high + 1e-3, "γ={g}: {low} > {high}");
        if let Some((pl, ph, pt)) = prev {
            assert!(low >= pl - 1e-4 && high >= ph - 1e-4 && total >= pt - 1e-4);
        }
        prev = Some((low, high, total));
    }
}

#[test]
fn rotation_leaves_level_mi_unchanged() {
    let rule = GaussHermite::new(128).unwrap();
    for gamma in [0.25f64, 1.0, 3.0] {
        let c = LabeledConstellation::qpsk(gamma.sqrt()).unwrap();
        let base = level_mi_with_rule(&c, 1.0, CurveLevel::Low, &rule).unwrap();
        let rot = level_mi_with_rule(&c.rotated(FRAC_PI_2), 1.0, CurveLevel::Low, &rule).unwrap();
        assert!((base - rot).abs() < 1e-3);
        let odd = level_mi_with_rule(&c.rotated(0.3), 1.0, CurveLevel::Low, &rule).unwrap();
        assert!((base - odd).abs() < 1e-3);
    }
}

fn sampled(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> MiCurve {
    let points = (0..=n)
        .map(|i| {
            let gamma = lo + (hi - lo) * i as f64 / n as f64;
            MiPoint {
                gamma,
                value: f(gamma),
                backend: BackendKind::Quadrature,
                stderr: 0.0,
            }
        })
        .collect();
    MiCurve::new(CurveLevel::Low, points).unwrap()
}

#[test]
fn convexity_reference_shapes() {
    let line = is_convex_on(&sampled(|g| 0.3 * g, 0.0, 1.0, 20), 0.0, 1.0).unwrap();
    assert!(!line.is_convex);
    assert!(line.max_chord_violation.abs() < 1e-12);

    let square = is_convex_on(&sampled(|g| g * g, 0.0, 1.0, 20), 0.0, 1.0).unwrap();
    assert!(square.is_convex);
    assert!(square.max_chord_violation < 0.0);
    assert_eq!(square.interior_samples, 19);

    let root = is_convex_on(&sampled(f64::sqrt, 0.0, 1.0, 20), 0.0, 1.0).unwrap();
    assert!(!root.is_convex);
    assert!(root.max_chord_violation > 0.0);

    assert!(is_convex_on(&sampled(|g| g * g, 0.0, 1.0, 3), 0.0, 1.0).is_err());
    assert!(is_convex_on(&sampled(|g| g * g, 0.0, 1.0, 20), 1.0, 0.5).is_err());
}

#[test]
fn low_level_curve_convex_region() {
    let grid = linear_grid(0.0, 2.5, 0.05).unwrap();
    let curve = MiCurve::compute(CurveLevel::Low, &grid, &QUAD).unwrap();
    assert!(is_convex_on(&curve, 0.0, 1.5).unwrap().is_convex);
    assert!(!is_convex_on(&curve, 0.0, 2.5).unwrap().is_convex);
    let total = MiCurve::compute(CurveLevel::Total, &grid, &QUAD).unwrap();
    assert!(!is_convex_on(&total, 0.0, 1.5).unwrap().is_convex);
}

#[test]
fn curve_requires_increasing_snr() {
    let p = |g: f64| MiPoint {
        gamma: g,
        value: 0.1,
        backend: BackendKind::Quadrature,
        stderr: 0.0,
    };
    assert!(MiCurve::new(CurveLevel::Low, vec![p(0.0), p(0.0)]).is_err());
    assert!(MiCurve::new(CurveLevel::Low, vec![p(1.0), p(0.5)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_rule_holds(gamma in 0.0f64..8.0) {
        let low = mi_low(gamma, &QUAD).unwrap().value;
        let high = mi_high(gamma, &QUAD).unwrap().value;
        let total = mi_total_qpsk(gamma, &QUAD).unwrap().value;
        prop_assert!((low + high - total).abs() <= 2e-3);
    }

    #[test]
    fn values_are_bits(gamma in 0.0f64..30.0, seed in 0u64..1000) {
        let q = mi_low(gamma, &QUAD).unwrap();
        prop_assert!((0.0..=1.0).contains(&q.value));
        let m = mi_low_expectation(gamma, 10_000, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.value));
        prop_assert!(m.stderr >= 0.0);
    }
}
