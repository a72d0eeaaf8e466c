//! Gauss-Hermite rules and expectations over a unit complex Gaussian.

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Largest rule whose recurrence stays inside f64 range at the outer nodes.
pub const MAX_NODES: usize = 512;

/// Nodes and weights for `∫ e^{-x²} g(x) dx ≈ Σ w_i g(x_i)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return domain(format!("Gauss-Hermite order must be in 1..={MAX_NODES}, got {n}"));
        }
        // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix,
        // then polished by Newton on the orthonormal recurrence.
        let mut x: Vec<f64> = vec![0.0; n];
        let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        tridiagonal_eigenvalues(&mut x, &off)?;
        x.sort_by(|a, b| b.total_cmp(a));
        let mut w = vec![0.0; n];
        for (z, wz) in x.iter_mut().zip(w.iter_mut()) {
            let mut pp = hermite_derivative(*z, n).1;
            for _ in 0..3 {
                let (p, d) = hermite_derivative(*z, n);
                pp = d;
                if d == 0.0 || !d.is_finite() {
                    break;
                }
                *z -= p / d;
                pp = hermite_derivative(*z, n).1;
            }
            *wz = 2.0 / (pp * pp);
        }
        for i in 0..n / 2 {
            let z = 0.5 * (x[i] - x[n - 1 - i]);
            x[i] = z;
            x[n - 1 - i] = -z;
            let wm = 0.5 * (w[i] + w[n - 1 - i]);
            w[i] = wm;
            w[n - 1 - i] = wm;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
        Ok(Self {
            nodes: x,
            weights: w,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[g(W)]` for `W ~ CN(0,1)` by the tensor-product rule.
    pub fn expect_complex<F>(&self, mut g: F) -> f64
    where
        F: FnMut(Complex64) -> f64,
    {
        let mut acc = 0.0;
        for (xr, wr) in self.nodes.iter().zip(&self.weights) {
            let mut row = 0.0;
            for (xi, wi) in self.nodes.iter().zip(&self.weights) {
                row += wi * g(Complex64::new(*xr, *xi));
            }
            acc += wr * row;
        }
        acc / std::f64::consts::PI
    }
}

/// Orthonormal Hermite value `p_n(z)` and the quantity `√(2n)·p_{n-1}(z)`,
/// which equals `p_n'(z)` at a root.
fn hermite_derivative(z: f64, n: usize) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Eigenvalues of the symmetric tridiagonal matrix with zero-based diagonal
/// `d` (overwritten) and off-diagonal `off`, by implicit QL.
fn tridiagonal_eigenvalues(d: &mut [f64], off: &[f64]) -> Result<()> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(crate::Error::Numerical(
                    "tridiagonal QL did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
