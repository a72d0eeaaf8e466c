//! Labeled signal constellations and their set partition into levels.
//!
//! QPSK is split in two steps: the low-level bit `v^L` picks one of two
//! antipodal pairs, then the high-level bit `v^H` picks a point inside the pair.
//!
//! ```text
//!            q2 = jA   [vH=0, vL=1]
//!
//! q3 = -A                          q1 = A
//! [vH=1, vL=0]                     [vH=0, vL=0]
//!
//!            q4 = -jA  [vH=1, vL=1]
//! ```

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Partition level. The low level is split first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Low,
    High,
}

/// Bit label of a point, in the order `[v^H, v^L]`.
pub type Label = [u8; 2];

/// A subset of the alphabet selected by a partition path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSubset {
    pub level: Level,
    /// `[v^L]` for a low-level subset, `[v^L, v^H]` for a high-level one.
    pub conditioning: Vec<u8>,
    /// Indices into [`LabeledConstellation::points`].
    pub members: Vec<usize>,
}

/// Complex signal points with per-point labels.
///
/// Only the QPSK construction exists, but nothing in the type pins the size.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledConstellation {
    points: Vec<Complex64>,
    labels: Vec<Label>,
    amplitude: f64,
}

impl LabeledConstellation {
    /// QPSK with `q1 = A`, `q2 = jA`, `q3 = -A`, `q4 = -jA`.
    pub fn qpsk(amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return domain(format!("amplitude must be positive and finite, got {amplitude}"));
        }
        let a = amplitude;
        Ok(Self {
            points: vec![
                Complex64::new(a, 0.0),
                Complex64::new(0.0, a),
                Complex64::new(-a, 0.0),
                Complex64::new(0.0, -a),
            ],
            labels: vec![[0, 0], [0, 1], [1, 0], [1, 1]],
            amplitude: a,
        })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The point labelled `[v^H, v^L]`.
    pub fn map_bits(&self, label: Label) -> Complex64 {
        let idx = self
            .labels
            .iter()
            .position(|l| *l == label)
            .expect("every label in {0,1}^2 is present");
        self.points[idx]
    }

    /// Same labels, every point multiplied by `e^{j·phase}`.
    pub fn rotated(&self, phase: f64) -> Self {
        let r = Complex64::from_polar(1.0, phase);
        Self {
            points: self.points.iter().map(|p| p * r).collect(),
            labels: self.labels.clone(),
            amplitude: self.amplitude,
        }
    }

    /// `Q(v^L)`.
    pub fn low_subset(&self, v_low: u8) -> LevelSubset {
        let members = (0..self.len())
            .filter(|&i| self.labels[i][1] == v_low)
            .collect();
        LevelSubset {
            level: Level::Low,
            conditioning: vec![v_low],
            members,
        }
    }

    /// `Q(v^L, v^H)`.
    pub fn high_subset(&self, v_low: u8, v_high: u8) -> LevelSubset {
        let members = (0..self.len())
            .filter(|&i| self.labels[i] == [v_high, v_low])
            .collect();
        LevelSubset {
            level: Level::High,
            conditioning: vec![v_low, v_high],
            members,
        }
    }

    /// Members of a subset as complex amplitudes.
    pub fn subset_points(&self, subset: &LevelSubset) -> Vec<Complex64> {
        subset.members.iter().map(|&i| self.points[i]).collect()
    }

    /// Average symbol energy under uniform labels.
    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}
