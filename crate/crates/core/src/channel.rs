//! Complex AWGN channel, repetition transmitter and sum combiner.
//!
//! SNR convention: `γ = A² / σ²`, where `σ²` is the total variance of the
//! circularly-symmetric complex noise (`σ²/2` per real dimension).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constellation::LabeledConstellation;
use crate::error::{domain, Result};

/// Noise level and seed for one channel instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    noise_variance: f64,
    seed: u64,
}

impl ChannelParams {
    pub fn new(noise_variance: f64, seed: u64) -> Result<Self> {
        if !(noise_variance > 0.0) || !noise_variance.is_finite() {
            return domain(format!(
                "noise variance must be positive and finite, got {noise_variance}"
            ));
        }
        Ok(Self {
            noise_variance,
            seed,
        })
    }

    /// Noise variance that puts `c` at linear SNR `gamma`.
    pub fn for_snr(c: &LabeledConstellation, gamma: f64, seed: u64) -> Result<Self> {
        if !(gamma > 0.0) {
            return domain(format!("SNR must be positive, got {gamma}"));
        }
        Self::new(c.amplitude() * c.amplitude() / gamma, seed)
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Generator for stream `stream` of `seed`.
///
/// ChaCha is counter based: distinct stream ids give non-overlapping
/// keystreams for the same key, so workers never share draws.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Repetition factor `M` with per-slot amplitude scale `1/√M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionScheme {
    m: usize,
    scale: f64,
}

impl RepetitionScheme {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return domain("repetition factor must be at least 1");
        }
        Ok(Self {
            m,
            scale: 1.0 / (m as f64).sqrt(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Per-slot signal `x' = x/√M`.
    pub fn slot_signal(&self, x: Complex64) -> Complex64 {
        x * self.scale
    }
}

/// One AWGN channel with its own noise stream.
#[derive(Debug, Clone)]
pub struct AwgnChannel {
    params: ChannelParams,
    sigma_dim: f64,
    rng: ChaCha8Rng,
}

impl AwgnChannel {
    /// Channel drawing from stream `stream` of `params.seed()`.
    pub fn new(params: ChannelParams, stream: u64) -> Self {
        Self::with_rng(params, stream_rng(params.seed, stream))
    }

    pub fn with_rng(params: ChannelParams, rng: ChaCha8Rng) -> Self {
        Self {
            params,
            sigma_dim: (params.noise_variance / 2.0).sqrt(),
            rng,
        }
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// The underlying stream, for drawing source bits in lockstep with noise.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn noise(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re * self.sigma_dim, im * self.sigma_dim)
    }

    /// `y = x + n`.
    pub fn transmit(&mut self, x: Complex64) -> Complex64 {
        x + self.noise()
    }

    /// `[x' + n'_1, ..., x' + n'_M]` with independent noise per slot.
    pub fn transmit_repeated(&mut self, x: Complex64, scheme: &RepetitionScheme) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(scheme.m);
        self.transmit_repeated_into(x, scheme, &mut out);
        out
    }

    /// Appends the `M` slots to `out`.
    pub fn transmit_repeated_into(
        &mut self,
        x: Complex64,
        scheme: &RepetitionScheme,
        out: &mut Vec<Complex64>,
    ) {
        let xs = scheme.slot_signal(x);
        for _ in 0..scheme.m {
            out.push(self.transmit(xs));
        }
    }
}

/// Sum combiner `y' = Σ_m y'_m`.
pub fn combine(slots: &[Complex64]) -> Result<Complex64> {
    if slots.is_empty() {
        return domain("cannot combine an empty slot vector");
    }
    Ok(slots.iter().sum())
}

/// Linear SNR `A²/σ²` of a constellation on a channel.
pub fn snr_of(c: &LabeledConstellation, p: &ChannelParams) -> f64 {
    c.amplitude() * c.amplitude() / p.noise_variance()
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
