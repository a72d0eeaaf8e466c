//! Monte-Carlo link simulation of the coded low level.
//!
//! Per frame: random information bits → LDPC encode → low-level bits `v^L`
//! (with uncoded random `v^H`) → QPSK mapping → optional `M`-fold symbol
//! repetition at `x/√M` → AWGN → sum combining → LLRs → BP decode → bit errors.
//!
//! The SNR axis is the per-channel-use SNR `γ = (slot amplitude)²/σ²`. With
//! symbol repetition the post-combining SNR is therefore `M·γ`.
//!
//! Work is split into `workers` generator streams of the seed. Every SNR point
//! restarts the same streams, so points of a sweep share their source bits and
//! normalized noise. Results depend on (config, seed, workers) only.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{from_db, to_db, AwgnChannel, ChannelParams, RepetitionScheme};
use crate::constellation::LabeledConstellation;
use crate::demod::{llr_high, llr_low};
use crate::error::{domain, Error, Result};
use crate::ldpc::{BpDecoder, DecoderConfig, LdpcCode};

/// Bisection stops once the SNR bracket is narrower than this.
pub const SEARCH_RESOLUTION_DB: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Base code, each coded symbol sent `M` times at `x/√M` and sum-combined.
    SymbolRepetition,
    /// The code itself carries the rate reduction; one channel use per bit.
    LowRateCode,
}

impl std::str::FromStr for SimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rep" => Ok(SimMode::SymbolRepetition),
            "lowrate" => Ok(SimMode::LowRateCode),
            _ => domain(format!("unknown mode {s:?} (expected rep or lowrate)")),
        }
    }
}

impl SimMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SimMode::SymbolRepetition => "rep",
            SimMode::LowRateCode => "lowrate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code_path: PathBuf,
    /// Repetition factor; bookkeeping only in [`SimMode::LowRateCode`].
    pub m: usize,
    pub mode: SimMode,
    pub snr_db: Vec<f64>,
    pub target_ber: f64,
    pub max_frames: u64,
    pub min_frames: u64,
    pub min_bit_errors: u64,
    pub seed: u64,
    pub workers: usize,
    /// Frames each worker runs between stopping-rule checks.
    pub batch: u64,
    pub decoder: DecoderConfig,
}

impl SimConfig {
    pub fn new(code_path: impl Into<PathBuf>) -> Self {
        Self {
            code_path: code_path.into(),
            m: 1,
            mode: SimMode::SymbolRepetition,
            snr_db: Vec::new(),
            target_ber: 1e-2,
            max_frames: 100_000,
            min_frames: 0,
            min_bit_errors: 100,
            seed: 1,
            workers: 1,
            batch: 32,
            decoder: DecoderConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return domain("repetition factor must be at least 1");
        }
        if self.workers == 0 {
            return domain("need at least one worker");
        }
        if self.batch == 0 {
            return domain("batch must be at least 1");
        }
        if self.max_frames == 0 {
            return domain("max_frames must be at least 1");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return domain("SNR grid contains a non-finite value");
        }
        Ok(())
    }
}

/// One simulated SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub snr_linear: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// `bit_errors / (frames · k)`.
    pub ber: f64,
    /// Standard error of `ber` from per-frame error counts, so error bursts
    /// within a frame are not mistaken for independent events.
    pub stderr: f64,
    pub avg_iterations: f64,
    /// Uncoded hard-decision BER of the high level, logged only.
    pub high_level_ber: f64,
    /// Fewer bit errors than `min_bit_errors` were observed.
    pub low_confidence: bool,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    bit_errors_sq: u128,
    frame_errors: u64,
    iterations: u64,
    high_errors: u64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.frames += o.frames;
        self.bit_errors += o.bit_errors;
        self.bit_errors_sq += o.bit_errors_sq;
        self.frame_errors += o.frame_errors;
        self.iterations += o.iterations;
        self.high_errors += o.high_errors;
    }
}

struct Worker {
    channel: AwgnChannel,
    decoder: BpDecoder,
    info: Vec<u8>,
    high: Vec<u8>,
    slots: Vec<Complex64>,
    llrs: Vec<f64>,
}

/// A loaded code plus configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    code: Arc<LdpcCode>,
    cfg: SimConfig,
    qpsk: LabeledConstellation,
}

impl Simulator {
    /// Loads the code named by `cfg.code_path`.
    pub fn from_config(cfg: SimConfig) -> Result<Self> {
        let code = LdpcCode::load_alist(&cfg.code_path)?;
        Self::with_code(Arc::new(code), cfg)
    }

    pub fn with_code(code: Arc<LdpcCode>, cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        BpDecoder::new(cfg.decoder)?;
        Ok(Self {
            code,
            cfg,
            qpsk: LabeledConstellation::qpsk(1.0)?,
        })
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Same code, different repetition factor.
    pub fn with_repetition(&self, m: usize) -> Result<Self> {
        let mut cfg = self.cfg.clone();
        cfg.m = m;
        Self::with_code(self.code.clone(), cfg)
    }

    fn slots_per_symbol(&self) -> usize {
        match self.cfg.mode {
            SimMode::SymbolRepetition => self.cfg.m,
            SimMode::LowRateCode => 1,
        }
    }

    /// Transmit energy per information bit at per-use SNR `gamma` (σ² = 1).
    pub fn energy_per_info_bit(&self, gamma: f64) -> f64 {
        let uses_per_coded_bit = self.slots_per_symbol() as f64;
        gamma * uses_per_coded_bit / self.code.rate()
    }

    /// Information bits per channel use.
    pub fn throughput(&self) -> f64 {
        self.code.rate() / self.slots_per_symbol() as f64
    }

    fn new_worker(&self, index: usize) -> Result<Worker> {
        let params = ChannelParams::new(1.0, self.cfg.seed)?;
        Ok(Worker {
            channel: AwgnChannel::new(params, index as u64),
            decoder: BpDecoder::new(self.cfg.decoder)?,
            info: vec![0; self.code.k()],
            high: vec![0; self.code.n()],
            slots: Vec::new(),
            llrs: vec![0.0; self.code.n()],
        })
    }

    fn run_frame(&self, w: &mut Worker, gamma: f64, tally: &mut Tally) -> Result<()> {
        let code = &*self.code;
        let m = self.slots_per_symbol();
        let scheme = RepetitionScheme::new(m)?;
        // σ² = 1 per slot; the unrepeated symbol has amplitude √(Mγ)
        let amplitude = (gamma * m as f64).sqrt();

        let rng = w.channel.rng_mut();
        for b in w.info.iter_mut() {
            *b = rng.random::<bool>() as u8;
        }
        for b in w.high.iter_mut() {
            *b = rng.random::<bool>() as u8;
        }
        let word = code.encode(&w.info)?;

        let mut high_errors = 0u64;
        for (i, (&vl, &vh)) in word.iter().zip(&w.high).enumerate() {
            let x = self.qpsk.map_bits([vh, vl]) * amplitude;
            w.slots.clear();
            w.channel.transmit_repeated_into(x, &scheme, &mut w.slots);
            let y: Complex64 = w.slots.iter().sum::<Complex64>() * scheme.scale();
            let low = llr_low(y, amplitude, 1.0);
            w.llrs[i] = low;
            let high = llr_high(y, low, amplitude, 1.0);
            high_errors += ((high < 0.0) as u8 != vh) as u64;
        }

        let result = w.decoder.decode(code, &w.llrs)?;
        let errors = code
            .info_positions()
            .iter()
            .zip(&w.info)
            .filter(|(&p, &b)| result.bits[p] != b)
            .count() as u64;
        tally.frames += 1;
        tally.bit_errors += errors;
        tally.bit_errors_sq += (errors as u128) * (errors as u128);
        tally.frame_errors += (errors > 0) as u64;
        tally.iterations += result.iterations as u64;
        tally.high_errors += high_errors;
        Ok(())
    }

    /// Simulates per-use linear SNR `gamma` until the stopping rule fires.
    pub fn run_point(&self, gamma: f64) -> Result<BerRecord> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return domain(format!("SNR must be non-negative and finite, got {gamma}"));
        }
        let cfg = &self.cfg;
        let mut workers = (0..cfg.workers)
            .map(|i| self.new_worker(i))
            .collect::<Result<Vec<_>>>()?;
        let mut total = Tally::default();
        loop {
            let done = total.frames >= cfg.max_frames
                || (total.frames >= cfg.min_frames && total.bit_errors >= cfg.min_bit_errors);
            if done {
                break;
            }
            let remaining = cfg.max_frames - total.frames;
            let nw = cfg.workers as u64;
            let tallies = workers
                .par_iter_mut()
                .enumerate()
                .map(|(i, w)| {
                    let share = remaining / nw + ((i as u64) < remaining % nw) as u64;
                    let quota = share.min(cfg.batch);
                    let mut t = Tally::default();
                    for _ in 0..quota {
                        self.run_frame(w, gamma, &mut t)?;
                    }
                    Ok(t)
                })
                .collect::<Result<Vec<_>>>()?;
            for t in &tallies {
                total.add(t);
            }
        }
        Ok(self.record(gamma, &total))
    }

    fn record(&self, gamma: f64, t: &Tally) -> BerRecord {
        let k = self.code.k() as f64;
        let f = t.frames as f64;
        let ber = t.bit_errors as f64 / (f * k);
        let stderr = if t.frames > 1 {
            let mean = t.bit_errors as f64 / f;
            let var = ((t.bit_errors_sq as f64 / f - mean * mean) * f / (f - 1.0)).max(0.0);
            (var / f).sqrt() / k
        } else {
            0.0
        };
        let symbols = f * self.code.n() as f64;
        BerRecord {
            snr_db: to_db(gamma),
            snr_linear: gamma,
            frames: t.frames,
            bit_errors: t.bit_errors,
            frame_errors: t.frame_errors,
            ber,
            stderr,
            avg_iterations: t.iterations as f64 / f,
            high_level_ber: t.high_errors as f64 / symbols,
            low_confidence: t.bit_errors < self.cfg.min_bit_errors,
        }
    }

    /// Every point of the configured dB grid.
    pub fn sweep(&self) -> Result<Vec<BerRecord>> {
        self.cfg
            .snr_db
            .iter()
            .map(|&db| self.run_point(from_db(db)))
            .collect()
    }

    /// Bisection in dB between the ends of the configured grid for the lowest
    /// SNR whose measured BER is at most `target_ber`.
    pub fn snr_search(&self, target_ber: f64) -> Result<SearchResult> {
        let (Some(&lo), Some(&hi)) = (
            self.cfg.snr_db.iter().min_by(|a, b| a.total_cmp(b)),
            self.cfg.snr_db.iter().max_by(|a, b| a.total_cmp(b)),
        ) else {
            return domain("SNR search needs a non-empty grid");
        };
        let mut evaluations = Vec::new();
        let mut eval = |db: f64| -> Result<BerRecord> {
            let r = self.run_point(from_db(db))?;
            evaluations.push(r.clone());
            Ok(r)
        };
        let rec_lo = eval(lo)?;
        if rec_lo.ber <= target_ber {
            return Ok(SearchResult {
                gamma_hat: from_db(lo),
                bracket_db: (lo, lo),
                record: rec_lo,
                evaluations,
            });
        }
        let mut rec_hi = eval(hi)?;
        if rec_hi.ber > target_ber {
            return Err(Error::NotBracketed {
                target: target_ber,
                snr_lo_db: lo,
                ber_lo: rec_lo.ber,
                snr_hi_db: hi,
                ber_hi: rec_hi.ber,
            });
        }
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo >= SEARCH_RESOLUTION_DB {
            let mid = 0.5 * (lo + hi);
            let r = eval(mid)?;
            if r.ber <= target_ber {
                hi = mid;
                rec_hi = r;
            } else {
                lo = mid;
            }
        }
        Ok(SearchResult {
            gamma_hat: from_db(hi),
            bracket_db: (lo, hi),
            record: rec_hi,
            evaluations,
        })
    }

    /// Coded BER at per-slot SNR `γ1/M` with combining, against `M = 1` at `γ1`.
    pub fn repetition_equivalence_experiment(
        &self,
        gamma1: f64,
        ms: &[usize],
    ) -> Result<Vec<EquivalenceRow>> {
        if self.cfg.mode != SimMode::SymbolRepetition {
            return domain("repetition equivalence needs symbol-repetition mode");
        }
        let reference = self.with_repetition(1)?.run_point(gamma1)?;
        ms.iter()
            .map(|&m| {
                let record = if m == 1 {
                    reference.clone()
                } else {
                    self.with_repetition(m)?.run_point(gamma1 / m as f64)?
                };
                let delta = record.ber - reference.ber;
                let combined_stderr = record.stderr.hypot(reference.stderr);
                Ok(EquivalenceRow {
                    m,
                    slot_snr: gamma1 / m as f64,
                    record,
                    reference_ber: reference.ber,
                    delta,
                    combined_stderr,
                })
            })
            .collect()
    }

    /// Wall-clock estimate for `frames` frames at `gamma`, from a short probe.
    pub fn estimate_runtime(&self, gamma: f64, frames: u64) -> Result<Duration> {
        let probe = 8u64;
        let mut w = self.new_worker(0)?;
        let mut t = Tally::default();
        let start = Instant::now();
        for _ in 0..probe {
            self.run_frame(&mut w, gamma, &mut t)?;
        }
        let per_frame = start.elapsed().as_secs_f64() / probe as f64;
        Ok(Duration::from_secs_f64(
            per_frame * frames as f64 / self.cfg.workers as f64,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub gamma_hat: f64,
    /// Final `(lo, hi)` bracket in dB; `gamma_hat` is the upper end.
    pub bracket_db: (f64, f64),
    pub record: BerRecord,
    pub evaluations: Vec<BerRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceRow {
    pub m: usize,
    pub slot_snr: f64,
    pub record: BerRecord,
    pub reference_ber: f64,
    pub delta: f64,
    pub combined_stderr: f64,
}
