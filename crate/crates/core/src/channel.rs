//! BI-AWGN channel with unit-energy BPSK and the Monte Carlo frame-error
//! harness.
//!
//! Every frame transmits the all-zero codeword. Frame `k` of a run draws its
//! noise from a ChaCha8 stream selected by `(seed, k)`, so the noise seen by a
//! frame does not depend on which worker decodes it. Frames are decoded in
//! fixed-size batches and the stopping rule is applied in frame order, which
//! makes the whole [`FerResult`] independent of the worker count.

use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::MetLdpcCode;
use crate::decoder::{BpDecoder, CheckRule, DecodeError, DecodeOptions};

/// Two-sided 97.5% standard normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
    #[error("target_frame_errors must be at least 1")]
    ZeroTargetErrors,
    #[error("max_frames must be at least 1")]
    ZeroFrames,
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("E_s/N_0 must be finite, got {0}")]
    NonFiniteSnr(f64),
    #[error(transparent)]
    Decoder(#[from] DecodeError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Noise power `sigma^2 = N_0 / 2` for unit-energy BPSK at `E_s/N_0` in dB.
pub fn esn0_to_sigma2(esn0_db: f64) -> f64 {
    1.0 / (2.0 * 10f64.powf(esn0_db / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub esn0_db: f64,
    pub sigma2: f64,
}

impl ChannelParams {
    pub fn from_esn0_db(esn0_db: f64) -> Result<Self, SimError> {
        if !esn0_db.is_finite() {
            return Err(SimError::NonFiniteSnr(esn0_db));
        }
        Ok(Self { esn0_db, sigma2: esn0_to_sigma2(esn0_db) })
    }

    /// Mean `2/sigma^2` of the channel LLR of a transmitted zero.
    pub fn llr_mean(&self) -> f64 {
        2.0 / self.sigma2
    }
}

/// Fills `llr` with channel LLRs `2y/sigma^2`, `y = 1 + n`, for the all-zero
/// codeword. Punctured positions get exactly 0.
pub fn transmit_all_zero_into<R: rand::Rng + ?Sized>(
    code: &MetLdpcCode,
    params: &ChannelParams,
    rng: &mut R,
    llr: &mut [f64],
) {
    let sigma = params.sigma2.sqrt();
    let scale = 2.0 / params.sigma2;
    for (l, &p) in llr.iter_mut().zip(code.punctured()) {
        // draw for punctured positions too so the noise stream stays aligned with bit indices
        let n: f64 = StandardNormal.sample(rng);
        *l = if p { 0.0 } else { scale * (1.0 + sigma * n) };
    }
}

pub fn transmit_all_zero<R: rand::Rng + ?Sized>(code: &MetLdpcCode, params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    let mut llr = vec![0.0; code.n()];
    transmit_all_zero_into(code, params, rng, &mut llr);
    llr
}

/// Noise stream of frame `frame` in a run seeded with `seed`.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Decoder family, as named on the command line and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecoderKind {
    Spa,
    Msa,
    IdMsa,
}

impl DecoderKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Spa => "spa",
            Self::Msa => "msa",
            Self::IdMsa => "idmsa",
        }
    }
}

impl FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "spa" => Ok(Self::Spa),
            "msa" => Ok(Self::Msa),
            "idmsa" | "id-msa" => Ok(Self::IdMsa),
            other => Err(format!("unknown decoder `{other}` (expected spa, msa or idmsa)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub max_iterations: usize,
    pub max_frames: u64,
    pub target_frame_errors: u64,
    pub seed: u64,
    pub workers: usize,
    /// Frames decoded per parallel batch.
    pub batch_size: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            max_frames: 100_000,
            target_frame_errors: 50,
            seed: 0,
            workers: 1,
            batch_size: 64,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.max_iterations == 0 {
            return Err(SimError::ZeroIterations);
        }
        if self.target_frame_errors == 0 {
            return Err(SimError::ZeroTargetErrors);
        }
        if self.max_frames == 0 {
            return Err(SimError::ZeroFrames);
        }
        if self.workers == 0 {
            return Err(SimError::ZeroWorkers);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerResult {
    pub esn0_db: f64,
    pub frames_run: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub fer_ci95: (f64, f64),
    pub avg_iterations: f64,
    pub lookup_count_avg: f64,
}

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Debug, Clone, Copy)]
struct FrameOutcome {
    error: bool,
    iterations: usize,
    lookups: u64,
}

/// Estimates the frame error rate of `rule` on `code` at one channel point.
///
/// A frame counts as an error when the decoder reports failure or when it
/// converges to a nonzero codeword. Frames run until `target_frame_errors`
/// errors or `max_frames` frames, whichever comes first.
pub fn run_fer(
    code: &MetLdpcCode,
    rule: CheckRule<'_>,
    params: &ChannelParams,
    cfg: &SimConfig,
) -> Result<FerResult, SimError> {
    cfg.validate()?;
    let options = DecodeOptions { max_iterations: cfg.max_iterations, early_stop: true, trace: false };
    let decoder = BpDecoder::new(code, rule, options)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))?;

    let batch = cfg.batch_size.max(1) as u64;
    let (mut frames, mut errors, mut iterations, mut lookups) = (0u64, 0u64, 0u64, 0u64);
    'outer: while frames < cfg.max_frames {
        let start = frames;
        let end = (start + batch).min(cfg.max_frames);
        let outcomes: Vec<FrameOutcome> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(
                    || (decoder.workspace(), vec![0.0; code.n()]),
                    |(ws, llr), k| {
                        let mut rng = frame_rng(cfg.seed, k);
                        transmit_all_zero_into(code, params, &mut rng, llr);
                        let res = decoder.decode(llr, ws).expect("length checked at construction");
                        FrameOutcome {
                            error: !res.success || res.hard_decision.iter().any(|&b| b != 0),
                            iterations: res.iterations_used,
                            lookups: res.lookup_count,
                        }
                    },
                )
                .collect()
        });
        for o in outcomes {
            frames += 1;
            errors += u64::from(o.error);
            iterations += o.iterations as u64;
            lookups += o.lookups;
            if errors >= cfg.target_frame_errors {
                break 'outer;
            }
        }
    }

    let n = frames as f64;
    Ok(FerResult {
        esn0_db: params.esn0_db,
        frames_run: frames,
        frame_errors: errors,
        fer: errors as f64 / n,
        fer_ci95: wilson_interval(errors, frames, Z_95),
        avg_iterations: iterations as f64 / n,
        lookup_count_avg: lookups as f64 / n,
    })
}

pub const RESULTS_CSV_HEADER: &str =
    "esn0_db,frames,frame_errors,fer,ci_lo,ci_hi,avg_iters,avg_lookups,decoder,code_name,seed";

/// Writes the results table, one row per channel point.
pub fn write_results_csv<W: Write>(
    rows: &[FerResult],
    decoder: &str,
    code_name: &str,
    seed: u64,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{RESULTS_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.esn0_db,
            r.frames_run,
            r.frame_errors,
            r.fer,
            r.fer_ci95.0,
            r.fer_ci95.1,
            r.avg_iterations,
            r.lookup_count_avg,
            decoder,
            code_name,
            seed
        )?;
    }
    Ok(())
}
