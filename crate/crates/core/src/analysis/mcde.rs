//! Monte Carlo density evolution by population dynamics.
//!
//! Every proto-edge slot keeps a population of variable-to-check messages.
//! A check-to-variable sample for slot `s` box-plus combines one random
//! member of every other slot's population in the same row; a new
//! variable-to-check sample adds a fresh channel LLR to one random
//! check-to-variable member of every other slot in the same column. Drawing
//! members independently models a cycle-free neighbourhood.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::code::Protograph;
use crate::decoder::LLR_SATURATION;

use super::density::{EdgeDensity, EdgeDensitySchedule, HISTOGRAM_BINS, HISTOGRAM_RANGE};
use super::pexit::SlotIndex;
use super::AnalysisError;

pub const MIN_SAMPLES: usize = 10_000;

#[inline]
fn box_plus(a: f64, b: f64) -> f64 {
    crate::decoder::box_plus(a.into(), b.into()).0
}

fn slot_rng(seed: u64, t: usize, phase: u64, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((t as u64) << 32) | (phase << 31) | slot as u64);
    rng
}

fn channel_sample<R: Rng>(rng: &mut R, dist: Option<&Normal<f64>>) -> f64 {
    dist.map_or(0.0, |d| d.sample(rng).clamp(-LLR_SATURATION, LLR_SATURATION))
}

/// Per-slot VN-to-CN sample populations for iterations `1..=iterations`,
/// reduced to edge-type histograms.
pub fn mc_density_evolution(
    proto: &Protograph,
    channel: &ChannelParams,
    iterations: usize,
    samples: usize,
    seed: u64,
) -> Result<EdgeDensitySchedule, AnalysisError> {
    if iterations == 0 {
        return Err(AnalysisError::ZeroIterations);
    }
    if samples < MIN_SAMPLES {
        return Err(AnalysisError::TooFewSamples { samples, min: MIN_SAMPLES });
    }
    let idx = SlotIndex::new(proto);
    let edges = proto.edges();
    let mu = channel.llr_mean();
    let dist = if mu > 0.0 && mu.is_finite() { Some(Normal::new(mu, (2.0 * mu).sqrt()).expect("finite")) } else { None };
    let col_dist = |c: usize| if proto.punctured()[c] { None } else { dist.as_ref() };

    let mut vc: Vec<Vec<f64>> = edges
        .par_iter()
        .enumerate()
        .map(|(s, pe)| {
            let mut rng = slot_rng(seed, 0, 0, s);
            (0..samples).map(|_| channel_sample(&mut rng, col_dist(pe.col))).collect()
        })
        .collect();

    let mut densities = Vec::with_capacity(iterations * proto.num_edge_types());
    densities.extend(summarize(proto, &vc));
    for t in 1..iterations {
        let cv: Vec<Vec<f64>> = edges
            .par_iter()
            .enumerate()
            .map(|(s, pe)| {
                let others: Vec<usize> = idx.by_row[pe.row].iter().copied().filter(|&o| o != s).collect();
                if others.is_empty() {
                    return vec![0.0; samples];
                }
                let mut rng = slot_rng(seed, t, 0, s);
                (0..samples)
                    .map(|_| {
                        others
                            .iter()
                            .map(|&o| vc[o][rng.random_range(0..samples)])
                            .reduce(box_plus)
                            .expect("nonempty")
                    })
                    .collect()
            })
            .collect();
        vc = edges
            .par_iter()
            .enumerate()
            .map(|(s, pe)| {
                let others: Vec<usize> = idx.by_col[pe.col].iter().copied().filter(|&o| o != s).collect();
                let mut rng = slot_rng(seed, t, 1, s);
                (0..samples)
                    .map(|_| {
                        let ch = channel_sample(&mut rng, col_dist(pe.col));
                        let ext: f64 = others.iter().map(|&o| cv[o][rng.random_range(0..samples)]).sum();
                        (ch + ext).clamp(-LLR_SATURATION, LLR_SATURATION)
                    })
                    .collect()
            })
            .collect();
        densities.extend(summarize(proto, &vc));
    }
    Ok(EdgeDensitySchedule {
        iterations,
        edge_types: proto.num_edge_types(),
        channel_esn0_db: channel.esn0_db,
        densities,
    })
}

/// Pools the slot populations of each edge type into a histogram density.
fn summarize(proto: &Protograph, populations: &[Vec<f64>]) -> Vec<EdgeDensity> {
    let e = proto.num_edge_types();
    let width = 2.0 * HISTOGRAM_RANGE / HISTOGRAM_BINS as f64;
    let mut counts = vec![vec![0u64; HISTOGRAM_BINS]; e];
    let mut sum = vec![0.0; e];
    let mut info = vec![0.0; e];
    let mut total = vec![0usize; e];
    for (pe, pop) in proto.edges().iter().zip(populations) {
        let i = pe.edge_type - 1;
        for &x in pop {
            let bin = (((x + HISTOGRAM_RANGE) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[i][bin] += 1;
            sum[i] += x;
            // log2(1 + e^-x)
            let sp = if x > 0.0 { (-x).exp().ln_1p() } else { -x + x.exp().ln_1p() };
            info[i] += 1.0 - sp / std::f64::consts::LN_2;
        }
        total[i] += pop.len();
    }
    (0..e)
        .map(|i| {
            let n = total[i].max(1) as f64;
            EdgeDensity::Histogram {
                masses: counts[i].iter().map(|&c| c as f64 / n).collect(),
                mean: sum[i] / n,
                mutual_information: info[i] / n,
            }
        })
        .collect()
}
