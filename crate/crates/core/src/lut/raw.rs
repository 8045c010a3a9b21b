//! Raw `T x e x Q` coefficient tensors and their compression.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{residual_slots, tail_factor, EdgeDensity, EdgeDensitySchedule};
use crate::channel::esn0_to_sigma2;
use crate::code::Protograph;

use super::kmeans::kmeans;
use super::{CompressedLut, GridPolicy, LutError, NormalizationMode};

/// Uncompressed coefficient tensor; entry `(t, i, q)` sits at
/// `((t-1)*e + (i-1))*Q + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLut {
    pub iterations: usize,
    pub edge_types: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub normalization: NormalizationMode,
    pub grid_policy: GridPolicy,
    pub source_name: String,
    pub channel_esn0_db: f64,
    /// Coefficients whose residual product hit an empty tail.
    pub clamped_entries: usize,
}

impl RawLut {
    pub fn levels(&self) -> usize {
        self.grid.len()
    }

    pub fn row(&self, t: usize, edge_type: usize) -> &[f64] {
        let q = self.grid.len();
        let k = (t - 1) * self.edge_types + (edge_type - 1);
        &self.values[k * q..(k + 1) * q]
    }

    /// Largest decrease along `q` over all rows; 0 for a monotone table.
    pub fn max_monotonicity_violation(&self) -> f64 {
        self.values
            .chunks(self.grid.len())
            .flat_map(|row| row.windows(2).map(|w| w[0] - w[1]))
            .fold(0.0, f64::max)
    }
}

/// Quantile of `|X|` under the equal-weight mixture `densities`, found by
/// bisection on the mixture CDF.
fn mixture_abs_quantile(densities: &[&EdgeDensity], p: f64) -> f64 {
    let cdf = |x: f64| densities.iter().map(|d| d.abs_cdf(x)).sum::<f64>() / densities.len() as f64;
    let mut hi = 1.0;
    while cdf(hi) < p && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Quantization points for the second-smallest magnitude.
pub fn build_quantization_grid(
    schedule: &EdgeDensitySchedule,
    policy: GridPolicy,
    levels: usize,
) -> Result<Vec<f64>, LutError> {
    if levels == 0 {
        return Err(LutError::NoLevels);
    }
    let quantiles = |densities: &[&EdgeDensity]| -> Vec<f64> {
        (1..=levels).map(|q| mixture_abs_quantile(densities, q as f64 / (levels + 1) as f64)).collect()
    };
    Ok(match policy {
        GridPolicy::ChannelQuantile => {
            let mean = 2.0 / esn0_to_sigma2(schedule.channel_esn0_db);
            quantiles(&[&EdgeDensity::Gaussian { mean }])
        }
        GridPolicy::MessageQuantile => {
            let all: Vec<&EdgeDensity> = schedule.densities.iter().collect();
            quantiles(&all)
        }
        GridPolicy::Uniform { max } => (1..=levels).map(|q| max * q as f64 / levels as f64).collect(),
    })
}

/// Evaluates the expected scaling coefficient for every iteration, edge type
/// and grid point.
///
/// Edge type `i` may label several proto-edge slots; its row is the average
/// of the per-slot coefficients. Slots on checks of degree 2 or less never
/// trigger a lookup and are given coefficient 1.
pub fn build_raw_lut(
    proto: &Protograph,
    schedule: &EdgeDensitySchedule,
    iterations: usize,
    levels: usize,
    policy: GridPolicy,
    mode: NormalizationMode,
) -> Result<RawLut, LutError> {
    if schedule.iterations < iterations {
        return Err(LutError::ScheduleTooShort { available: schedule.iterations, requested: iterations });
    }
    if schedule.edge_types != proto.num_edge_types() {
        return Err(LutError::EdgeTypeMismatch { schedule: schedule.edge_types, proto: proto.num_edge_types() });
    }
    let grid = build_quantization_grid(schedule, policy, levels)?;
    let e = proto.num_edge_types();
    let q = grid.len();

    // residual edge types of every slot, in (col, slot) order within its row
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); proto.rows()];
    for pe in proto.edges() {
        rows[pe.row].push(pe.edge_type);
    }
    // distinct residual type lists of each edge type with their multiplicity;
    // `None` marks a check of degree 2 or less
    let mut slots_of_type: Vec<Vec<(Option<Vec<usize>>, usize)>> = vec![Vec::new(); e];
    for row in &rows {
        for (k, &ty) in row.iter().enumerate() {
            let residual: Option<Vec<usize>> = (row.len() > 2).then(|| {
                let mut r: Vec<usize> = residual_slots(row.len(), k).iter().map(|&j| row[j]).collect();
                r.sort_unstable();
                r
            });
            let groups = &mut slots_of_type[ty - 1];
            match groups.iter_mut().find(|(r, _)| *r == residual) {
                Some((_, n)) => *n += 1,
                None => groups.push((residual, 1)),
            }
        }
    }
    let tanh_grid: Vec<f64> = grid.iter().map(|b| (b / 2.0).tanh()).collect();

    let per_t: Vec<(Vec<f64>, usize)> = (1..=iterations)
        .into_par_iter()
        .map(|t| {
            // tail factors of every edge type at every grid point
            let tails: Vec<Vec<(f64, bool)>> = (1..=e)
                .map(|l| grid.iter().map(|&b| tail_factor(schedule.get(t, l), b, mode)).collect())
                .collect();
            let mut out = Vec::with_capacity(e * q);
            let mut clamped = 0;
            for groups in &slots_of_type {
                let total: usize = groups.iter().map(|(_, n)| n).sum();
                for k in 0..q {
                    let mut acc = 0.0;
                    for (residual, n) in groups {
                        let c = match residual {
                            None => 1.0,
                            Some(types) => {
                                let mut c = tanh_grid[k];
                                let mut hit = false;
                                for &l in types {
                                    let (v, cl) = tails[l - 1][k];
                                    c *= v;
                                    hit |= cl;
                                }
                                clamped += n * usize::from(hit);
                                c.clamp(0.0, 1.0)
                            }
                        };
                        if groups.len() == 1 {
                            acc = c;
                        } else {
                            acc += *n as f64 * c;
                        }
                    }
                    out.push(match groups.len() {
                        0 => 1.0,
                        1 => acc,
                        _ => (acc / total as f64).clamp(0.0, 1.0),
                    });
                }
            }
            (out, clamped)
        })
        .collect();

    let clamped_entries = per_t.iter().map(|(_, c)| c).sum();
    let values = per_t.into_iter().flat_map(|(v, _)| v).collect();
    Ok(RawLut {
        iterations,
        edge_types: e,
        grid,
        values,
        normalization: mode,
        grid_policy: policy,
        source_name: proto.name.clone(),
        channel_esn0_db: schedule.channel_esn0_db,
        clamped_entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionReport {
    pub clusters: usize,
    pub entry_count: usize,
    pub kmeans_iterations: usize,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
}

/// Clusters the `T x e` rows of `raw` into `k` centroid rows.
pub fn compress_lut(raw: &RawLut, k: usize, seed: u64) -> Result<(CompressedLut, CompressionReport), LutError> {
    let rows = raw.iterations * raw.edge_types;
    if k == 0 || k > rows {
        return Err(LutError::ClusterCount { k, rows });
    }
    let q = raw.levels();
    let km = kmeans(&raw.values, q, k, seed, 200);
    let lut = CompressedLut {
        iterations: raw.iterations,
        edge_types: raw.edge_types,
        grid: raw.grid.clone(),
        cluster_rows: km.centroids.iter().map(|c| c.clamp(0.0, 1.0)).collect(),
        index_map: km.assignment,
        normalization: raw.normalization,
        grid_policy: raw.grid_policy,
        source_name: raw.source_name.clone(),
        channel_esn0_db: raw.channel_esn0_db,
    };
    let rebuilt = lut.reconstruct();
    let (mut sum, mut max) = (0.0, 0.0f64);
    for (a, b) in raw.values.iter().zip(&rebuilt) {
        let d = (a - b).abs();
        sum += d;
        max = max.max(d);
    }
    let report = CompressionReport {
        clusters: k,
        entry_count: lut.entry_count(),
        kmeans_iterations: km.iterations,
        mean_abs_error: sum / raw.values.len() as f64,
        max_abs_error: max,
    };
    Ok((lut, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub t: usize,
    pub edge_type: usize,
    pub mean_c: f64,
}

/// Grid-averaged coefficient for every `(t, i)`.
pub fn heatmap_rows(raw: &RawLut) -> Vec<HeatmapRow> {
    let mut out = Vec::with_capacity(raw.iterations * raw.edge_types);
    for t in 1..=raw.iterations {
        for i in 1..=raw.edge_types {
            let row = raw.row(t, i);
            out.push(HeatmapRow { t, edge_type: i, mean_c: row.iter().sum::<f64>() / row.len() as f64 });
        }
    }
    out
}

pub fn write_heatmap_csv<W: std::io::Write>(rows: &[HeatmapRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,edge_type,mean_c")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.t, r.edge_type, r.mean_c)?;
    }
    Ok(())
}
