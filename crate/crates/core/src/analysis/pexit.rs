//! Protograph EXIT recursion in the consistent-Gaussian mean domain.
//!
//! Each proto-edge slot carries the mean of its variable-to-check and
//! check-to-variable messages. With `psi(mu) = J^-1(1 - J(mu))` the updates
//! of one flooding iteration are
//!
//! ```text
//! check:    mu_cv(s) = psi( sum_{s' != s in row} psi(mu_vc(s')) )
//! variable: mu_vc(s) = mu_ch(col) + sum_{s' != s in col} mu_cv(s')
//! ```
//!
//! A degree-1 check sends 0, as the decoders do.

use crate::channel::ChannelParams;
use crate::code::Protograph;

use super::density::{EdgeDensity, EdgeDensitySchedule};
use super::jfunc::{j_complement, j_function, j_inverse, MU_MAX};
use super::AnalysisError;

#[inline]
fn psi(mu: f64) -> f64 {
    j_inverse(j_complement(mu))
}

/// Slot indices grouped by proto row and by proto column.
pub(crate) struct SlotIndex {
    pub by_row: Vec<Vec<usize>>,
    pub by_col: Vec<Vec<usize>>,
}

impl SlotIndex {
    pub fn new(proto: &Protograph) -> Self {
        let mut by_row = vec![Vec::new(); proto.rows()];
        let mut by_col = vec![Vec::new(); proto.cols()];
        for (s, pe) in proto.edges().iter().enumerate() {
            by_row[pe.row].push(s);
            by_col[pe.col].push(s);
        }
        Self { by_row, by_col }
    }
}

/// Arithmetic mean of the per-slot means of each edge type.
pub(crate) fn type_means(proto: &Protograph, slot_means: &[f64]) -> Vec<f64> {
    let e = proto.num_edge_types();
    let mut sum = vec![0.0; e];
    let mut count = vec![0usize; e];
    for (pe, &mu) in proto.edges().iter().zip(slot_means) {
        sum[pe.edge_type - 1] += mu;
        count[pe.edge_type - 1] += 1;
    }
    sum.iter().zip(&count).map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 }).collect()
}

/// Per-slot VN-to-CN means for iterations `1..=iterations`.
pub fn pexit_slot_means(
    proto: &Protograph,
    channel: &ChannelParams,
    iterations: usize,
) -> Result<Vec<Vec<f64>>, AnalysisError> {
    if iterations == 0 {
        return Err(AnalysisError::ZeroIterations);
    }
    let idx = SlotIndex::new(proto);
    let edges = proto.edges();
    let mu_ch: Vec<f64> =
        proto.punctured().iter().map(|&p| if p { 0.0 } else { channel.llr_mean().min(MU_MAX) }).collect();

    let mut vc: Vec<f64> = edges.iter().map(|pe| mu_ch[pe.col]).collect();
    let mut cv = vec![0.0; edges.len()];
    let mut a = vec![0.0; edges.len()];
    let mut out = Vec::with_capacity(iterations);
    out.push(vc.clone());

    while out.len() < iterations {
        for row in &idx.by_row {
            for &s in row {
                a[s] = psi(vc[s]);
            }
            for &s in row {
                cv[s] = if row.len() < 2 {
                    0.0
                } else {
                    psi(row.iter().filter(|&&o| o != s).map(|&o| a[o]).sum())
                };
            }
        }
        let mut next = vec![0.0; edges.len()];
        for (c, col) in idx.by_col.iter().enumerate() {
            for &s in col {
                let extrinsic: f64 = col.iter().filter(|&&o| o != s).map(|&o| cv[o]).sum();
                next[s] = (mu_ch[c] + extrinsic).min(MU_MAX);
            }
        }
        if next == vc {
            // fixed point: every later iteration is identical
            while out.len() < iterations {
                out.push(vc.clone());
            }
            break;
        }
        vc = next;
        out.push(vc.clone());
    }
    Ok(out)
}

/// Gaussian-approximation density schedule of the VN-to-CN messages.
pub fn pexit_run(
    proto: &Protograph,
    channel: &ChannelParams,
    iterations: usize,
) -> Result<EdgeDensitySchedule, AnalysisError> {
    let slots = pexit_slot_means(proto, channel, iterations)?;
    let densities = slots
        .iter()
        .flat_map(|vc| type_means(proto, vc))
        .map(|mean| EdgeDensity::Gaussian { mean })
        .collect();
    Ok(EdgeDensitySchedule {
        iterations,
        edge_types: proto.num_edge_types(),
        channel_esn0_db: channel.esn0_db,
        densities,
    })
}

/// Mutual information of the a-posteriori LLR of every proto column after
/// `iterations` check updates.
pub fn pexit_posterior_information(
    proto: &Protograph,
    channel: &ChannelParams,
    iterations: usize,
) -> Result<Vec<f64>, AnalysisError> {
    let slots = pexit_slot_means(proto, channel, iterations)?;
    let vc = &slots[iterations - 1];
    let idx = SlotIndex::new(proto);
    let mut cv = vec![0.0; vc.len()];
    for row in &idx.by_row {
        for &s in row {
            cv[s] = if row.len() < 2 {
                0.0
            } else {
                psi(row.iter().filter(|&&o| o != s).map(|&o| psi(vc[o])).sum())
            };
        }
    }
    Ok(idx
        .by_col
        .iter()
        .enumerate()
        .map(|(c, col)| {
            let ch = if proto.punctured()[c] { 0.0 } else { channel.llr_mean() };
            j_function((ch + col.iter().map(|&s| cv[s]).sum::<f64>()).min(MU_MAX))
        })
        .collect())
}
