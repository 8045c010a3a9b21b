//! Scaling-coefficient lookup tables for the iteration-dependent min-sum
//! decoder: raw per-(iteration, edge type, level) tensors, their K-means
//! compressed form, and the on-disk format.

mod io;
mod kmeans;
mod raw;

pub use io::{read_lut, write_lut, write_lut_csv, LUT_MAGIC, LUT_VERSION};
pub use kmeans::{kmeans, KMeansResult};
pub use raw::{
    build_quantization_grid, build_raw_lut, compress_lut, heatmap_rows, write_heatmap_csv, CompressionReport, HeatmapRow,
    RawLut,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How the residual tail integrals are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum NormalizationMode {
    /// Conditional expectation: tail integral divided by the tail mass.
    #[default]
    Normalized,
    /// Unnormalized tail integral, exactly as the expectation is printed.
    PaperLiteral,
}

impl NormalizationMode {
    pub(crate) fn code(self) -> u8 {
        match self {
            Self::Normalized => 0,
            Self::PaperLiteral => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Self::Normalized),
            1 => Some(Self::PaperLiteral),
            _ => None,
        }
    }
}

/// Placement of the quantization levels for the second-smallest magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridPolicy {
    /// `q/(Q+1)` quantiles of the iteration-1 channel LLR magnitude.
    ChannelQuantile,
    /// `q/(Q+1)` quantiles of the magnitude of all variable-to-check
    /// messages pooled over iterations and edge types.
    MessageQuantile,
    /// `Q` evenly spaced points `max*q/Q`, `q = 1..=Q`.
    Uniform { max: f64 },
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self::ChannelQuantile
    }
}

impl GridPolicy {
    pub(crate) fn code(self) -> (u8, f64) {
        match self {
            Self::ChannelQuantile => (0, 0.0),
            Self::MessageQuantile => (1, 0.0),
            Self::Uniform { max } => (2, max),
        }
    }

    pub(crate) fn from_code(code: u8, param: f64) -> Option<Self> {
        match code {
            0 => Some(Self::ChannelQuantile),
            1 => Some(Self::MessageQuantile),
            2 => Some(Self::Uniform { max: param }),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum LutError {
    #[error("cluster count {k} must lie in 1..={rows}")]
    ClusterCount { k: usize, rows: usize },
    #[error("density schedule covers {available} iterations, {requested} requested")]
    ScheduleTooShort { available: usize, requested: usize },
    #[error("density schedule has {schedule} edge types, protograph has {proto}")]
    EdgeTypeMismatch { schedule: usize, proto: usize },
    #[error("quantization needs at least one level")]
    NoLevels,
    #[error("unsupported LUT file version {0}")]
    Version(u32),
    #[error("not a LUT file (bad magic)")]
    Magic,
    #[error("corrupted LUT dimensions: {0}")]
    Dimensions(String),
    #[error("LUT value {value} at {location} outside [0, 1]")]
    OutOfRange { value: f64, location: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A K-means compressed lookup table.
///
/// Row `index_map[(t-1)*e + (i-1)]` of `cluster_rows` holds the scaling
/// coefficients for iteration `t` and edge type `i` at every grid level.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedLut {
    pub iterations: usize,
    pub edge_types: usize,
    pub grid: Vec<f64>,
    /// `K x Q`, row major.
    pub cluster_rows: Vec<f64>,
    /// `T x e`, row major, values in `0..K`.
    pub index_map: Vec<u32>,
    pub normalization: NormalizationMode,
    pub grid_policy: GridPolicy,
    pub source_name: String,
    pub channel_esn0_db: f64,
}

impl CompressedLut {
    pub fn levels(&self) -> usize {
        self.grid.len()
    }

    pub fn clusters(&self) -> usize {
        if self.grid.is_empty() {
            0
        } else {
            self.cluster_rows.len() / self.grid.len()
        }
    }

    /// Stored coefficient scalars, `K x Q`.
    pub fn entry_count(&self) -> usize {
        self.cluster_rows.len()
    }

    /// Coefficient row for iteration `t` (1-based) and edge type `i` (1-based).
    #[inline]
    pub fn row(&self, t: usize, edge_type: usize) -> &[f64] {
        let q = self.grid.len();
        let k = self.index_map[(t - 1) * self.edge_types + (edge_type - 1)] as usize;
        &self.cluster_rows[k * q..(k + 1) * q]
    }

    /// Index of the grid level used for `beta`: clamp to the grid range, then
    /// take the nearest point (lower one on exact midpoints).
    #[inline]
    pub fn level_index(&self, beta: f64) -> usize {
        nearest_level(&self.grid, beta)
    }

    /// Scaling coefficient for `(t, i, beta)`.
    pub fn coefficient(&self, t: usize, edge_type: usize, beta: f64) -> f64 {
        self.row(t, edge_type)[self.level_index(beta)]
    }

    /// Reconstructed `T x e x Q` tensor.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.iterations * self.edge_types * self.levels());
        for t in 1..=self.iterations {
            for i in 1..=self.edge_types {
                out.extend_from_slice(self.row(t, i));
            }
        }
        out
    }

    /// A table whose every coefficient is `value`; with `value = 1` the
    /// iteration-dependent decoder reduces to plain min-sum.
    pub fn constant(iterations: usize, edge_types: usize, grid: Vec<f64>, value: f64) -> Self {
        let q = grid.len();
        Self {
            iterations,
            edge_types,
            grid,
            cluster_rows: vec![value; q],
            index_map: vec![0; iterations * edge_types],
            normalization: NormalizationMode::Normalized,
            grid_policy: GridPolicy::Uniform { max: 0.0 },
            source_name: "constant".into(),
            channel_esn0_db: 0.0,
        }
    }
}

#[inline]
pub(crate) fn nearest_level(grid: &[f64], beta: f64) -> usize {
    let last = grid.len() - 1;
    if beta <= grid[0] {
        return 0;
    }
    if beta >= grid[last] {
        return last;
    }
    // branch-free count over a short sorted grid; equals partition_point
    let hi = grid.iter().map(|&g| usize::from(g < beta)).sum::<usize>();
    let lo = hi - 1;
    if beta - grid[lo] <= grid[hi] - beta {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_level_clamps_and_rounds() {
        let grid = [0.5, 1.0, 2.0, 4.0];
        assert_eq!(nearest_level(&grid, 0.0), 0);
        assert_eq!(nearest_level(&grid, 0.7), 0);
        assert_eq!(nearest_level(&grid, 0.75), 0);
        assert_eq!(nearest_level(&grid, 0.76), 1);
        assert_eq!(nearest_level(&grid, 2.9), 2);
        assert_eq!(nearest_level(&grid, 3.1), 3);
        assert_eq!(nearest_level(&grid, 1e9), 3);
        assert_eq!(nearest_level(&grid, f64::INFINITY), 3);
    }

    #[test]
    fn compressed_row_lookup() {
        let lut = CompressedLut {
            iterations: 2,
            edge_types: 2,
            grid: vec![0.0, 1.0],
            cluster_rows: vec![0.1, 0.2, 0.3, 0.4],
            index_map: vec![0, 1, 1, 0],
            normalization: NormalizationMode::Normalized,
            grid_policy: GridPolicy::ChannelQuantile,
            source_name: "t".into(),
            channel_esn0_db: -1.0,
        };
        assert_eq!(lut.clusters(), 2);
        assert_eq!(lut.row(1, 2), &[0.3, 0.4]);
        assert_eq!(lut.coefficient(2, 1, 0.9), 0.4);
        assert_eq!(lut.reconstruct(), vec![0.1, 0.2, 0.3, 0.4, 0.3, 0.4, 0.1, 0.2]);
    }
}
