//! Protographs, quasi-cyclic lifting and the edge-typed Tanner graph.

mod io;
mod lift;
mod protograph;
mod stats;

pub use io::{read_code_csv, write_code_csv, CodeHeader};
pub use lift::{lift_protograph, LiftOptions};
pub use protograph::{parse_protograph, ProtoEdge, Protograph, ProtographError};
pub use stats::{code_stats, CodeStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("lifting factor must be positive")]
    ZeroLiftingFactor,
    #[error("lifting factor {z} is below the largest base-matrix entry {max_entry}; parallel edges would share a circulant shift")]
    ShiftCollision { z: usize, max_entry: u32 },
    #[error("edge ({cn},{vn}) outside a {m}x{n} parity-check matrix")]
    EdgeOutOfRange { cn: usize, vn: usize, m: usize, n: usize },
    #[error("edge type {edge_type} outside 1..={e}")]
    EdgeTypeOutOfRange { edge_type: usize, e: usize },
    #[error("duplicate edge ({cn},{vn})")]
    DuplicateEdge { cn: usize, vn: usize },
    #[error("puncture vector length {found} does not match n = {n}")]
    PunctureLength { n: usize, found: usize },
    #[error("malformed code file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One lifted Tanner-graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub cn: usize,
    pub vn: usize,
    /// Label in `1..=e` inherited from the protograph position.
    pub edge_type: usize,
}

/// A lifted multi-edge-type LDPC code.
///
/// Edges are stored check-major so that every check node owns a contiguous
/// run of edge indices; variable-node adjacency is kept as an index list into
/// that array. The struct is immutable after construction and can be shared
/// across decoder threads.
#[derive(Debug, Clone, PartialEq)]
pub struct MetLdpcCode {
    name: String,
    n: usize,
    m: usize,
    z: usize,
    num_edge_types: usize,
    edges: Vec<Edge>,
    punctured: Vec<bool>,
    cn_offsets: Vec<usize>,
    vn_offsets: Vec<usize>,
    vn_edges: Vec<usize>,
}

impl MetLdpcCode {
    pub fn from_edges(
        name: impl Into<String>,
        n: usize,
        m: usize,
        z: usize,
        num_edge_types: usize,
        mut edges: Vec<Edge>,
        punctured: Vec<bool>,
    ) -> Result<Self, CodeError> {
        if z == 0 {
            return Err(CodeError::ZeroLiftingFactor);
        }
        if punctured.len() != n {
            return Err(CodeError::PunctureLength { n, found: punctured.len() });
        }
        for e in &edges {
            if e.cn >= m || e.vn >= n {
                return Err(CodeError::EdgeOutOfRange { cn: e.cn, vn: e.vn, m, n });
            }
            if e.edge_type == 0 || e.edge_type > num_edge_types {
                return Err(CodeError::EdgeTypeOutOfRange { edge_type: e.edge_type, e: num_edge_types });
            }
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0].cn == w[1].cn && w[0].vn == w[1].vn {
                return Err(CodeError::DuplicateEdge { cn: w[0].cn, vn: w[0].vn });
            }
        }

        let mut cn_offsets = vec![0usize; m + 1];
        let mut vn_offsets = vec![0usize; n + 1];
        for e in &edges {
            cn_offsets[e.cn + 1] += 1;
            vn_offsets[e.vn + 1] += 1;
        }
        for i in 0..m {
            cn_offsets[i + 1] += cn_offsets[i];
        }
        for i in 0..n {
            vn_offsets[i + 1] += vn_offsets[i];
        }
        let mut fill = vn_offsets.clone();
        let mut vn_edges = vec![0usize; edges.len()];
        for (idx, e) in edges.iter().enumerate() {
            vn_edges[fill[e.vn]] = idx;
            fill[e.vn] += 1;
        }

        Ok(Self {
            name: name.into(),
            n,
            m,
            z,
            num_edge_types,
            edges,
            punctured,
            cn_offsets,
            vn_offsets,
            vn_edges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Code length `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity checks.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lifting_factor(&self) -> usize {
        self.z
    }

    pub fn num_edge_types(&self) -> usize {
        self.num_edge_types
    }

    /// `(n - m) / n`.
    pub fn rate(&self) -> f64 {
        (self.n as f64 - self.m as f64) / self.n as f64
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn punctured(&self) -> &[bool] {
        &self.punctured
    }

    /// Edge-index range owned by check `cn`.
    pub fn cn_edge_range(&self, cn: usize) -> std::ops::Range<usize> {
        self.cn_offsets[cn]..self.cn_offsets[cn + 1]
    }

    /// Edge indices incident to variable `vn`.
    pub fn vn_edge_indices(&self, vn: usize) -> &[usize] {
        &self.vn_edges[self.vn_offsets[vn]..self.vn_offsets[vn + 1]]
    }

    pub fn cn_degree(&self, cn: usize) -> usize {
        self.cn_offsets[cn + 1] - self.cn_offsets[cn]
    }

    pub fn vn_degree(&self, vn: usize) -> usize {
        self.vn_offsets[vn + 1] - self.vn_offsets[vn]
    }

    /// True when every check sees an even number of ones in `bits`.
    pub fn syndrome_is_zero(&self, bits: &[u8]) -> bool {
        (0..self.m).all(|cn| {
            self.edges[self.cn_edge_range(cn)]
                .iter()
                .fold(0u8, |acc, e| acc ^ bits[e.vn])
                == 0
        })
    }
}
