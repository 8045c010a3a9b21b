use std::collections::BTreeMap;

use serde::Serialize;

use super::MetLdpcCode;

/// Degree statistics of a lifted code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeStats {
    /// degree -> number of variable nodes
    pub vn_degree_histogram: BTreeMap<usize, usize>,
    /// degree -> number of check nodes
    pub cn_degree_histogram: BTreeMap<usize, usize>,
    /// Fraction of check nodes adjacent to at least one degree-1 variable node.
    pub frac_cns_touching_deg1_vns: f64,
}

pub fn code_stats(code: &MetLdpcCode) -> CodeStats {
    let mut vn_degree_histogram = BTreeMap::new();
    for vn in 0..code.n() {
        *vn_degree_histogram.entry(code.vn_degree(vn)).or_insert(0) += 1;
    }
    let mut cn_degree_histogram = BTreeMap::new();
    let mut touching = 0usize;
    for cn in 0..code.m() {
        *cn_degree_histogram.entry(code.cn_degree(cn)).or_insert(0) += 1;
        if code.edges()[code.cn_edge_range(cn)].iter().any(|e| code.vn_degree(e.vn) == 1) {
            touching += 1;
        }
    }
    let frac_cns_touching_deg1_vns = if code.m() == 0 { 0.0 } else { touching as f64 / code.m() as f64 };
    CodeStats { vn_degree_histogram, cn_degree_histogram, frac_cns_touching_deg1_vns }
}
