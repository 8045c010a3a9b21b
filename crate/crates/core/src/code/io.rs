//! Edge-list CSV export of a lifted code.
//!
//! The first line is `# ` followed by a JSON header, the second line the
//! column names `cn,vn,edge_type`, then one row per edge in check-major order.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{CodeError, Edge, MetLdpcCode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeHeader {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub z: usize,
    pub rate: f64,
    pub edge_types: usize,
    /// Indices of punctured variable nodes.
    pub punctured: Vec<usize>,
}

impl CodeHeader {
    pub fn of(code: &MetLdpcCode) -> Self {
        Self {
            name: code.name().to_string(),
            n: code.n(),
            m: code.m(),
            z: code.lifting_factor(),
            rate: code.rate(),
            edge_types: code.num_edge_types(),
            punctured: code
                .punctured()
                .iter()
                .enumerate()
                .filter_map(|(i, &p)| p.then_some(i))
                .collect(),
        }
    }
}

pub fn write_code_csv<W: Write>(code: &MetLdpcCode, mut out: W) -> Result<(), CodeError> {
    let header = serde_json::to_string(&CodeHeader::of(code)).map_err(|e| CodeError::Format(e.to_string()))?;
    writeln!(out, "# {header}")?;
    writeln!(out, "cn,vn,edge_type")?;
    for e in code.edges() {
        writeln!(out, "{},{},{}", e.cn, e.vn, e.edge_type)?;
    }
    Ok(())
}

pub fn read_code_csv<R: BufRead>(input: R) -> Result<MetLdpcCode, CodeError> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| CodeError::Format("empty file".into()))??;
    let json = first
        .strip_prefix('#')
        .ok_or_else(|| CodeError::Format("missing JSON header line".into()))?;
    let header: CodeHeader =
        serde_json::from_str(json.trim()).map_err(|e| CodeError::Format(format!("header: {e}")))?;
    let columns = lines.next().ok_or_else(|| CodeError::Format("missing column line".into()))??;
    if columns.trim() != "cn,vn,edge_type" {
        return Err(CodeError::Format(format!("unexpected columns `{}`", columns.trim())));
    }
    let mut edges = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(|p| p.trim().parse::<usize>());
        let mut next = || {
            parts
                .next()
                .and_then(Result::ok)
                .ok_or_else(|| CodeError::Format(format!("bad edge row {}: `{line}`", i + 3)))
        };
        edges.push(Edge { cn: next()?, vn: next()?, edge_type: next()? });
    }
    let mut punctured = vec![false; header.n];
    for &p in &header.punctured {
        *punctured
            .get_mut(p)
            .ok_or_else(|| CodeError::Format(format!("punctured index {p} out of range")))? = true;
    }
    MetLdpcCode::from_edges(header.name, header.n, header.m, header.z, header.edge_types, edges, punctured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{lift_protograph, parse_protograph, LiftOptions};

    #[test]
    fn csv_round_trip() {
        let p = parse_protograph(
            "# name: rt\n2 3 3\n1 2 0\n0 1 1\n(0,0,0)=1 (0,1,0)=2 (1,1,0)=3 (1,2,0)=3\n0 1 0\n",
        )
        .unwrap();
        let code = lift_protograph(&p, 4, 9, LiftOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_code_csv(&code, &mut buf).unwrap();
        let back = read_code_csv(buf.as_slice()).unwrap();
        assert_eq!(code, back);
        assert_eq!(back.punctured().iter().filter(|&&p| p).count(), 4);
    }

    #[test]
    fn rejects_missing_header() {
        let err = read_code_csv("cn,vn,edge_type\n0,0,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CodeError::Format(_)));
    }
}
