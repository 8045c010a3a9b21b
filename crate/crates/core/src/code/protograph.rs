//! Protograph text format and the in-memory base-matrix template.
//!
//! The format is line oriented. Blank lines and lines starting with `#` are
//! ignored, except for an optional `# name: <text>` comment which sets the
//! protograph name.
//!
//! ```text
//! # name: example
//! 2 3 5                      <- rows cols e
//! 1 1 1                      <- base matrix, row major
//! 0 1 2
//! (0,0,0)=1 (0,1,0)=2 (0,2,0)=3 (1,1,0)=4 (1,2,0)=5
//! 0 0 0                      <- puncture flags, one per column
//! ```
//!
//! Assignments are `(row,col,slot)=label` with zero-based row, column and
//! slot indices and labels in `1..=e`. A position with `k > 1` parallel edges
//! is labeled either through slot 0 alone (every parallel edge inherits the
//! label) or through each of its slots `0..k`. Assignments may be spread over
//! several lines; the last non-comment line is always the puncture vector.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Errors raised while parsing or validating a protograph.
///
/// Line numbers are 1-based and refer to the offending input line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtographError {
    #[error("line {line}: malformed header, expected `rows cols e`")]
    BadHeader { line: usize },
    #[error("input ends before the base matrix is complete ({found} of {expected} rows)")]
    TruncatedMatrix { expected: usize, found: usize },
    #[error("line {line}: ragged matrix row with {found} entries, expected {expected}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("line {line}: negative base-matrix entry {value} in column {col}")]
    NegativeEntry { line: usize, col: usize, value: i64 },
    #[error("line {line}: cannot parse `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: position ({row},{col}) is outside the base matrix")]
    PositionOutOfRange { line: usize, row: usize, col: usize },
    #[error("line {line}: position ({row},{col}) is a zero entry and cannot carry a label")]
    LabelOnZeroEntry { line: usize, row: usize, col: usize },
    #[error("line {line}: slot {slot} exceeds the multiplicity of position ({row},{col})")]
    SlotOutOfRange { line: usize, row: usize, col: usize, slot: usize },
    #[error("line {line}: edge-type label {label} outside 1..={e}")]
    LabelOutOfRange { line: usize, label: usize, e: usize },
    #[error("line {line}: duplicate label for slot ({row},{col},{slot})")]
    DuplicateLabel { line: usize, row: usize, col: usize, slot: usize },
    #[error("line {line}: position ({row},{col}) has no edge-type label for slot {slot}")]
    MissingLabel { line: usize, row: usize, col: usize, slot: usize },
    #[error("line {line}: {found} distinct edge-type labels, header declares e = {expected}")]
    LabelCountMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: puncture vector has {found} entries, expected {expected}")]
    PunctureLength { line: usize, expected: usize, found: usize },
    #[error("missing puncture vector")]
    MissingPunctureVector,
}

/// One parallel-edge slot of a nonzero base-matrix position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProtoEdge {
    pub row: usize,
    pub col: usize,
    pub slot: usize,
    /// Edge-type label in `1..=e`.
    pub edge_type: usize,
}

/// A base matrix with labeled edge types and puncture flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protograph {
    pub name: String,
    rows: usize,
    cols: usize,
    base: Vec<u32>,
    edges: Vec<ProtoEdge>,
    punctured: Vec<bool>,
    num_edge_types: usize,
}

impl Protograph {
    /// Builds a protograph from its parts, checking every structural invariant.
    ///
    /// `labels` maps `(row, col, slot)` to an edge-type label with the same
    /// slot-0 broadcast rule as the text format.
    pub fn new(
        name: impl Into<String>,
        base: Vec<Vec<u32>>,
        labels: &BTreeMap<(usize, usize, usize), usize>,
        punctured: Vec<bool>,
    ) -> Result<Self, ProtographError> {
        let rows = base.len();
        let cols = base.first().map_or(0, Vec::len);
        for (r, row) in base.iter().enumerate() {
            if row.len() != cols {
                return Err(ProtographError::RaggedRow {
                    line: r + 1,
                    expected: cols,
                    found: row.len(),
                });
            }
        }
        if punctured.len() != cols {
            return Err(ProtographError::PunctureLength {
                line: 0,
                expected: cols,
                found: punctured.len(),
            });
        }
        let e = labels.values().collect::<BTreeSet<_>>().len();
        let located: Vec<_> = labels.iter().map(|(&(r, c, s), &l)| (0, r, c, s, l)).collect();
        let flat: Vec<u32> = base.into_iter().flatten().collect();
        let edges = resolve_labels(rows, cols, &flat, &located, e, 0)?;
        Ok(Self {
            name: name.into(),
            rows,
            cols,
            base: flat,
            edges,
            punctured,
            num_edge_types: e,
        })
    }

    /// Number of proto check nodes.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of proto variable nodes.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.base[row * self.cols + col]
    }

    pub fn max_entry(&self) -> u32 {
        self.base.iter().copied().max().unwrap_or(0)
    }

    /// All parallel-edge slots ordered by `(row, col, slot)`.
    pub fn edges(&self) -> &[ProtoEdge] {
        &self.edges
    }

    pub fn punctured(&self) -> &[bool] {
        &self.punctured
    }

    /// Number of distinct edge types `e`.
    pub fn num_edge_types(&self) -> usize {
        self.num_edge_types
    }

    pub fn row_degree(&self, row: usize) -> usize {
        (0..self.cols).map(|c| self.entry(row, c) as usize).sum()
    }

    pub fn col_degree(&self, col: usize) -> usize {
        (0..self.rows).map(|r| self.entry(r, col) as usize).sum()
    }

    /// Design rate `(cols - rows) / cols`, equal to the rate of every lifting.
    pub fn design_rate(&self) -> f64 {
        (self.cols as f64 - self.rows as f64) / self.cols as f64
    }
}

impl fmt::Display for Protograph {
    /// Writes the protograph back in the text format, one label per slot.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# name: {}", self.name)?;
        writeln!(f, "{} {} {}", self.rows, self.cols, self.num_edge_types)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.entry(r, c).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        let labels: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("({},{},{})={}", e.row, e.col, e.slot, e.edge_type))
            .collect();
        writeln!(f, "{}", labels.join(" "))?;
        let bits: Vec<&str> = self.punctured.iter().map(|&p| if p { "1" } else { "0" }).collect();
        writeln!(f, "{}", bits.join(" "))
    }
}

/// Parses the protograph text format described in the module docs.
pub fn parse_protograph(text: &str) -> Result<Protograph, ProtographError> {
    let mut name = String::from("unnamed");
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("name:") {
                name = n.trim().to_string();
            }
            continue;
        }
        lines.push((idx + 1, line));
    }

    let mut it = lines.into_iter();
    let (header_line, header) = it.next().ok_or(ProtographError::BadHeader { line: 1 })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| ProtographError::BadHeader { line: header_line })?;
    let [rows, cols, e] = dims[..] else {
        return Err(ProtographError::BadHeader { line: header_line });
    };

    let mut base = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (line_no, line) = it.next().ok_or(ProtographError::TruncatedMatrix {
            expected: rows,
            found: r,
        })?;
        let mut count = 0;
        for (c, tok) in line.split_whitespace().enumerate() {
            let value: i64 = tok.parse().map_err(|_| ProtographError::BadToken {
                line: line_no,
                token: tok.to_string(),
            })?;
            if value < 0 {
                return Err(ProtographError::NegativeEntry { line: line_no, col: c, value });
            }
            base.push(value as u32);
            count += 1;
        }
        if count != cols {
            return Err(ProtographError::RaggedRow { line: line_no, expected: cols, found: count });
        }
    }

    let rest: Vec<(usize, &str)> = it.collect();
    let Some((&(punct_line, punct), label_lines)) = rest.split_last() else {
        return Err(ProtographError::MissingPunctureVector);
    };
    if punct.contains('=') {
        return Err(ProtographError::MissingPunctureVector);
    }
    let punctured = punct
        .split_whitespace()
        .map(|tok| match tok {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(ProtographError::BadToken { line: punct_line, token: tok.to_string() }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if punctured.len() != cols {
        return Err(ProtographError::PunctureLength {
            line: punct_line,
            expected: cols,
            found: punctured.len(),
        });
    }

    let mut located = Vec::new();
    for &(line_no, line) in label_lines {
        for tok in line.split_whitespace() {
            let (r, c, s, l) = parse_assignment(tok).ok_or_else(|| ProtographError::BadToken {
                line: line_no,
                token: tok.to_string(),
            })?;
            located.push((line_no, r, c, s, l));
        }
    }
    let last_label_line = label_lines.last().map_or(punct_line, |&(l, _)| l);
    let edges = resolve_labels(rows, cols, &base, &located, e, last_label_line)?;

    Ok(Protograph { name, rows, cols, base, edges, punctured, num_edge_types: e })
}

fn parse_assignment(tok: &str) -> Option<(usize, usize, usize, usize)> {
    let (pos, label) = tok.split_once('=')?;
    let inner = pos.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = inner.split(',').map(|p| p.trim().parse::<usize>());
    let r = parts.next()?.ok()?;
    let c = parts.next()?.ok()?;
    let s = parts.next()?.ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((r, c, s, label.trim().parse().ok()?))
}

/// Expands label assignments into the per-slot edge list.
///
/// `located` holds `(line, row, col, slot, label)` tuples; `summary_line` is
/// reported for errors that concern the assignment set as a whole.
fn resolve_labels(
    rows: usize,
    cols: usize,
    base: &[u32],
    located: &[(usize, usize, usize, usize, usize)],
    e: usize,
    summary_line: usize,
) -> Result<Vec<ProtoEdge>, ProtographError> {
    let mut labels: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for &(line, row, col, slot, label) in located {
        if row >= rows || col >= cols {
            return Err(ProtographError::PositionOutOfRange { line, row, col });
        }
        let mult = base[row * cols + col] as usize;
        if mult == 0 {
            return Err(ProtographError::LabelOnZeroEntry { line, row, col });
        }
        if slot >= mult {
            return Err(ProtographError::SlotOutOfRange { line, row, col, slot });
        }
        if label == 0 || label > e {
            return Err(ProtographError::LabelOutOfRange { line, label, e });
        }
        if labels.insert((row, col, slot), label).is_some() {
            return Err(ProtographError::DuplicateLabel { line, row, col, slot });
        }
    }

    let mut edges = Vec::new();
    for row in 0..rows {
        for col in 0..cols {
            let mult = base[row * cols + col] as usize;
            if mult == 0 {
                continue;
            }
            let Some(&first) = labels.get(&(row, col, 0)) else {
                return Err(ProtographError::MissingLabel { line: summary_line, row, col, slot: 0 });
            };
            let explicit = (0..mult).filter(|s| labels.contains_key(&(row, col, *s))).count();
            for slot in 0..mult {
                let edge_type = match labels.get(&(row, col, slot)) {
                    Some(&l) => l,
                    None if explicit == 1 => first,
                    None => {
                        return Err(ProtographError::MissingLabel {
                            line: summary_line,
                            row,
                            col,
                            slot,
                        })
                    }
                };
                edges.push(ProtoEdge { row, col, slot, edge_type });
            }
        }
    }

    let distinct = edges.iter().map(|e| e.edge_type).collect::<BTreeSet<_>>().len();
    if distinct != e {
        return Err(ProtographError::LabelCountMismatch {
            line: summary_line,
            expected: e,
            found: distinct,
        });
    }
    Ok(edges)
}
