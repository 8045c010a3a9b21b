//! Quasi-cyclic lifting of a protograph.
//!
//! Proto check `r` and proto variable `c` expand into lifted nodes
//! `r*z + k` and `c*z + k` for `k in 0..z`. A proto-edge slot with circulant
//! shift `s` connects lifted check `r*z + k` to lifted variable
//! `c*z + (k + s) mod z`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodeError, Edge, MetLdpcCode, Protograph};

/// Knobs for [`lift_protograph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LiftOptions {
    /// Number of re-draws allowed per proto-edge when its shift closes a
    /// 4-cycle. Zero disables the girth check; when the budget runs out the
    /// last draw is kept.
    pub girth_retries: u32,
}

/// Lifts `proto` by `z` using shifts drawn from `seed`.
pub fn lift_protograph(
    proto: &Protograph,
    z: usize,
    seed: u64,
    options: LiftOptions,
) -> Result<MetLdpcCode, CodeError> {
    if z == 0 {
        return Err(CodeError::ZeroLiftingFactor);
    }
    if (proto.max_entry() as usize) > z {
        return Err(CodeError::ShiftCollision { z, max_entry: proto.max_entry() });
    }

    let shifts = draw_shifts(proto, z, seed, options.girth_retries);

    let mut edges = Vec::with_capacity(proto.edges().len() * z);
    for (pe, &s) in proto.edges().iter().zip(&shifts) {
        for k in 0..z {
            edges.push(Edge {
                cn: pe.row * z + k,
                vn: pe.col * z + (k + s) % z,
                edge_type: pe.edge_type,
            });
        }
    }
    let punctured = proto
        .punctured()
        .iter()
        .flat_map(|&p| std::iter::repeat_n(p, z))
        .collect();
    MetLdpcCode::from_edges(
        proto.name.clone(),
        proto.cols() * z,
        proto.rows() * z,
        z,
        proto.num_edge_types(),
        edges,
        punctured,
    )
}

fn draw_shifts(proto: &Protograph, z: usize, seed: u64, retries: u32) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = proto.edges();
    let mut shifts: Vec<Option<usize>> = vec![None; edges.len()];
    for idx in 0..edges.len() {
        let mut attempt = 0;
        loop {
            let s = rng.random_range(0..z);
            let parallel_clash = edges.iter().zip(&shifts).any(|(other, os)| {
                *os == Some(s) && other.row == edges[idx].row && other.col == edges[idx].col
            });
            if parallel_clash {
                // z >= multiplicity guarantees a free shift exists
                continue;
            }
            shifts[idx] = Some(s);
            if retries == 0 || attempt >= retries || !closes_four_cycle(proto, &shifts, idx, z) {
                break;
            }
            attempt += 1;
        }
    }
    shifts.into_iter().map(|s| s.unwrap()).collect()
}

/// Checks whether assigned proto-edge `idx` lies on a length-4 cycle of the
/// lifted graph, considering only edges whose shift is already fixed.
///
/// A closed walk e1 (r1,c1) -> e2 (r1,c2) -> e3 (r2,c2) -> e4 (r2,c1) with
/// consecutive edges distinct lifts to a 4-cycle iff
/// `s1 - s2 + s3 - s4 = 0 (mod z)`.
fn closes_four_cycle(proto: &Protograph, shifts: &[Option<usize>], idx: usize, z: usize) -> bool {
    let edges = proto.edges();
    let mut by_row = vec![Vec::new(); proto.rows()];
    let mut by_col = vec![Vec::new(); proto.cols()];
    for (i, (e, s)) in edges.iter().zip(shifts).enumerate() {
        if let Some(s) = s {
            by_row[e.row].push((i, *s));
            by_col[e.col].push((i, *s));
        }
    }
    let (r1, c1) = (edges[idx].row, edges[idx].col);
    let s1 = shifts[idx].unwrap();
    for &(i2, s2) in &by_row[r1] {
        if i2 == idx {
            continue;
        }
        for &(i3, s3) in &by_col[edges[i2].col] {
            if i3 == i2 {
                continue;
            }
            for &(i4, s4) in &by_row[edges[i3].row] {
                if edges[i4].col != c1 || i4 == i3 || i4 == idx {
                    continue;
                }
                if (s1 + s3 + 2 * z - s2 - s4) % z == 0 {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::parse_protograph;
    use proptest::prelude::*;
    use std::collections::{BTreeMap, HashMap};

    fn proto(text: &str) -> Protograph {
        parse_protograph(text).unwrap()
    }

    #[test]
    fn identity_lift_reproduces_base_matrix() {
        let p = proto("2 3 2\n1 1 0\n0 1 1\n(0,0,0)=1 (0,1,0)=1 (1,1,0)=2 (1,2,0)=2\n0 0 0\n");
        let code = lift_protograph(&p, 1, 7, LiftOptions::default()).unwrap();
        let pairs: Vec<_> = code.edges().iter().map(|e| (e.cn, e.vn)).collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 1), (1, 2)]);
        assert_eq!(code.n(), 3);
        assert_eq!(code.m(), 2);
    }

    #[test]
    fn parallel_edges_need_room_for_distinct_shifts() {
        let p = proto("1 2 1\n2 1\n(0,0,0)=1 (0,1,0)=1\n0 0\n");
        let err = lift_protograph(&p, 1, 0, LiftOptions::default()).unwrap_err();
        assert!(matches!(err, CodeError::ShiftCollision { z: 1, max_entry: 2 }));
        assert!(matches!(
            lift_protograph(&p, 0, 0, LiftOptions::default()),
            Err(CodeError::ZeroLiftingFactor)
        ));
        let code = lift_protograph(&p, 2, 0, LiftOptions::default()).unwrap();
        assert_eq!(code.edges().len(), 6);
    }

    #[test]
    fn paper_scale_length() {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../protographs/tbp_r0p01_placeholder.proto"
        ))
        .unwrap();
        let p = proto(&text);
        let z = 998_400 / p.cols();
        let code = lift_protograph(&p, z, 1, LiftOptions::default()).unwrap();
        assert_eq!(code.n(), 998_400);
        assert!((code.rate() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn girth_retries_remove_four_cycles_when_possible() {
        // (3,6)-regular-like proto: every pair of columns shares all three rows
        let p = proto(
            "3 6 1\n1 1 1 1 1 1\n1 1 1 1 1 1\n1 1 1 1 1 1\n\
             (0,0,0)=1 (0,1,0)=1 (0,2,0)=1 (0,3,0)=1 (0,4,0)=1 (0,5,0)=1 \
             (1,0,0)=1 (1,1,0)=1 (1,2,0)=1 (1,3,0)=1 (1,4,0)=1 (1,5,0)=1 \
             (2,0,0)=1 (2,1,0)=1 (2,2,0)=1 (2,3,0)=1 (2,4,0)=1 (2,5,0)=1\n0 0 0 0 0 0\n",
        );
        let code = lift_protograph(&p, 31, 3, LiftOptions { girth_retries: 200 }).unwrap();
        assert_eq!(count_four_cycles(&code), 0);
    }

    fn count_four_cycles(code: &MetLdpcCode) -> usize {
        let mut pair_count: HashMap<(usize, usize), usize> = HashMap::new();
        for cn in 0..code.m() {
            let vns: Vec<usize> = code.edges()[code.cn_edge_range(cn)].iter().map(|e| e.vn).collect();
            for a in 0..vns.len() {
                for b in a + 1..vns.len() {
                    *pair_count.entry((vns[a], vns[b])).or_default() += 1;
                }
            }
        }
        pair_count.values().map(|&k| k * (k - 1) / 2).sum()
    }

    fn arb_protograph() -> impl Strategy<Value = Protograph> {
        (1usize..4, 1usize..5).prop_flat_map(|(rows, cols)| {
            proptest::collection::vec(0u32..3, rows * cols).prop_map(move |flat| {
                let base: Vec<Vec<u32>> = flat.chunks(cols).map(<[u32]>::to_vec).collect();
                let mut labels = BTreeMap::new();
                let mut next = 1;
                for (r, row) in base.iter().enumerate() {
                    for (c, &v) in row.iter().enumerate() {
                        if v > 0 {
                            labels.insert((r, c, 0), next);
                            next += 1;
                        }
                    }
                }
                Protograph::new("prop", base, &labels, vec![false; cols]).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn lifting_preserves_degrees_and_types(p in arb_protograph(), extra in 0usize..4, seed: u64) {
            let z = (p.max_entry() as usize).max(1) + extra;
            let code = lift_protograph(&p, z, seed, LiftOptions::default()).unwrap();
            for cn in 0..code.m() {
                prop_assert_eq!(code.cn_degree(cn), p.row_degree(cn / z));
            }
            for vn in 0..code.n() {
                prop_assert_eq!(code.vn_degree(vn), p.col_degree(vn / z));
            }
            // every lifted edge inherits the label of its proto position
            for e in code.edges() {
                let (r, c) = (e.cn / z, e.vn / z);
                prop_assert!(p.edges().iter().any(|pe| pe.row == r && pe.col == c && pe.edge_type == e.edge_type));
            }
            // type groups have size z times the number of slots of that type
            let mut lifted: BTreeMap<usize, usize> = BTreeMap::new();
            for e in code.edges() { *lifted.entry(e.edge_type).or_default() += 1; }
            let mut slots: BTreeMap<usize, usize> = BTreeMap::new();
            for pe in p.edges() { *slots.entry(pe.edge_type).or_default() += z; }
            prop_assert_eq!(lifted, slots);
            prop_assert!((code.rate() - p.design_rate()).abs() < 1e-15);
        }

        #[test]
        fn lifting_is_deterministic(p in arb_protograph(), seed: u64) {
            let z = (p.max_entry() as usize).max(1) + 3;
            let a = lift_protograph(&p, z, seed, LiftOptions { girth_retries: 4 }).unwrap();
            let b = lift_protograph(&p, z, seed, LiftOptions { girth_retries: 4 }).unwrap();
            prop_assert_eq!(a.edges(), b.edges());
        }

        #[test]
        fn all_zero_word_is_a_codeword(p in arb_protograph(), seed: u64) {
            let z = (p.max_entry() as usize).max(1) + 1;
            let code = lift_protograph(&p, z, seed, LiftOptions::default()).unwrap();
            prop_assert!(code.syndrome_is_zero(&vec![0u8; code.n()]));
        }
    }
}
