use serde::Serialize;

use super::kernels::{saturate, Llr};
use super::DecodeError;
use crate::code::MetLdpcCode;
use crate::lut::CompressedLut;

/// Check-node update rule.
#[derive(Debug, Clone, Copy)]
pub enum CheckRule<'a> {
    /// Exact box-plus reduction.
    SumProduct,
    /// Scaled minimum with a fixed factor in `(0, 1]`.
    MinSum { factor: f64 },
    /// Minimum scaled by a coefficient looked up per iteration, output edge
    /// type and quantized second-smallest input magnitude.
    IdMinSum { lut: &'a CompressedLut },
}

impl CheckRule<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            Self::SumProduct => "spa",
            Self::MinSum { .. } => "msa",
            Self::IdMinSum { .. } => "idmsa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOptions {
    pub max_iterations: usize,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_stop: bool,
    /// Record posterior-magnitude statistics per iteration.
    pub trace: bool,
}

impl DecodeOptions {
    pub fn new(max_iterations: usize) -> Self {
        Self { max_iterations, early_stop: true, trace: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub min_abs_posterior: f64,
    pub mean_abs_posterior: f64,
    pub max_abs_posterior: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Every check satisfied and no bit left undecided.
    pub success: bool,
    pub iterations_used: usize,
    pub hard_decision: Vec<u8>,
    /// Scaling-coefficient table lookups performed (ID min-sum only).
    pub lookup_count: u64,
    pub trace: Vec<IterationTrace>,
}

/// Per-frame message storage, reusable across frames of the same code.
#[derive(Debug, Clone)]
pub struct DecoderWorkspace {
    pub vn_to_cn: Vec<f64>,
    pub cn_to_vn: Vec<f64>,
    pub posterior: Vec<f64>,
    pub hard_decision: Vec<u8>,
    /// Number of completed iterations.
    pub iteration: usize,
    channel: Vec<f64>,
    fwd: Vec<f64>,
    bwd: Vec<f64>,
    lookups: u64,
}

impl DecoderWorkspace {
    pub fn new(code: &MetLdpcCode) -> Self {
        let e = code.edges().len();
        let max_deg = (0..code.m()).map(|c| code.cn_degree(c)).max().unwrap_or(0);
        Self {
            vn_to_cn: vec![0.0; e],
            cn_to_vn: vec![0.0; e],
            posterior: vec![0.0; code.n()],
            hard_decision: vec![0; code.n()],
            iteration: 0,
            channel: vec![0.0; code.n()],
            fwd: vec![0.0; max_deg],
            bwd: vec![0.0; max_deg],
            lookups: 0,
        }
    }

    pub fn lookups(&self) -> u64 {
        self.lookups
    }
}

/// A flooding-schedule decoder bound to one code and one check rule.
#[derive(Debug, Clone)]
pub struct BpDecoder<'a> {
    code: &'a MetLdpcCode,
    rule: CheckRule<'a>,
    options: DecodeOptions,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a MetLdpcCode, rule: CheckRule<'a>, options: DecodeOptions) -> Result<Self, DecodeError> {
        if options.max_iterations == 0 {
            return Err(DecodeError::ZeroIterations);
        }
        match rule {
            CheckRule::SumProduct => {}
            CheckRule::MinSum { factor } => {
                if !(factor > 0.0 && factor <= 1.0) {
                    return Err(DecodeError::InvalidFactor(factor));
                }
            }
            CheckRule::IdMinSum { lut } => {
                if lut.edge_types != code.num_edge_types() {
                    return Err(DecodeError::LutEdgeTypes { lut: lut.edge_types, code: code.num_edge_types() });
                }
                if lut.iterations < options.max_iterations {
                    return Err(DecodeError::LutIterations {
                        lut: lut.iterations,
                        required: options.max_iterations,
                    });
                }
                if lut.grid.is_empty() {
                    return Err(DecodeError::EmptyLut);
                }
            }
        }
        Ok(Self { code, rule, options })
    }

    pub fn code(&self) -> &MetLdpcCode {
        self.code
    }

    pub fn rule(&self) -> CheckRule<'a> {
        self.rule
    }

    pub fn options(&self) -> DecodeOptions {
        self.options
    }

    pub fn workspace(&self) -> DecoderWorkspace {
        DecoderWorkspace::new(self.code)
    }

    /// Decodes one frame of channel LLRs.
    pub fn decode(&self, llr: &[f64], ws: &mut DecoderWorkspace) -> Result<DecodeResult, DecodeError> {
        self.initialize(llr, ws)?;
        let mut success = false;
        let mut trace = Vec::new();
        while ws.iteration < self.options.max_iterations {
            success = self.iterate(ws);
            if self.options.trace {
                trace.push(posterior_trace(ws));
            }
            if success && self.options.early_stop {
                break;
            }
        }
        Ok(DecodeResult {
            success,
            iterations_used: ws.iteration,
            hard_decision: ws.hard_decision.clone(),
            lookup_count: ws.lookups,
            trace,
        })
    }

    /// Loads the channel LLRs and resets all messages. Punctured positions
    /// are forced to 0 whatever their input value.
    pub fn initialize(&self, llr: &[f64], ws: &mut DecoderWorkspace) -> Result<(), DecodeError> {
        let code = self.code;
        if llr.len() != code.n() {
            return Err(DecodeError::LengthMismatch { expected: code.n(), found: llr.len() });
        }
        for (dst, (&l, &p)) in ws.channel.iter_mut().zip(llr.iter().zip(code.punctured())) {
            *dst = if p { 0.0 } else { saturate(l) };
        }
        for (msg, e) in ws.vn_to_cn.iter_mut().zip(code.edges()) {
            *msg = ws.channel[e.vn];
        }
        ws.cn_to_vn.fill(0.0);
        ws.posterior.copy_from_slice(&ws.channel);
        ws.iteration = 0;
        ws.lookups = 0;
        Ok(())
    }

    /// Runs one flooding iteration (all checks, then all variables) and
    /// reports whether the new hard decision is a decided codeword.
    pub fn iterate(&self, ws: &mut DecoderWorkspace) -> bool {
        let code = self.code;
        ws.iteration += 1;
        let t = ws.iteration;

        match self.rule {
            CheckRule::SumProduct => {
                for cn in 0..code.m() {
                    let r = code.cn_edge_range(cn);
                    spa_check(&ws.vn_to_cn[r.clone()], &mut ws.cn_to_vn[r], &mut ws.fwd, &mut ws.bwd);
                }
            }
            CheckRule::MinSum { factor } => {
                for cn in 0..code.m() {
                    let r = code.cn_edge_range(cn);
                    min_sum_check(&ws.vn_to_cn[r.clone()], &mut ws.cn_to_vn[r], |_, bm, _| factor * bm);
                }
            }
            CheckRule::IdMinSum { lut } => {
                let rows: Vec<&[f64]> = (1..=lut.edge_types).map(|i| lut.row(t, i)).collect();
                let mut lookups = 0u64;
                for cn in 0..code.m() {
                    let r = code.cn_edge_range(cn);
                    let types = &code.edges()[r.clone()];
                    let degree = r.len();
                    // bm2 takes at most two distinct values per check
                    let mut last = (f64::NAN, 0);
                    min_sum_check(&ws.vn_to_cn[r.clone()], &mut ws.cn_to_vn[r], |k, bm, bm2| {
                        if degree == 2 {
                            bm
                        } else {
                            lookups += 1;
                            if bm2 != last.0 {
                                last = (bm2, lut.level_index(bm2));
                            }
                            bm * rows[types[k].edge_type - 1][last.1]
                        }
                    });
                }
                ws.lookups += lookups;
            }
        }

        let mut decided = true;
        for vn in 0..code.n() {
            let incident = code.vn_edge_indices(vn);
            let total = incident.iter().fold(ws.channel[vn], |acc, &e| acc + ws.cn_to_vn[e]);
            ws.posterior[vn] = total;
            for &e in incident {
                ws.vn_to_cn[e] = saturate(total - ws.cn_to_vn[e]);
            }
            ws.hard_decision[vn] = u8::from(total < 0.0);
            decided &= total != 0.0;
        }
        decided && code.syndrome_is_zero(&ws.hard_decision)
    }
}

/// Exact check update of the sum-product decoder: output `i` is the box-plus
/// of every input except `i`, by forward-backward recursion.
pub fn cn_update_spa(inputs: &[Llr]) -> Vec<Llr> {
    let d = inputs.len();
    let input: Vec<f64> = inputs.iter().map(|l| l.0).collect();
    let (mut out, mut fwd, mut bwd) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    spa_check(&input, &mut out, &mut fwd, &mut bwd);
    out.into_iter().map(Llr).collect()
}

/// Forward-backward box-plus over one check, run on `u = e^-|x|` where the
/// pairwise operator is the rational map `(ua + ub) / (1 + ua ub)`. This is
/// the same operator as `min + s(b1, b2)` with two transcendentals per edge
/// instead of twelve.
fn spa_check(input: &[f64], output: &mut [f64], fwd: &mut [f64], bwd: &mut [f64]) {
    let d = input.len();
    match d {
        0 => {}
        1 => output[0] = 0.0,
        2 => {
            output[0] = input[1];
            output[1] = input[0];
        }
        _ => {
            let mut negative = false;
            for (u, &x) in output.iter_mut().zip(input) {
                *u = (-x.abs()).exp();
                negative ^= x < 0.0;
            }
            fwd[0] = output[0];
            for k in 1..d - 1 {
                fwd[k] = u_box_plus(fwd[k - 1], output[k]);
            }
            bwd[d - 1] = output[d - 1];
            for k in (1..d - 1).rev() {
                bwd[k] = u_box_plus(output[k], bwd[k + 1]);
            }
            for k in 0..d {
                let u = match k {
                    0 => bwd[1],
                    _ if k == d - 1 => fwd[d - 2],
                    _ => u_box_plus(fwd[k - 1], bwd[k + 1]),
                };
                let mag = 0.0 - u.min(1.0).ln();
                output[k] = if negative != (input[k] < 0.0) { -mag } else { mag };
            }
        }
    }
}

#[inline]
fn u_box_plus(a: f64, b: f64) -> f64 {
    (a + b) / (1.0 + a * b)
}

/// Min-sum style check update. `magnitude(k, bm, bm2)` maps the smallest and
/// second-smallest magnitudes over the inputs other than `k` to the output
/// magnitude; `bm2` is infinite for degree-2 checks.
///
/// Ties resolve to the lowest input index as the minimum.
#[inline]
fn min_sum_check(input: &[f64], output: &mut [f64], mut magnitude: impl FnMut(usize, f64, f64) -> f64) {
    let d = input.len();
    if d == 0 {
        return;
    }
    if d == 1 {
        output[0] = 0.0;
        return;
    }
    let mut negative = false;
    let (mut min1, mut min2, mut min3) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let (mut i1, mut i2) = (usize::MAX, usize::MAX);
    for (k, &x) in input.iter().enumerate() {
        negative ^= x < 0.0;
        let b = x.abs();
        if b < min1 {
            min3 = min2;
            min2 = min1;
            i2 = i1;
            min1 = b;
            i1 = k;
        } else if b < min2 {
            min3 = min2;
            min2 = b;
            i2 = k;
        } else if b < min3 {
            min3 = b;
        }
    }
    for (k, (&x, out)) in input.iter().zip(output.iter_mut()).enumerate() {
        let (bm, bm2) = if k == i1 {
            (min2, min3)
        } else if k == i2 {
            (min1, min3)
        } else {
            (min1, min2)
        };
        let mag = magnitude(k, bm, bm2);
        *out = if negative != (x < 0.0) { -mag } else { mag };
    }
}

fn posterior_trace(ws: &DecoderWorkspace) -> IterationTrace {
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, 0.0f64, 0.0);
    for p in &ws.posterior {
        let a = p.abs();
        lo = lo.min(a);
        hi = hi.max(a);
        sum += a;
    }
    IterationTrace {
        iteration: ws.iteration,
        min_abs_posterior: lo,
        mean_abs_posterior: sum / ws.posterior.len().max(1) as f64,
        max_abs_posterior: hi,
    }
}

/// Sum-product decoding with syndrome early stop.
pub fn spa_decode(code: &MetLdpcCode, llr: &[f64], max_iters: usize) -> Result<DecodeResult, DecodeError> {
    let dec = BpDecoder::new(code, CheckRule::SumProduct, DecodeOptions::new(max_iters))?;
    dec.decode(llr, &mut dec.workspace())
}

/// Scaled min-sum decoding with syndrome early stop.
pub fn msa_decode(
    code: &MetLdpcCode,
    llr: &[f64],
    max_iters: usize,
    factor: f64,
) -> Result<DecodeResult, DecodeError> {
    let dec = BpDecoder::new(code, CheckRule::MinSum { factor }, DecodeOptions::new(max_iters))?;
    dec.decode(llr, &mut dec.workspace())
}

/// Iteration-dependent scaled min-sum decoding with syndrome early stop.
pub fn id_msa_decode(
    code: &MetLdpcCode,
    llr: &[f64],
    max_iters: usize,
    lut: &CompressedLut,
) -> Result<DecodeResult, DecodeError> {
    let dec = BpDecoder::new(code, CheckRule::IdMinSum { lut }, DecodeOptions::new(max_iters))?;
    dec.decode(llr, &mut dec.workspace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{lift_protograph, parse_protograph, LiftOptions};
    use crate::decoder::kernels::{box_plus, Llr};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn regular_code(z: usize) -> MetLdpcCode {
        // (3,6)-regular protograph with two edge types
        let p = parse_protograph(
            "3 6 2\n1 1 1 1 1 1\n1 1 1 1 1 1\n1 1 1 1 1 1\n\
             (0,0,0)=1 (0,1,0)=1 (0,2,0)=1 (0,3,0)=2 (0,4,0)=2 (0,5,0)=2 \
             (1,0,0)=1 (1,1,0)=1 (1,2,0)=1 (1,3,0)=2 (1,4,0)=2 (1,5,0)=2 \
             (2,0,0)=1 (2,1,0)=1 (2,2,0)=1 (2,3,0)=2 (2,4,0)=2 (2,5,0)=2\n0 0 0 0 0 0\n",
        )
        .unwrap();
        lift_protograph(&p, z, 11, LiftOptions { girth_retries: 50 }).unwrap()
    }

    fn noisy_llrs(n: usize, sigma2: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, sigma2.sqrt()).unwrap();
        (0..n).map(|_| 2.0 * (1.0 + noise.sample(&mut rng)) / sigma2).collect()
    }

    #[test]
    fn noiseless_input_succeeds_at_first_iteration() {
        let code = regular_code(8);
        let llr = vec![30.0; code.n()];
        let res = spa_decode(&code, &llr, 20).unwrap();
        assert!(res.success);
        assert_eq!(res.iterations_used, 1);
        assert!(res.hard_decision.iter().all(|&b| b == 0));
    }

    #[test]
    fn all_zero_input_never_converges() {
        let code = regular_code(8);
        let llr = vec![0.0; code.n()];
        let res = spa_decode(&code, &llr, 15).unwrap();
        assert!(!res.success);
        assert_eq!(res.iterations_used, 15);
    }

    #[test]
    fn rejects_bad_arguments() {
        let code = regular_code(4);
        assert_eq!(
            spa_decode(&code, &[1.0; 3], 5).unwrap_err(),
            DecodeError::LengthMismatch { expected: 24, found: 3 }
        );
        assert_eq!(msa_decode(&code, &vec![1.0; 24], 5, 0.0).unwrap_err(), DecodeError::InvalidFactor(0.0));
        assert_eq!(msa_decode(&code, &vec![1.0; 24], 5, 1.5).unwrap_err(), DecodeError::InvalidFactor(1.5));
        assert_eq!(spa_decode(&code, &vec![1.0; 24], 0).unwrap_err(), DecodeError::ZeroIterations);
        let lut = CompressedLut::constant(4, 2, vec![0.0, 1.0], 1.0);
        assert_eq!(
            id_msa_decode(&code, &vec![1.0; 24], 5, &lut).unwrap_err(),
            DecodeError::LutIterations { lut: 4, required: 5 }
        );
        let lut = CompressedLut::constant(10, 3, vec![0.0, 1.0], 1.0);
        assert_eq!(
            id_msa_decode(&code, &vec![1.0; 24], 5, &lut).unwrap_err(),
            DecodeError::LutEdgeTypes { lut: 3, code: 2 }
        );
    }

    #[test]
    fn spa_check_matches_sequential_box_plus() {
        let input = [0.3, -1.7, 2.2, 0.9, -4.1];
        let mut out = [0.0; 5];
        spa_check(&input, &mut out, &mut [0.0; 5], &mut [0.0; 5]);
        for i in 0..5 {
            let expected = input
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &x)| Llr(x))
                .reduce(box_plus)
                .unwrap();
            assert!((out[i] - expected.0).abs() < 1e-12);
        }
    }

    #[test]
    fn min_sum_check_tie_breaking_uses_lowest_index() {
        let input = [2.0, -1.0, 1.0, 3.0];
        let mut seen = Vec::new();
        let mut out = [0.0; 4];
        min_sum_check(&input, &mut out, |k, bm, bm2| {
            seen.push((k, bm, bm2));
            bm
        });
        // index 1 is the minimum, index 2 the second minimum despite equal magnitude
        assert_eq!(seen, vec![(0, 1.0, 1.0), (1, 1.0, 2.0), (2, 1.0, 2.0), (3, 1.0, 1.0)]);
        assert_eq!(out, [-1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn min_sum_with_unit_factor_equals_spa_on_degree_two_checks() {
        // a cycle code: every check has degree 2
        let p = parse_protograph("2 2 1\n1 1\n1 1\n(0,0,0)=1 (0,1,0)=1 (1,0,0)=1 (1,1,0)=1\n0 0\n").unwrap();
        let code = lift_protograph(&p, 16, 2, LiftOptions::default()).unwrap();
        let llr = noisy_llrs(code.n(), 1.0, 4);
        let spa = BpDecoder::new(&code, CheckRule::SumProduct, DecodeOptions::new(10)).unwrap();
        let msa = BpDecoder::new(&code, CheckRule::MinSum { factor: 1.0 }, DecodeOptions::new(10)).unwrap();
        let (mut a, mut b) = (spa.workspace(), msa.workspace());
        spa.initialize(&llr, &mut a).unwrap();
        msa.initialize(&llr, &mut b).unwrap();
        for _ in 0..5 {
            spa.iterate(&mut a);
            msa.iterate(&mut b);
            assert_eq!(a.cn_to_vn, b.cn_to_vn);
        }
    }

    #[test]
    fn scaled_min_sum_scales_first_iteration_only() {
        let code = regular_code(10);
        let llr = noisy_llrs(code.n(), 0.8, 5);
        let unit = BpDecoder::new(&code, CheckRule::MinSum { factor: 1.0 }, DecodeOptions::new(5)).unwrap();
        let scaled = BpDecoder::new(&code, CheckRule::MinSum { factor: 0.75 }, DecodeOptions::new(5)).unwrap();
        let (mut a, mut b) = (unit.workspace(), scaled.workspace());
        unit.initialize(&llr, &mut a).unwrap();
        scaled.initialize(&llr, &mut b).unwrap();
        unit.iterate(&mut a);
        scaled.iterate(&mut b);
        for (x, y) in a.cn_to_vn.iter().zip(&b.cn_to_vn) {
            assert_eq!(0.75 * x, *y);
        }
    }

    #[test]
    fn id_min_sum_lookup_count() {
        // every check of the (3,6) code has degree 6, so each output message costs one lookup
        let code = regular_code(12);
        let lut = CompressedLut::constant(30, 2, vec![0.0, 0.5, 1.0, 2.0], 0.8);
        let llr = noisy_llrs(code.n(), 0.7, 9);
        let res = id_msa_decode(&code, &llr, 30, &lut).unwrap();
        assert_eq!(res.lookup_count, (code.edges().len() * res.iterations_used) as u64);
    }

    #[test]
    fn id_min_sum_skips_lookups_on_degree_two_checks() {
        let p = parse_protograph(
            "2 3 3\n1 1 1\n1 1 0\n(0,0,0)=1 (0,1,0)=1 (0,2,0)=2 (1,0,0)=3 (1,1,0)=3\n0 0 0\n",
        )
        .unwrap();
        let code = lift_protograph(&p, 5, 3, LiftOptions::default()).unwrap();
        let lut = CompressedLut::constant(4, 3, vec![0.0, 1.0], 0.5);
        let dec = BpDecoder::new(
            &code,
            CheckRule::IdMinSum { lut: &lut },
            DecodeOptions { max_iterations: 4, early_stop: false, trace: false },
        )
        .unwrap();
        let res = dec.decode(&noisy_llrs(code.n(), 1.0, 1), &mut dec.workspace()).unwrap();
        assert_eq!(res.lookup_count, 4 * 15);
    }

    #[test]
    fn trace_records_every_iteration() {
        let code = regular_code(6);
        let dec = BpDecoder::new(
            &code,
            CheckRule::SumProduct,
            DecodeOptions { max_iterations: 7, early_stop: false, trace: true },
        )
        .unwrap();
        let res = dec.decode(&noisy_llrs(code.n(), 2.0, 3), &mut dec.workspace()).unwrap();
        assert_eq!(res.trace.len(), 7);
        for tr in &res.trace {
            assert!(tr.min_abs_posterior <= tr.mean_abs_posterior && tr.mean_abs_posterior <= tr.max_abs_posterior);
        }
    }

    #[test]
    fn punctured_positions_start_at_zero() {
        let p = parse_protograph(
            "1 3 1\n1 1 1\n(0,0,0)=1 (0,1,0)=1 (0,2,0)=1\n1 0 0\n",
        )
        .unwrap();
        let code = lift_protograph(&p, 2, 0, LiftOptions::default()).unwrap();
        let dec = BpDecoder::new(&code, CheckRule::SumProduct, DecodeOptions::new(1)).unwrap();
        let mut ws = dec.workspace();
        dec.initialize(&[5.0; 6], &mut ws).unwrap();
        assert_eq!(&ws.posterior[..2], &[0.0, 0.0]);
        assert_eq!(&ws.posterior[2..], &[5.0; 4]);
    }

    /// Brute-force bitwise MAP over every codeword of a tiny code.
    fn bitwise_map(code: &MetLdpcCode, llr: &[f64]) -> Vec<u8> {
        let n = code.n();
        let mut p0 = vec![f64::NEG_INFINITY; n];
        let mut p1 = vec![f64::NEG_INFINITY; n];
        let lse = |a: f64, b: f64| if a == f64::NEG_INFINITY { b } else { a.max(b) + (-(a - b).abs()).exp().ln_1p() };
        for word in 0u32..(1 << n) {
            let bits: Vec<u8> = (0..n).map(|i| ((word >> i) & 1) as u8).collect();
            if !code.syndrome_is_zero(&bits) {
                continue;
            }
            // log-probability up to a constant: -sum over ones of llr
            let metric: f64 = bits.iter().zip(llr).map(|(&b, &l)| if b == 1 { -l / 2.0 } else { l / 2.0 }).sum();
            for i in 0..n {
                if bits[i] == 0 {
                    p0[i] = lse(p0[i], metric);
                } else {
                    p1[i] = lse(p1[i], metric);
                }
            }
        }
        p0.iter().zip(&p1).map(|(a, b)| u8::from(b > a)).collect()
    }

    #[test]
    fn spa_agrees_with_exhaustive_map_when_converged() {
        // n = 12 code lifted from a 2x4 protograph
        let p = parse_protograph(
            "2 4 2\n1 1 1 0\n0 1 1 1\n(0,0,0)=1 (0,1,0)=1 (0,2,0)=1 (1,1,0)=2 (1,2,0)=2 (1,3,0)=2\n0 0 0 0\n",
        )
        .unwrap();
        let code = lift_protograph(&p, 3, 4, LiftOptions::default()).unwrap();
        assert_eq!(code.n(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut compared = 0;
        for _ in 0..200 {
            let sigma2 = 0.35;
            let noise = Normal::new(0.0, f64::sqrt(sigma2)).unwrap();
            // random codeword would need an encoder; stay with all-zero plus noise
            let llr: Vec<f64> = (0..code.n()).map(|_| 2.0 * (1.0 + noise.sample(&mut rng)) / sigma2).collect();
            let res = spa_decode(&code, &llr, 50).unwrap();
            if res.success {
                assert_eq!(res.hard_decision, bitwise_map(&code, &llr));
                compared += 1;
            }
            let _ = rng.random::<u8>();
        }
        assert!(compared > 150);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn decoders_are_sign_symmetric(seed: u64, which in 0usize..3) {
            let code = regular_code(7);
            let lut = CompressedLut::constant(12, 2, vec![0.0, 0.7, 1.5, 3.0], 0.6);
            let rule = match which {
                0 => CheckRule::SumProduct,
                1 => CheckRule::MinSum { factor: 0.75 },
                _ => CheckRule::IdMinSum { lut: &lut },
            };
            let opts = DecodeOptions { max_iterations: 12, early_stop: false, trace: false };
            let dec = BpDecoder::new(&code, rule, opts).unwrap();
            let llr = noisy_llrs(code.n(), 1.5, seed);
            let neg: Vec<f64> = llr.iter().map(|x| -x).collect();
            let (mut a, mut b) = (dec.workspace(), dec.workspace());
            dec.initialize(&llr, &mut a).unwrap();
            dec.initialize(&neg, &mut b).unwrap();
            for _ in 0..12 {
                dec.iterate(&mut a);
                dec.iterate(&mut b);
                for (x, y) in a.cn_to_vn.iter().zip(&b.cn_to_vn) {
                    prop_assert_eq!(*x, -*y);
                }
            }
            for (x, y) in a.hard_decision.iter().zip(&b.hard_decision) {
                prop_assert_eq!(*x, 1 - *y);
            }
        }

        #[test]
        fn success_implies_zero_syndrome(seed: u64, sigma2 in 0.3f64..1.2) {
            let code = regular_code(9);
            let llr = noisy_llrs(code.n(), sigma2, seed);
            for res in [spa_decode(&code, &llr, 30).unwrap(), msa_decode(&code, &llr, 30, 0.75).unwrap()] {
                if res.success {
                    // independent syndrome evaluation from the edge list
                    let mut parity = vec![0u8; code.m()];
                    for e in code.edges() {
                        parity[e.cn] ^= res.hard_decision[e.vn];
                    }
                    prop_assert!(parity.iter().all(|&p| p == 0));
                }
            }
        }
    }
}
