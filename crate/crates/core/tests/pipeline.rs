//! Protograph to lifted code to LUT file to decoder, end to end.

use std::path::PathBuf;

use metldpc::analysis::pexit_run;
use metldpc::channel::{frame_rng, transmit_all_zero, ChannelParams};
use metldpc::code::{lift_protograph, parse_protograph, LiftOptions, Protograph};
use metldpc::decoder::{BpDecoder, CheckRule, DecodeOptions};
use metldpc::lut::{build_raw_lut, compress_lut, read_lut, write_lut, GridPolicy, NormalizationMode};

fn desk_protograph() -> Protograph {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../protographs/met_r0p02_desk.proto");
    parse_protograph(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn lut_file_round_trip_decodes_identically() {
    let proto = desk_protograph();
    assert!((proto.design_rate() - 0.02).abs() < 1e-12);
    let code = lift_protograph(&proto, 20, 3, LiftOptions { girth_retries: 20 }).unwrap();
    let ch = ChannelParams::from_esn0_db(-15.0).unwrap();
    let schedule = pexit_run(&proto, &ch, 30).unwrap();
    let raw = build_raw_lut(&proto, &schedule, 30, 32, GridPolicy::MessageQuantile, NormalizationMode::Normalized)
        .unwrap();
    let (lut, report) = compress_lut(&raw, 24, 9).unwrap();
    assert_eq!(report.entry_count, 24 * 32);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("desk.lut");
    write_lut(&lut, std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_lut(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, lut);

    let opts = DecodeOptions::new(30);
    let a = BpDecoder::new(&code, CheckRule::IdMinSum { lut: &lut }, opts).unwrap();
    let b = BpDecoder::new(&code, CheckRule::IdMinSum { lut: &back }, opts).unwrap();
    let (mut wa, mut wb) = (a.workspace(), b.workspace());
    // output messages per iteration on checks that consult the table
    let per_iteration: u64 =
        (0..code.m()).map(|c| code.cn_degree(c)).filter(|&d| d >= 3).map(|d| d as u64).sum();
    for k in 0..10 {
        let llr = transmit_all_zero(&code, &ch, &mut frame_rng(17, k));
        let (ra, rb) = (a.decode(&llr, &mut wa).unwrap(), b.decode(&llr, &mut wb).unwrap());
        assert_eq!(ra, rb);
        assert_eq!(ra.lookup_count, per_iteration * ra.iterations_used as u64);
        if ra.success {
            assert!(code.syndrome_is_zero(&ra.hard_decision));
        }
    }
}

#[test]
fn decoders_agree_at_high_snr() {
    let proto = desk_protograph();
    let code = lift_protograph(&proto, 20, 3, LiftOptions::default()).unwrap();
    let ch = ChannelParams::from_esn0_db(-5.0).unwrap();
    let lut = metldpc::lut::CompressedLut::constant(50, code.num_edge_types(), vec![1.0], 1.0);
    for rule in [CheckRule::SumProduct, CheckRule::MinSum { factor: 0.75 }, CheckRule::IdMinSum { lut: &lut }] {
        let dec = BpDecoder::new(&code, rule, DecodeOptions::new(50)).unwrap();
        let mut ws = dec.workspace();
        for k in 0..5 {
            let llr = transmit_all_zero(&code, &ch, &mut frame_rng(2, k));
            let r = dec.decode(&llr, &mut ws).unwrap();
            assert!(r.success, "{} frame {k}", rule.label());
            assert!(r.hard_decision.iter().all(|&b| b == 0));
        }
    }
}
