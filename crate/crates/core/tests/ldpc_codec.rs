use std::path::PathBuf;
use std::time::Instant;

use mlc_core::channel::stream_rng;
use mlc_core::ldpc::construct::{has_four_cycle, ira};
use mlc_core::ldpc::{parse_alist, write_alist, BpDecoder, CheckRule, DecoderConfig, LdpcCode};
use proptest::prelude::*;
use rand::Rng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../codes")
        .join(name)
}

fn half_rate() -> LdpcCode {
    LdpcCode::load_alist(fixture("r12_n1008.alist")).unwrap()
}

fn random_bits(len: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..len).map(|_| rng.random::<bool>() as u8).collect()
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

#[test]
fn fixtures_have_declared_shape() {
    for (name, k, row_weights) in [
        ("r12_n1008.alist", 504, 6..=6),
        ("r14_n1008.alist", 252, 4..=4),
        ("r18_n1008.alist", 126, 3..=4),
        ("r116_n1008.alist", 63, 3..=4),
    ] {
        let code = LdpcCode::load_alist(fixture(name)).unwrap();
        assert_eq!(code.n(), 1008, "{name}");
        assert_eq!(code.k(), k, "{name}");
        assert!(code.cols().iter().all(|c| c.len() == 3), "{name}");
        assert!(code.rows().iter().all(|r| row_weights.contains(&r.len())), "{name}");
        assert!(!has_four_cycle(&code), "{name}");
    }
}

#[test]
fn fixture_round_trips_through_alist_text() {
    let path = fixture("r12_n1008.alist");
    let text = std::fs::read_to_string(&path).unwrap();
    let code = parse_alist(&text).unwrap();
    assert_eq!(write_alist(&code), text);
}

#[test]
fn column_count_mismatch_is_rejected() {
    let text = std::fs::read_to_string(fixture("r12_n1008.alist")).unwrap();
    let broken = text.replacen("1008 504", "1009 504", 1);
    assert!(parse_alist(&broken).is_err());
    assert!(LdpcCode::load_alist(fixture("missing.alist")).is_err());
}

#[test]
fn thousand_random_words_have_zero_syndrome() {
    let code = half_rate();
    let mut rng = stream_rng(42, 0);
    for _ in 0..1000 {
        let info = random_bits(code.k(), &mut rng);
        let word = code.encode(&info).unwrap();
        assert_eq!(code.syndrome_weight(&word), 0);
        assert_eq!(code.extract_info(&word), info);
    }
}

#[test]
fn encoder_is_linear() {
    let code = half_rate();
    let zero = vec![0u8; code.k()];
    assert!(code.encode(&zero).unwrap().iter().all(|&b| b == 0));
    let mut rng = stream_rng(43, 0);
    let info = random_bits(code.k(), &mut rng);
    let base = code.encode(&info).unwrap();
    for i in [0, 1, 250, code.k() - 1] {
        let mut unit = zero.clone();
        unit[i] = 1;
        let row = code.encode(&unit).unwrap();
        let mut flipped = info.clone();
        flipped[i] ^= 1;
        assert_eq!(xor(&code.encode(&flipped).unwrap(), &base), row);
    }
    assert!(code.encode(&info[1..]).is_err());
}

fn bpsk_llrs(word: &[u8], mag: f64) -> Vec<f64> {
    word.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
}

#[test]
fn noiseless_frame_decodes_in_one_iteration() {
    let code = half_rate();
    let mut rng = stream_rng(44, 0);
    let word = code.encode(&random_bits(code.k(), &mut rng)).unwrap();
    let mut dec = BpDecoder::new(DecoderConfig::default()).unwrap();
    let r = dec.decode(&code, &bpsk_llrs(&word, 30.0)).unwrap();
    assert!(r.converged);
    assert_eq!(r.iterations, 1);
    assert_eq!(r.bits, word);
}

#[test]
fn every_single_flip_is_corrected() {
    let code = half_rate();
    let mut rng = stream_rng(45, 0);
    let word = code.encode(&random_bits(code.k(), &mut rng)).unwrap();
    for rule in [CheckRule::SumProduct, CheckRule::MinSum { scale: 0.75 }] {
        let mut dec = BpDecoder::new(DecoderConfig { max_iters: 50, rule }).unwrap();
        let clean = bpsk_llrs(&word, 2.0);
        for i in 0..code.n() {
            let mut llrs = clean.clone();
            llrs[i] = -llrs[i];
            let r = dec.decode(&code, &llrs).unwrap();
            assert!(r.converged, "{rule:?} flip {i}");
            assert_eq!(r.bits, word, "{rule:?} flip {i}");
        }
    }
}

#[test]
fn zero_llrs_do_not_converge() {
    let code = half_rate();
    let mut dec = BpDecoder::new(DecoderConfig {
        max_iters: 10,
        ..DecoderConfig::default()
    })
    .unwrap();
    let r = dec.decode(&code, &vec![0.0; code.n()]).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 10);
}

#[test]
fn decoder_rejects_bad_input() {
    let code = half_rate();
    let mut dec = BpDecoder::new(DecoderConfig::default()).unwrap();
    let mut llrs = vec![1.0; code.n()];
    llrs[7] = f64::NAN;
    assert!(dec.decode(&code, &llrs).is_err());
    assert!(dec.decode(&code, &llrs[1..]).is_err());
    assert!(BpDecoder::new(DecoderConfig {
        max_iters: 0,
        ..DecoderConfig::default()
    })
    .is_err());
}

#[test]
fn long_code_loads_quickly_and_encodes() {
    let code = ira(64800, 32400, 3, 9).unwrap();
    let text = write_alist(&code);
    let start = Instant::now();
    let loaded = parse_alist(&text).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "{elapsed:?}");
    assert_eq!((loaded.n(), loaded.k()), (64800, 32400));
    assert!(loaded.encoder().is_staircase());
    let mut rng = stream_rng(46, 0);
    for _ in 0..3 {
        let info = random_bits(loaded.k(), &mut rng);
        let word = loaded.encode(&info).unwrap();
        assert_eq!(loaded.syndrome_weight(&word), 0);
        assert_eq!(loaded.extract_info(&word), info);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converged_iff_zero_syndrome(seed in 0u64..10_000, sigma in 0.3f64..1.5) {
        let code = half_rate();
        let mut rng = stream_rng(seed, 1);
        let word = code.encode(&random_bits(code.k(), &mut rng)).unwrap();
        let llrs: Vec<f64> = word
            .iter()
            .map(|&b| {
                let x = if b == 0 { 1.0 } else { -1.0 };
                let y = x + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                2.0 * y / (sigma * sigma)
            })
            .collect();
        let mut dec = BpDecoder::new(DecoderConfig { max_iters: 20, ..DecoderConfig::default() }).unwrap();
        let r = dec.decode(&code, &llrs).unwrap();
        prop_assert_eq!(r.converged, code.is_codeword(&r.bits));
        prop_assert!(r.iterations >= 1 && r.iterations <= 20);
    }
}
