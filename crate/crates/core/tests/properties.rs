use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use por_core::algebra::{FieldVector, PrimeField};
use por_core::analysis::{estimate_sufficient, exact_sufficient, threshold};
use por_core::audit::{audit_decision, pvalue_with_replacement, AuditSample, Decision, Sampling};
use por_core::coding::{rs_code, DEFAULT_CODEWORD_CAP};
use por_core::extractor::{extract, succ_exact, CorruptingProver, HonestProver, WrongValue};
use por_core::keyed::{sw_keygen, sw_possible_keys, sw_respond, sw_succ_avg, sw_tag, sw_verify, SwHonestProver};
use por_core::schemes::{Challenge, Scheme, SchemeKind};
use por_core::service::protocol::{
    decode_challenge, decode_response, encode_challenge, encode_response, read_frame, Frame, FrameType,
};
use por_core::service::precompute_pairs;

fn scheme_strategy() -> impl Strategy<Value = Scheme> {
    let shapes = prop_oneof![
        Just((SchemeKind::Basic, None)),
        Just((SchemeKind::Multiblock, Some(1))),
        Just((SchemeKind::Multiblock, Some(2))),
        Just((SchemeKind::LcV1, None)),
        Just((SchemeKind::LcV2, Some(2))),
    ];
    let codes = prop_oneof![Just((5u64, 4usize, 2usize)), Just((5, 5, 2)), Just((7, 5, 3)), Just((3, 3, 1))];
    (shapes, codes).prop_filter_map("l <= n", |((kind, ell), (q, n, k))| {
        let code = rs_code(PrimeField::new(q).ok()?, n, k).ok()?;
        Scheme::new(kind, code, ell).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn codewords_decode_to_their_message(s in scheme_strategy(), seed in any::<u64>()) {
        let code = s.code();
        let idx = seed as u128 % code.message_count().unwrap();
        let msg = code.message_at(idx);
        let m = code.encode(&msg).unwrap();
        prop_assert_eq!(code.decode_unencode(m.blocks()).unwrap(), msg);
    }

    #[test]
    fn corruption_within_the_threshold_is_extracted(
        s in scheme_strategy(),
        seed in any::<u64>(),
        picks in proptest::collection::vec(any::<u64>(), 0..40),
    ) {
        let code = s.code();
        let m = code.encode(&code.message_at(seed as u128 % code.message_count().unwrap())).unwrap();
        let gamma = s.challenge_count().unwrap();
        let thr = threshold(&s, DEFAULT_CODEWORD_CAP).unwrap().threshold;
        let mut set = BTreeSet::new();
        for p in picks {
            let mut next = set.clone();
            next.insert(p as u128 % gamma);
            let succ = BigRational::new(BigInt::from(gamma - next.len() as u128), BigInt::from(gamma));
            if succ <= thr {
                break;
            }
            set = next;
        }
        let mut p = CorruptingProver::new(HonestProver::new(&s, &m), &s, set, WrongValue::Random { seed }).unwrap();
        let succ = succ_exact(&mut p, &s, &m).unwrap();
        prop_assert!(succ > thr);
        let r = extract(&mut p, &s).unwrap();
        prop_assert_eq!(r.codeword, m);
        prop_assert!(!r.tie);
    }

    #[test]
    fn challenges_and_responses_survive_the_wire(s in scheme_strategy(), seed in any::<u64>()) {
        let gamma = s.challenge_count().unwrap();
        let c = s.challenge_at(seed as u128 % gamma).unwrap();
        let payload = encode_challenge(&s, &c).unwrap();
        prop_assert_eq!(&decode_challenge(&s, &payload).unwrap(), &c);
        let m = s.code().encode(&s.code().message_at(seed as u128 % s.code().message_count().unwrap())).unwrap();
        let r = s.respond(&m, &c).unwrap();
        prop_assert_eq!(decode_response(&s, &encode_response(&r)).unwrap(), r);
    }

    #[test]
    fn frames_round_trip(kind in 1u8..=4, payload in proptest::collection::vec(any::<u8>(), 0..256)) {
        let f = Frame::new(FrameType::from_byte(kind).unwrap(), payload);
        let bytes = f.to_bytes();
        prop_assert_eq!(&Frame::from_bytes(&bytes).unwrap(), &f);
        prop_assert_eq!(read_frame(&mut bytes.as_slice()).unwrap().unwrap(), f);
    }

    #[test]
    fn truncated_frames_are_rejected(payload in proptest::collection::vec(any::<u8>(), 1..64), cut in 1usize..64) {
        let bytes = Frame::new(FrameType::Response, payload).to_bytes();
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(read_frame(&mut &bytes[..cut]).is_err());
    }

    #[test]
    fn pair_store_cursor_only_advances(
        takes in proptest::collection::vec(0usize..12, 1..10),
        seed in any::<u64>(),
    ) {
        let s = Scheme::new(SchemeKind::Basic, rs_code(PrimeField::new(5).unwrap(), 4, 2).unwrap(), None).unwrap();
        let m = s.code().encode(&s.code().message_at(7)).unwrap();
        let mut store = precompute_pairs(&s, &m, 30, seed).unwrap();
        let mut used = 0;
        for t in takes {
            let before = store.cursor();
            match store.take(t) {
                Ok(records) => {
                    prop_assert_eq!(records.len(), t);
                    prop_assert_eq!(&records[..], &store.records()[before..before + t]);
                    used += t;
                }
                Err(_) => prop_assert!(t > store.remaining()),
            }
            prop_assert!(store.cursor() >= before);
            prop_assert_eq!(store.cursor(), used);
        }
    }

    #[test]
    fn estimate_implies_exact(
        ell in 1u64..300,
        d in 1u64..3000,
        n_extra in 0u64..100_000,
        milli in 501i64..1000,
    ) {
        let n = ell.max(d) + n_extra;
        let s = milli as f64 / 1000.0;
        if estimate_sufficient(ell, d, n, s).unwrap() {
            let succ = BigRational::new(BigInt::from(milli), BigInt::from(1000));
            prop_assert!(exact_sufficient(ell, d, n, &succ).unwrap());
        }
    }

    #[test]
    fn pvalue_falls_as_correct_answers_rise(t in 1u64..400, p0 in 0.05f64..0.95) {
        let mut last = 1.0f64;
        for g in 0..=t {
            let p = pvalue_with_replacement(p0, t, g).unwrap();
            prop_assert!(p <= last + 1e-12);
            last = p;
        }
    }

    #[test]
    fn pvalue_and_confidence_rules_agree(t in 1u64..300, g_frac in 0.0f64..=1.0, omega in 1u128..=100) {
        let g = (t as f64 * g_frac).round() as u64;
        let sample = AuditSample { t, g, sampling: Sampling::WithReplacement, gamma: 100, omega };
        let r = audit_decision(&sample, 0.05).unwrap();
        if r.decision == Decision::RejectH0 {
            prop_assert!(r.p_value < 0.05);
        }
        prop_assert!(r.rules_agree() || (r.p_value - 0.05).abs() < 1e-6);
    }

    #[test]
    fn honest_keyed_responses_pass_every_possible_key(seed in any::<u64>(), v in proptest::collection::vec(0u64..7, 3)) {
        let f = PrimeField::new(7).unwrap();
        let code = rs_code(f, 3, 2).unwrap();
        let m = code.encode(&code.message_at(seed as u128 % 49)).unwrap();
        let key = sw_keygen(f, 3, seed);
        let tag = sw_tag(&key, m.blocks()).unwrap();
        let v = FieldVector::from_values(f, v);
        let r = sw_respond(m.blocks(), &tag, &v).unwrap();
        let keys = sw_possible_keys(m.blocks(), &tag).unwrap();
        prop_assert!(keys.contains(&key));
        for k in &keys {
            prop_assert!(sw_verify(k, &v, &r).unwrap());
        }
    }
}

#[test]
fn honest_keyed_prover_has_full_average_success() {
    let f = PrimeField::new(5).unwrap();
    let s = Scheme::new(SchemeKind::ShachamWaters, rs_code(f, 4, 2).unwrap(), Some(2)).unwrap();
    let m = s.code().encode(&s.code().message_at(11)).unwrap();
    let tag = sw_tag(&sw_keygen(f, 4, 1), m.blocks()).unwrap();
    let mut p = SwHonestProver::new(&m, &tag);
    assert!(sw_succ_avg(&mut p, &s, &m, &tag, u128::MAX).unwrap().is_one());
    assert!(matches!(s.challenge_at(0).unwrap(), Challenge::Vector(_)));
}
