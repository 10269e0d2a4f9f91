use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcalab_core::blockmap::{equal, EqualityPolicy};
use rcalab_core::ctrl::{CtrlDescriptor, CtrlLayout};
use rcalab_core::generators::{GenWordCert, GeneratorMaps};
use rcalab_core::groups::{CertParams, Certifier};
use rcalab_core::io::{from_json, to_json};
use rcalab_core::{OffsetConvention, PeriodicConfig, Perm, Word};

fn involution() -> Perm {
    Perm::from_table(vec![1, 0, 2, 4, 3, 7, 6, 5]).unwrap()
}

fn certifier(w: &str, f: Perm) -> Certifier {
    Certifier::new(CertParams {
        w: w.parse().unwrap(),
        f,
        q: 2,
        convention: OffsetConvention::Backward,
        family: None,
        seed: 3,
    })
    .unwrap()
}

#[test]
fn random_window_targets_at_five_bits() {
    let c = certifier("00011", involution());
    let group = c.factorizer().unwrap().bsgs().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w: Word = "00011".parse().unwrap();
    for offset in [-1, 0, 2] {
        let pi = group.random_element(&mut rng);
        let target = CtrlDescriptor::new(pi, w.clone(), offset).unwrap();
        let cert = c.certify(&target).unwrap();
        assert!(cert.verified, "{:?}", cert.stages);
        assert!(cert.replay(c.evaluator()).unwrap().is_equal());
        let layout = CtrlLayout::two_track(2).unwrap();
        assert_eq!(cert.net_shift(&layout), vec![0, 0]);
    }
}

#[test]
fn certificate_files_round_trip() {
    let c = certifier("0001", involution());
    let target = c.f0().with_offset(1);
    let cert = c.certify(&target).unwrap();
    let text = to_json(&cert).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["word"], serde_json::json!(["s", "f", "s-1"]));
    assert_eq!(v["verified"], true);
    let back: GenWordCert = from_json(&text).unwrap();
    assert_eq!(back, cert);
}

/// Certificates replayed through compiled block maps agree with the
/// evaluator's verdict.
#[test]
fn certificate_replays_through_block_maps() {
    let swap = Perm::from_table(vec![0, 2, 1, 3]).unwrap();
    let c = certifier("011", swap.clone());
    let layout = CtrlLayout::two_track(2).unwrap();
    let conv = OffsetConvention::Backward;
    let maps = GeneratorMaps::new(&layout, c.f0(), conv, 1 << 22).unwrap();
    let policy = EqualityPolicy::exhaustive().with_budget(1 << 22);

    // small enough for a full product table
    let target = c.f0().with_offset(-1);
    let cert = c.certify(&target).unwrap();
    assert!(cert.verified);
    let lhs = maps.evaluate(&cert.word, 1 << 22).unwrap();
    let rhs = target.compile(&layout, conv, 1 << 22).unwrap();
    assert!(equal(&lhs, &rhs, &policy).unwrap().is_equal());

    // longer words: cell-by-cell replay on periodic points
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let two = swap.placed(0, 3).unwrap().then(&swap.placed(1, 3).unwrap());
    let rotate = Perm::from_table((0..8u32).map(|x| ((x << 1) | (x >> 2)) & 7).collect()).unwrap();
    for (perm, offset) in [(two, 0), (rotate, -1)] {
        let target = CtrlDescriptor::new(perm, "011".parse().unwrap(), offset).unwrap();
        let cert = c.certify(&target).unwrap();
        assert!(cert.verified);
        let t = target.compile(&layout, conv, 1 << 22).unwrap();
        for p in 1..=12 {
            for _ in 0..20 {
                let cells = (0..p).map(|_| rng.gen_range(0..4)).collect();
                let x = PeriodicConfig::new(layout.alphabet.clone(), cells).unwrap();
                assert_eq!(maps.apply(&cert.word, &x).unwrap(), t.apply(&x));
            }
        }
    }
}
