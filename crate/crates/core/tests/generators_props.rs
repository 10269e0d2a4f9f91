use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcalab_core::blockmap::{compose, equal, shift, EqualityPolicy};
use rcalab_core::ctrl::{CtrlDescriptor, CtrlLayout};
use rcalab_core::generators::{invert_word, net_shift, Generator, GeneratorMaps};
use rcalab_core::{OffsetConvention, PeriodicConfig, Perm};

fn generator() -> impl Strategy<Value = Generator> {
    prop::sample::select(Generator::ALL.to_vec())
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

proptest! {
    #[test]
    fn net_shift_is_additive(
        u in prop::collection::vec(generator(), 0..=6),
        v in prop::collection::vec(generator(), 0..=6),
    ) {
        for layout in [CtrlLayout::two_track(2).unwrap(), CtrlLayout::three_track()] {
            let uv: Vec<Generator> = u.iter().chain(&v).copied().collect();
            prop_assert_eq!(net_shift(&uv, &layout), add(&net_shift(&u, &layout), &net_shift(&v, &layout)));
            let neg: Vec<i64> = net_shift(&u, &layout).iter().map(|x| -x).collect();
            prop_assert_eq!(net_shift(&invert_word(&u), &layout), neg);
        }
    }
}

/// Undoing the net shift of a word over `σ₁^{±1}`, `f₀` leaves a map that
/// fixes the control track.
#[test]
fn net_shift_is_the_control_track_motion() {
    let layout = CtrlLayout::three_track();
    let swap = Perm::from_table(vec![0, 2, 1, 3]).unwrap();
    let f0 = CtrlDescriptor::new(swap, "011".parse().unwrap(), 0).unwrap();
    let maps = GeneratorMaps::new(&layout, &f0, OffsetConvention::Backward, 1 << 22).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let letters = [Generator::S, Generator::SInv, Generator::F0];
    for _ in 0..50 {
        let word: Vec<Generator> = (0..6).map(|_| letters[rng.gen_range(0..3)]).collect();
        let t = net_shift(&word, &layout)[layout.control_track];
        let cells: Vec<u32> = (0..12).map(|_| rng.gen_range(0..8)).collect();
        let x = PeriodicConfig::new(layout.alphabet.clone(), cells).unwrap();
        let y = layout.partial_shift(-t).apply(&maps.apply(&word, &x).unwrap());
        assert_eq!(y.track(1), x.track(1), "{word:?}");
        assert_eq!(y.track(0), x.track(0));
    }
}

#[test]
fn a_then_b_moves_two_tracks_despite_zero_declared_shift() {
    let layout = CtrlLayout::three_track();
    let f0 = CtrlDescriptor::new(Perm::from_table(vec![0, 2, 1, 3]).unwrap(), "011".parse().unwrap(), 0).unwrap();
    let maps = GeneratorMaps::new(&layout, &f0, OffsetConvention::Backward, 1 << 22).unwrap();
    let ab = maps.evaluate(&[Generator::A, Generator::B], 1 << 22).unwrap();
    let target = compose(
        &shift(&layout.alphabet, 0, -1).unwrap(),
        &shift(&layout.alphabet, 1, 1).unwrap(),
    )
    .unwrap();
    let policy = EqualityPolicy::exhaustive();
    assert!(equal(&ab, &target, &policy).unwrap().is_equal());
    assert_eq!(net_shift(&[Generator::A, Generator::B], &layout), vec![0, 0, 0]);
}
