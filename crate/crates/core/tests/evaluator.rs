mod common;

use common::{exhaustive_equal, mutate, random_product, rewrite, BASES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcalab_core::blockmap::BlockMap;
use rcalab_core::ctrl::{CtrlDescriptor, CtrlLayout, Evaluator, Factor};
use rcalab_core::{OffsetConvention, PeriodicConfig, Perm, Word};

const BUDGET: u64 = 1 << 22;

fn evaluator(base: &Word) -> Evaluator {
    Evaluator::new(base.clone(), 2, OffsetConvention::Backward).unwrap()
}

#[test]
fn agrees_with_exhaustive_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut compared, mut equal) = (0, 0);
    while compared < 40 {
        let base: Word = BASES[rng.gen_range(0..BASES.len())].parse().unwrap();
        let p = random_product(&mut rng, &base, 3);
        let q = if rng.gen_bool(0.6) {
            rewrite(&mut rng, &p, &base)
        } else {
            mutate(&mut rng, &p, &base)
        };
        let Some(truth) = exhaustive_equal(&p, &q, BUDGET) else {
            continue;
        };
        let symbolic = evaluator(&base).compare(&p, &q).unwrap().is_equal();
        assert_eq!(symbolic, truth, "{p:?} vs {q:?}");
        compared += 1;
        equal += usize::from(truth);
    }
    assert!(equal >= 8, "too few equal instances: {equal}");
}

#[test]
fn chained_windows_against_exhaustive() {
    // width-3 windows at starts 0 and 2 link neighbouring occurrences of 011
    let w: Word = "011".parse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ev = evaluator(&w);
    for _ in 0..3 {
        let a = CtrlDescriptor::new(Perm::random(8, &mut rng), w.clone(), 0).unwrap();
        let b = CtrlDescriptor::new(Perm::random(8, &mut rng), w.clone(), -2).unwrap();
        let ab = [Factor::Ctrl(a.clone()), Factor::Ctrl(b.clone())];
        let ba = [Factor::Ctrl(b), Factor::Ctrl(a)];
        let truth = exhaustive_equal(&ab, &ba, BUDGET).expect("fits budget");
        assert_eq!(ev.compare(&ab, &ba).unwrap().is_equal(), truth);
        let moved = rewrite(&mut rng, &ab, &w);
        assert!(ev.compare(&ab, &moved).unwrap().is_equal());
    }
}

#[test]
fn normal_form_of_same_window_product() {
    let w: Word = "0111".parse().unwrap();
    let ev = evaluator(&w);
    let p1 = Perm::from_cycles(16, &[&[1, 2, 3]]).unwrap();
    let p2 = Perm::from_cycles(16, &[&[3, 4]]).unwrap();
    let d1 = CtrlDescriptor::new(p1.clone(), w.clone(), 0).unwrap();
    let d2 = CtrlDescriptor::new(p2.clone(), w.clone(), 0).unwrap();
    let both = CtrlDescriptor::new(p1.then(&p2), w.clone(), 0).unwrap();
    let v = ev
        .compare(&[Factor::Ctrl(d1), Factor::Ctrl(d2)], &[Factor::Ctrl(both)])
        .unwrap();
    assert!(v.is_equal(), "{v:?}");
}

#[test]
fn products_and_their_inverses_cancel() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let base: Word = BASES[rng.gen_range(0..BASES.len())].parse().unwrap();
        let p = random_product(&mut rng, &base, 4);
        let mut both = p.clone();
        both.extend(rcalab_core::ctrl::invert_product(&p));
        assert!(evaluator(&base).compare(&both, &[]).unwrap().is_equal());
    }
}

fn apply_all(maps: &[(Option<BlockMap>, i64)], layout: &CtrlLayout, x: &PeriodicConfig) -> PeriodicConfig {
    let mut y = x.clone();
    for (m, t) in maps {
        y = match m {
            Some(m) => m.apply(&y),
            None => layout.partial_shift(*t).apply(&y),
        };
    }
    y
}

fn compiled(p: &[Factor], layout: &CtrlLayout) -> Vec<(Option<BlockMap>, i64)> {
    p.iter()
        .map(|f| match f {
            Factor::Shift(t) => (None, *t),
            Factor::Ctrl(d) => (Some(d.compile(layout, OffsetConvention::Backward, BUDGET).unwrap()), 0),
        })
        .collect()
}

/// Control tracks built from copies of the base word and short random
/// gaps, so that occurrences chain and crowd.
fn structured_point<R: Rng>(rng: &mut R, base: &Word, layout: &CtrlLayout) -> PeriodicConfig {
    let mut control = Vec::new();
    while control.len() < 6 || rng.gen_bool(0.6) {
        if rng.gen_bool(0.6) {
            control.extend(base.symbols().iter().map(|&s| s as usize));
        } else {
            for _ in 0..rng.gen_range(1..=3) {
                control.push(rng.gen_range(0..2));
            }
        }
        if control.len() > 30 {
            break;
        }
    }
    let target = (0..control.len()).map(|_| rng.gen_range(0..2)).collect();
    PeriodicConfig::from_tracks(layout.alphabet.clone(), &[control, target]).unwrap()
}

/// Every Equal verdict survives replay on structured periodic points, and
/// every Differ verdict is confirmed by one of them or by full tables.
#[test]
fn verdicts_survive_periodic_replay() {
    let layout = CtrlLayout::two_track(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut equal, mut differ) = (0, 0);
    for _ in 0..300 {
        let base: Word = BASES[rng.gen_range(0..BASES.len())].parse().unwrap();
        let p = random_product(&mut rng, &base, 4);
        let q = match rng.gen_range(0..3) {
            0 => rewrite(&mut rng, &p, &base),
            1 => mutate(&mut rng, &p, &base),
            _ => Vec::new(),
        };
        let verdict = evaluator(&base).compare(&p, &q).unwrap();
        let (mp, mq) = (compiled(&p, &layout), compiled(&q, &layout));
        let mut witnessed = false;
        for _ in 0..200 {
            let x = structured_point(&mut rng, &base, &layout);
            if apply_all(&mp, &layout, &x) != apply_all(&mq, &layout, &x) {
                witnessed = true;
                break;
            }
        }
        if verdict.is_equal() {
            assert!(!witnessed, "Equal verdict refuted: {p:?} vs {q:?}");
            equal += 1;
        } else {
            if !witnessed {
                assert_eq!(exhaustive_equal(&p, &q, BUDGET), Some(false), "{p:?} vs {q:?}: {verdict:?}");
            }
            differ += 1;
        }
    }
    assert!(equal >= 60 && differ >= 60, "{equal} equal, {differ} differ");
}

#[test]
fn ww_windows_are_never_dropped() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for base in BASES {
        let w: Word = base.parse().unwrap();
        let ev = evaluator(&w);
        for offset in -3..=3 {
            for width in 1..=3 {
                let mut p = Perm::random(1 << width, &mut rng);
                while p.is_identity() {
                    p = Perm::random(1 << width, &mut rng);
                }
                let d = CtrlDescriptor::new(p, w.repeat(2), offset).unwrap();
                let v = ev.compare(&[Factor::Ctrl(d)], &[]).unwrap();
                assert!(!v.is_equal(), "{base} offset {offset}");
            }
        }
    }
}
