#![allow(dead_code)]

use rand::Rng;
use rcalab_core::blockmap::{self, BlockMap, EqualityPolicy};
use rcalab_core::ctrl::{compile_product, conjugate_offset, CtrlDescriptor, CtrlLayout, Factor};
use rcalab_core::{OffsetConvention, Perm, Word};

/// Unbordered binary words of length 3.
pub const BASES: [&str; 4] = ["001", "011", "100", "110"];

pub fn random_factor<R: Rng>(rng: &mut R, base: &Word) -> Factor {
    if rng.gen_bool(0.3) {
        return Factor::Shift(rng.gen_range(-2..=2));
    }
    let width = rng.gen_range(1..=base.len() as u32);
    let perm = Perm::random(1 << width, rng);
    let control = if rng.gen_bool(0.2) { base.repeat(2) } else { base.clone() };
    Factor::Ctrl(CtrlDescriptor::new(perm, control, rng.gen_range(-2..=2)).unwrap())
}

pub fn random_product<R: Rng>(rng: &mut R, base: &Word, max_len: usize) -> Vec<Factor> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| random_factor(rng, base)).collect()
}

/// A product equal to `p`, written differently: one ctrl factor is replaced
/// by its shift-conjugated form and a cancelling pair is inserted.
pub fn rewrite<R: Rng>(rng: &mut R, p: &[Factor], base: &Word) -> Vec<Factor> {
    let mut out = Vec::new();
    let j = rng.gen_range(-2..=2);
    for f in p {
        match f {
            Factor::Ctrl(d) if out.len() % 2 == 0 => {
                let moved = conjugate_offset(d, j, OffsetConvention::Backward);
                out.extend([Factor::Shift(-j), Factor::Ctrl(moved), Factor::Shift(j)]);
            }
            other => out.push(other.clone()),
        }
    }
    let x = random_factor(rng, base);
    let at = rng.gen_range(0..=out.len());
    out.insert(at, x.inverse());
    out.insert(at, x);
    out
}

/// `p` with one factor replaced at random.
pub fn mutate<R: Rng>(rng: &mut R, p: &[Factor], base: &Word) -> Vec<Factor> {
    let mut out = p.to_vec();
    let i = rng.gen_range(0..out.len());
    out[i] = random_factor(rng, base);
    out
}

/// Exhaustive-table verdict on compiled products, or `None` over budget.
pub fn exhaustive_equal(lhs: &[Factor], rhs: &[Factor], budget: u64) -> Option<bool> {
    let layout = CtrlLayout::two_track(2).unwrap();
    let conv = OffsetConvention::Backward;
    let a: BlockMap = compile_product(lhs, &layout, conv, budget).ok()?;
    let b: BlockMap = compile_product(rhs, &layout, conv, budget).ok()?;
    let policy = EqualityPolicy::exhaustive().with_budget(budget);
    blockmap::equal(&a, &b, &policy).ok().map(|v| v.is_equal())
}
