//! `σ₀⁻¹ × σ₁` written as a product of two involutions.
//!
//! `a` swaps the first two tracks; `b` sends `(x, y)` on those tracks to
//! `(σ⁻¹(y), σ(x))`. Every remaining track is fixed by both.

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::blockmap::{self, compose, equal, BlockMap, EqualityPolicy, Verdict};
use crate::error::{Error, Result};

/// Which composition order produced `σ₀⁻¹ × σ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionOrder {
    /// `a ∘ b`: `b` applied first.
    AAfterB,
    /// `b ∘ a`: `a` applied first.
    BAfterA,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoInvolutionReport {
    pub a_squared: Verdict,
    pub b_squared: Verdict,
    pub a_after_b: Verdict,
    pub b_after_a: Verdict,
    /// The order in which the product equals `σ₀⁻¹ × σ₁`, if either does.
    pub order: Option<CompositionOrder>,
}

impl TwoInvolutionReport {
    pub fn holds(&self) -> bool {
        self.a_squared.is_equal() && self.b_squared.is_equal() && self.order.is_some()
    }
}

/// The involutions `a`, `b` on `alphabet`, with the exhaustive checks of
/// `a² = b² = id` and of both composition orders against `σ₀⁻¹ × σ₁`.
pub fn two_involution_shift_decomposition(
    alphabet: &Alphabet,
    policy: &EqualityPolicy,
) -> Result<(BlockMap, BlockMap, TwoInvolutionReport)> {
    let tracks = alphabet.tracks();
    if tracks.len() < 2 || tracks[0] != 2 || tracks[1] != 2 {
        return Err(Error::Precondition(format!(
            "first two tracks must be binary, alphabet is {tracks:?}"
        )));
    }
    let al = alphabet.clone();
    let a = BlockMap::from_local(alphabet.clone(), 0, 0, policy.budget, |w| {
        let s = w[0];
        let x = al.component(s, 0);
        let y = al.component(s, 1);
        al.with_component(al.with_component(s, 0, y), 1, x)
    })?;
    let b = BlockMap::from_local(alphabet.clone(), 1, 1, policy.budget, |w| {
        // w = [cell i-1, cell i, cell i+1]
        let x_next = al.component(w[2], 0);
        let y_prev = al.component(w[0], 1);
        al.with_component(al.with_component(w[1], 0, y_prev), 1, x_next)
    })?;

    let id = BlockMap::identity(alphabet.clone());
    let target = compose(
        &blockmap::shift(alphabet, 0, -1)?,
        &blockmap::shift(alphabet, 1, 1)?,
    )?;
    let a_squared = equal(&compose(&a, &a)?, &id, policy)?;
    let b_squared = equal(&compose(&b, &b)?, &id, policy)?;
    let a_after_b = equal(&compose(&a, &b)?, &target, policy)?;
    let b_after_a = equal(&compose(&b, &a)?, &target, policy)?;
    let order = if a_after_b.is_equal() {
        Some(CompositionOrder::AAfterB)
    } else if b_after_a.is_equal() {
        Some(CompositionOrder::BAfterA)
    } else {
        None
    };
    let report = TwoInvolutionReport {
        a_squared,
        b_squared,
        a_after_b,
        b_after_a,
        order,
    };
    Ok((a, b, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_track_decomposition() {
        let (a, b, r) =
            two_involution_shift_decomposition(&Alphabet::three_track(), &EqualityPolicy::exhaustive())
                .unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.order, Some(CompositionOrder::BAfterA));
        assert!(!r.a_after_b.is_equal());
        assert_eq!((a.memory(), a.anticipation()), (0, 0));
        assert_eq!((b.memory(), b.anticipation()), (1, 1));
    }

    #[test]
    fn c_track_untouched() {
        let al = Alphabet::three_track();
        let (_, b, _) = two_involution_shift_decomposition(&al, &EqualityPolicy::exhaustive()).unwrap();
        for s in 0..8u32 {
            let out = b.local(&[s, s, s]);
            assert_eq!(al.component(out, 2), al.component(s, 2));
        }
    }

    #[test]
    fn rejects_non_binary_tracks() {
        let al = Alphabet::new(vec![3, 2, 2]).unwrap();
        assert!(matches!(
            two_involution_shift_decomposition(&al, &EqualityPolicy::exhaustive()),
            Err(Error::Precondition(_))
        ));
    }
}
