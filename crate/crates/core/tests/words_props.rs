use proptest::prelude::*;
use rcalab_core::words::{
    check_mutually_unbordered, enumerate_unbordered, formula_family, is_unbordered, Word,
};

#[test]
fn formula_families_are_mutually_unbordered() {
    for ell in 1..=14usize {
        for k in 0..ell as u32 {
            match formula_family(ell, k) {
                Ok(f) => {
                    assert!(2 * k as usize + 4 < ell);
                    assert_eq!(f.len(), 1 << k);
                    assert!(check_mutually_unbordered(f.words()).is_ok());
                    assert!(f.words().iter().all(is_unbordered));
                }
                Err(_) => assert!(2 * k as usize + 4 >= ell, "ℓ={ell}, k={k} rejected"),
            }
        }
    }
}

#[test]
fn small_enumerations() {
    let show = |ws: Vec<Word>| ws.iter().map(Word::to_string).collect::<Vec<_>>();
    assert_eq!(show(enumerate_unbordered(1, 2, 64).unwrap()), ["0", "1"]);
    assert_eq!(show(enumerate_unbordered(2, 2, 64).unwrap()), ["01", "10"]);
    assert_eq!(show(enumerate_unbordered(3, 2, 64).unwrap()), ["001", "011", "100", "110"]);
    assert!(enumerate_unbordered(30, 2, 1 << 20).is_err());
}

/// Occurrences of an unbordered word never sit closer than its length.
#[test]
fn occurrences_are_spread_out() {
    for ell in 1..=5usize {
        for w in enumerate_unbordered(ell, 2, 64).unwrap() {
            for len in ell..=3 * ell {
                for bits in 0u32..1 << len {
                    let text: Vec<u8> = (0..len).rev().map(|i| ((bits >> i) & 1) as u8).collect();
                    let occ = w.occurrences_in(&text);
                    assert!(occ.windows(2).all(|p| p[1] - p[0] >= ell), "{w} in {text:?}");
                }
            }
        }
    }
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..2, 1..=max_len).prop_map(|s| Word::new(s).unwrap())
}

proptest! {
    #[test]
    fn unbordered_iff_no_prefix_is_a_suffix(w in word(10)) {
        let s = w.symbols();
        let naive = (1..s.len()).all(|b| s[..b] != s[s.len() - b..]);
        prop_assert_eq!(is_unbordered(&w), naive);
    }

    #[test]
    fn families_contain_only_unbordered_words(ws in prop::collection::vec(word(6), 1..5)) {
        if check_mutually_unbordered(&ws).is_ok() {
            prop_assert!(ws.iter().all(is_unbordered));
        }
    }

    #[test]
    fn word_strings_round_trip(w in word(12)) {
        let back: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }
}
