//! Unbordered words and mutually unbordered families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonempty word over a single-track alphabet `{0, …, q-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::ParameterOutOfRange("empty word".into()));
        }
        Ok(Word(symbols))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `self` repeated `times` times.
    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times.max(1)))
    }

    /// Interprets a binary word as an integer, leftmost symbol most significant.
    pub fn to_bits(&self) -> u32 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u32)
    }

    pub fn from_bits(value: u32, len: usize) -> Word {
        Word((0..len).rev().map(|i| ((value >> i) & 1) as u8).collect())
    }

    /// Positions at which `self` occurs in `text`.
    pub fn occurrences_in(&self, text: &[u8]) -> Vec<usize> {
        if text.len() < self.len() {
            return Vec::new();
        }
        (0..=text.len() - self.len())
            .filter(|&p| text[p..p + self.len()] == self.0[..])
            .collect()
    }

    /// Lengths of all borders (nonempty proper prefixes equal to suffixes).
    pub fn borders(&self) -> Vec<usize> {
        let n = self.len();
        (1..n).filter(|&b| self.0[..b] == self.0[n - b..]).collect()
    }

    /// Smallest distance at which two occurrences of `self` can sit.
    pub fn min_occurrence_distance(&self) -> usize {
        self.borders()
            .iter()
            .map(|b| self.len() - b)
            .min()
            .unwrap_or(self.len())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            if s < 10 {
                write!(f, "{s}")?;
            } else {
                write!(f, "[{s}]")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .enumerate()
            .map(|(i, c)| {
                c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse {
                    location: format!("word[{i}]"),
                    message: format!("not a digit: {c:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> Self {
        w.to_string()
    }
}

pub fn is_unbordered(w: &Word) -> bool {
    w.borders().is_empty()
}

/// All unbordered words of length `len` over `{0..q}`, lexicographically.
pub fn enumerate_unbordered(len: usize, q: u8, budget: u64) -> Result<Vec<Word>> {
    if len == 0 {
        return Err(Error::ParameterOutOfRange("ℓ must be positive".into()));
    }
    let total = (q as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget,
        });
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8; len];
    for _ in 0..total {
        let w = Word(cur.clone());
        if is_unbordered(&w) {
            out.push(w);
        }
        // increment in radix q, rightmost fastest
        for d in cur.iter_mut().rev() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// Where a suffix of `left` equals a prefix of `right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub left: Word,
    pub right: Word,
    /// Length of the shared suffix/prefix.
    pub length: usize,
}

/// Checks that no nonempty proper suffix of any member equals a prefix of any
/// member (a word against itself included).
pub fn check_mutually_unbordered(words: &[Word]) -> std::result::Result<(), Overlap> {
    for u in words {
        for v in words {
            for len in 1..u.len().min(v.len() + 1) {
                if u.0[u.len() - len..] == v.0[..len] {
                    return Err(Overlap {
                        left: u.clone(),
                        right: v.clone(),
                        length: len,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Serialized as a plain array of words; `k` is recovered on load when the
/// words are exactly a formula family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Word>", into = "Vec<Word>")]
pub struct MutuallyUnborderedFamily {
    words: Vec<Word>,
    k: Option<u32>,
}

impl TryFrom<Vec<Word>> for MutuallyUnborderedFamily {
    type Error = Error;
    fn try_from(words: Vec<Word>) -> Result<Self> {
        let mut fam = MutuallyUnborderedFamily::new(words)?;
        if fam.len().is_power_of_two() {
            let k = fam.len().trailing_zeros();
            if let Ok(f) = formula_family(fam.word_len(), k) {
                if f.words == fam.words {
                    fam.k = Some(k);
                }
            }
        }
        Ok(fam)
    }
}

impl From<MutuallyUnborderedFamily> for Vec<Word> {
    fn from(f: MutuallyUnborderedFamily) -> Self {
        f.words
    }
}

impl MutuallyUnborderedFamily {
    /// Validates and sorts an arbitrary family.
    pub fn new(mut words: Vec<Word>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::ParameterOutOfRange("empty family".into()));
        }
        let len = words[0].len();
        if words.iter().any(|w| w.len() != len) {
            return Err(Error::ParameterOutOfRange("words differ in length".into()));
        }
        words.sort();
        words.dedup();
        check_mutually_unbordered(&words).map_err(|o| {
            Error::Precondition(format!(
                "suffix of {} overlaps prefix of {} in {} symbols",
                o.left, o.right, o.length
            ))
        })?;
        Ok(MutuallyUnborderedFamily { words, k: None })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_len(&self) -> usize {
        self.words[0].len()
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    /// Members as `ℓ`-bit integers, in family order.
    pub fn points(&self) -> Vec<u32> {
        self.words.iter().map(Word::to_bits).collect()
    }
}

/// `0^{ℓ-k-2} 1 v 1` for all `v ∈ {0,1}^k`; requires `k < (ℓ-4)/2`.
pub fn formula_family(ell: usize, k: u32) -> Result<MutuallyUnborderedFamily> {
    if 2 * k as usize + 4 >= ell {
        return Err(Error::ParameterOutOfRange(format!(
            "k = {k} must satisfy k < (ℓ - 4)/2 for ℓ = {ell}"
        )));
    }
    let zeros = ell - k as usize - 2;
    let words = (0..1u32 << k)
        .map(|v| {
            let mut s = vec![0u8; zeros];
            s.push(1);
            s.extend(Word::from_bits(v, k as usize).0);
            s.push(1);
            Word(s)
        })
        .collect();
    let mut fam = MutuallyUnborderedFamily::new(words)?;
    fam.k = Some(k);
    Ok(fam)
}

/// Greedy lexicographic search for a mutually unbordered binary family of
/// word length `ell`, stopping at `target` members.
pub fn greedy_binary_family(ell: usize, target: usize) -> Result<MutuallyUnborderedFamily> {
    let mut chosen: Vec<Word> = Vec::new();
    for w in enumerate_unbordered(ell, 2, 1 << 20)? {
        chosen.push(w);
        if check_mutually_unbordered(&chosen).is_err() {
            chosen.pop();
        }
        if chosen.len() == target {
            break;
        }
    }
    MutuallyUnborderedFamily::new(chosen)
}

/// `0 v 11` for every `v ∈ {0,1}^{ℓ-3}` without `11` and not ending in `1`.
///
/// A proper suffix of length at least two ends in `11`, and the only prefix
/// containing `11` is the whole word, so the family is mutually unbordered.
/// Its size is the Fibonacci number `F(ℓ-1)`: 5, 8, 13, 21 for `ℓ = 7..=10`.
pub fn sparse_ones_family(ell: usize) -> Result<MutuallyUnborderedFamily> {
    if !(4..=26).contains(&ell) {
        return Err(Error::ParameterOutOfRange(format!("ℓ = {ell} outside 4..=26")));
    }
    let inner = ell - 3;
    let words = (0..1u32 << inner)
        .filter(|v| v & (v >> 1) == 0 && v & 1 == 0)
        .map(|v| {
            let mut s = vec![0u8];
            s.extend(Word::from_bits(v, inner).0);
            s.extend([1, 1]);
            Word(s)
        })
        .collect();
    MutuallyUnborderedFamily::new(words)
}
