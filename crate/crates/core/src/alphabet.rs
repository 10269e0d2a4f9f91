//! Multi-track alphabets and spatially periodic configurations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A product alphabet `T_0 × T_1 × … × T_{r-1}`.
///
/// Symbols are encoded as radix integers with the first track most
/// significant, so `(b, c)` over `B × C` has code `b * |C| + c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Alphabet {
    tracks: Vec<usize>,
    size: usize,
}

impl Alphabet {
    pub fn new(tracks: Vec<usize>) -> Result<Self> {
        if tracks.is_empty() {
            return Err(Error::InvalidAlphabet("no tracks".into()));
        }
        if let Some(t) = tracks.iter().find(|&&t| t < 2) {
            return Err(Error::InvalidAlphabet(format!("track size {t} < 2")));
        }
        let size = tracks
            .iter()
            .try_fold(1usize, |acc, &t| acc.checked_mul(t))
            .filter(|&s| s <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidAlphabet("alphabet too large".into()))?;
        Ok(Alphabet { tracks, size })
    }

    /// `B × C` with a binary control-free bottom track.
    pub fn two_track(b: usize) -> Result<Self> {
        Self::new(vec![b, 2])
    }

    /// `B′ × B × C`, all binary: the eight-letter alphabet.
    pub fn three_track() -> Self {
        Self::new(vec![2, 2, 2]).expect("binary tracks")
    }

    pub fn tracks(&self) -> &[usize] {
        &self.tracks
    }

    pub fn num_tracks(&self) -> usize {
        self.tracks.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Place value of `track` in the symbol encoding.
    fn stride(&self, track: usize) -> usize {
        self.tracks[track + 1..].iter().product()
    }

    pub fn encode(&self, parts: &[usize]) -> u32 {
        debug_assert_eq!(parts.len(), self.tracks.len());
        parts
            .iter()
            .zip(&self.tracks)
            .fold(0usize, |acc, (&p, &t)| {
                debug_assert!(p < t);
                acc * t + p
            }) as u32
    }

    pub fn decode(&self, symbol: u32) -> Vec<usize> {
        let mut s = symbol as usize;
        let mut out = vec![0; self.tracks.len()];
        for (slot, &t) in out.iter_mut().zip(&self.tracks).rev() {
            *slot = s % t;
            s /= t;
        }
        out
    }

    pub fn component(&self, symbol: u32, track: usize) -> usize {
        (symbol as usize / self.stride(track)) % self.tracks[track]
    }

    pub fn with_component(&self, symbol: u32, track: usize, value: usize) -> u32 {
        let stride = self.stride(track);
        let old = (symbol as usize / stride) % self.tracks[track];
        (symbol as usize - old * stride + value * stride) as u32
    }

    /// `|A|^len` if it fits in `u128`.
    pub fn words_of_length(&self, len: usize) -> Option<u128> {
        (self.size as u128).checked_pow(len as u32)
    }
}

impl TryFrom<Vec<usize>> for Alphabet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<usize> {
    fn from(a: Alphabet) -> Self {
        a.tracks
    }
}

/// A spatially periodic point: `cells[j]` is the symbol at every position `≡ j (mod p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicConfig {
    alphabet: Alphabet,
    cells: Vec<u32>,
}

impl PeriodicConfig {
    pub fn new(alphabet: Alphabet, cells: Vec<u32>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::ParameterOutOfRange("period must be positive".into()));
        }
        if let Some(&c) = cells.iter().find(|&&c| c as usize >= alphabet.size()) {
            return Err(Error::ParameterOutOfRange(format!("symbol {c} outside alphabet")));
        }
        Ok(PeriodicConfig { alphabet, cells })
    }

    /// Builds a configuration from one row per track.
    pub fn from_tracks(alphabet: Alphabet, rows: &[Vec<usize>]) -> Result<Self> {
        if rows.len() != alphabet.num_tracks() {
            return Err(Error::ParameterOutOfRange("one row per track required".into()));
        }
        let p = rows[0].len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::ParameterOutOfRange("rows differ in length".into()));
        }
        let cells = (0..p)
            .map(|j| {
                let parts: Vec<usize> = rows.iter().map(|r| r[j]).collect();
                alphabet.encode(&parts)
            })
            .collect();
        Self::new(alphabet, cells)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn period(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// Symbol at an arbitrary integer position.
    pub fn at(&self, i: i64) -> u32 {
        self.cells[i.rem_euclid(self.cells.len() as i64) as usize]
    }

    pub fn track(&self, track: usize) -> Vec<usize> {
        self.cells
            .iter()
            .map(|&c| self.alphabet.component(c, track))
            .collect()
    }

    /// The full shift `σ(x)_i = x_{i+1}`.
    pub fn shifted(&self) -> Self {
        let mut cells = self.cells.clone();
        cells.rotate_left(1);
        PeriodicConfig {
            alphabet: self.alphabet.clone(),
            cells,
        }
    }
}
