//! Words over the abstract generators `σ₁^{±1}`, `f₀`, `a`, `b`, their net
//! shifts, and their evaluation as symbolic products or block maps.
//!
//! Words are listed in application order: `["s-1", "f", "s"]` applies
//! `σ₁⁻¹` first, i.e. it is `σ₁ ∘ f₀ ∘ σ₁⁻¹` as a composition of functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alphabet::PeriodicConfig;
use crate::blockmap::{self, BlockMap, EqualityPolicy};
use crate::ctrl::{CtrlDescriptor, CtrlLayout, Evaluator, Factor, OffsetConvention, ProductVerdict};
use crate::error::{Error, Result};
use crate::groups::twoinv::two_involution_shift_decomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "s")]
    S,
    #[serde(rename = "s-1")]
    SInv,
    #[serde(rename = "f")]
    F0,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::S,
        Generator::SInv,
        Generator::F0,
        Generator::A,
        Generator::B,
    ];

    pub fn inverse(self) -> Generator {
        match self {
            Generator::S => Generator::SInv,
            Generator::SInv => Generator::S,
            g => g,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Generator::S => "s",
            Generator::SInv => "s-1",
            Generator::F0 => "f",
            Generator::A => "a",
            Generator::B => "b",
        }
    }

    /// Exponent of `σ₁` carried by this generator.
    fn shift_power(self) -> i64 {
        match self {
            Generator::S => 1,
            Generator::SInv => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.symbol() == s)
            .ok_or_else(|| Error::Parse {
                location: "word".into(),
                message: format!("unknown generator {s:?}"),
            })
    }
}

/// Parses a whitespace- or comma-separated word such as `"s-1 f s"`.
pub fn parse_word(text: &str) -> Result<Vec<Generator>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| {
            t.parse().map_err(|_| Error::Parse {
                location: format!("word[{i}]"),
                message: format!("unknown generator {t:?}"),
            })
        })
        .collect()
}

pub fn format_word(word: &[Generator]) -> String {
    word.iter().map(|g| g.symbol()).collect::<Vec<_>>().join(" ")
}

pub fn invert_word(word: &[Generator]) -> Vec<Generator> {
    word.iter().rev().map(|g| g.inverse()).collect()
}

/// Cells moved per track; positive means leftward (`σ(x)_i = x_{i+1}`).
pub type NetShiftVector = Vec<i64>;

/// Sums the declared per-track shifts of `word`.
///
/// `σ₁^{±1}` contributes `±1` on the control track; `f₀`, `a` and `b`
/// contribute zero everywhere.
pub fn net_shift(word: &[Generator], layout: &CtrlLayout) -> NetShiftVector {
    let mut v = vec![0; layout.alphabet.num_tracks()];
    v[layout.control_track] = word.iter().map(|g| g.shift_power()).sum();
    v
}

/// Rewrites a word over `σ₁^{±1}`, `f₀` as a symbolic product, merging runs
/// of shifts. `a` and `b` have no symbolic form.
pub fn word_to_factors(word: &[Generator], f0: &CtrlDescriptor) -> Result<Vec<Factor>> {
    let mut out = Vec::new();
    let mut pending = 0i64;
    for &g in word {
        match g {
            Generator::S | Generator::SInv => pending += g.shift_power(),
            Generator::F0 => {
                if pending != 0 {
                    out.push(Factor::Shift(pending));
                    pending = 0;
                }
                out.push(Factor::Ctrl(f0.clone()));
            }
            Generator::A | Generator::B => {
                return Err(Error::UnsupportedFactor(format!(
                    "generator {g} has no symbolic ctrl form"
                )))
            }
        }
    }
    if pending != 0 {
        out.push(Factor::Shift(pending));
    }
    Ok(out)
}

/// Generator word for `[Shift(t₁), f₀, Shift(t₂), …]`; the inverse of
/// [`word_to_factors`] on products whose ctrl factors are all `f₀`.
pub fn factors_to_word(factors: &[Factor], f0: &CtrlDescriptor) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for f in factors {
        match f {
            Factor::Shift(t) => {
                let g = if *t > 0 { Generator::S } else { Generator::SInv };
                out.extend(std::iter::repeat_n(g, t.unsigned_abs() as usize));
            }
            Factor::Ctrl(d) if d == f0 => out.push(Generator::F0),
            Factor::Ctrl(d) => {
                return Err(Error::UnsupportedFactor(format!(
                    "ctrl factor at offset {} is not f₀",
                    d.offset()
                )))
            }
        }
    }
    Ok(out)
}

/// Concrete block maps for every generator on one layout.
#[derive(Debug, Clone)]
pub struct GeneratorMaps {
    pub s: BlockMap,
    pub s_inv: BlockMap,
    pub f0: BlockMap,
    /// Present when the first two tracks are binary.
    pub ab: Option<(BlockMap, BlockMap)>,
}

impl GeneratorMaps {
    pub fn new(
        layout: &CtrlLayout,
        f0: &CtrlDescriptor,
        convention: OffsetConvention,
        budget: u64,
    ) -> Result<Self> {
        let tracks = layout.alphabet.tracks();
        let ab = if tracks.len() >= 3 && tracks[0] == 2 && tracks[1] == 2 {
            let policy = EqualityPolicy::exhaustive().with_budget(budget);
            let (a, b, _) = two_involution_shift_decomposition(&layout.alphabet, &policy)?;
            Some((a, b))
        } else {
            None
        };
        Ok(GeneratorMaps {
            s: layout.partial_shift(1),
            s_inv: layout.partial_shift(-1),
            f0: f0.compile(layout, convention, budget)?,
            ab,
        })
    }

    pub fn get(&self, g: Generator) -> Result<&BlockMap> {
        let missing = || Error::UnsupportedFactor(format!("generator {g} undefined on this alphabet"));
        Ok(match g {
            Generator::S => &self.s,
            Generator::SInv => &self.s_inv,
            Generator::F0 => &self.f0,
            Generator::A => &self.ab.as_ref().ok_or_else(missing)?.0,
            Generator::B => &self.ab.as_ref().ok_or_else(missing)?.1,
        })
    }

    /// Applies `word` to a periodic point one letter at a time; no table for
    /// the product is built.
    pub fn apply(&self, word: &[Generator], x: &PeriodicConfig) -> Result<PeriodicConfig> {
        let mut y = x.clone();
        for &g in word {
            y = self.get(g)?.apply(&y);
        }
        Ok(y)
    }

    /// The block map of `word`, first letter applied first.
    pub fn evaluate(&self, word: &[Generator], budget: u64) -> Result<BlockMap> {
        let maps = word.iter().rev().map(|&g| self.get(g)).collect::<Result<Vec<_>>>()?;
        if maps.is_empty() {
            return Ok(BlockMap::identity(self.s.alphabet().clone()));
        }
        blockmap::compose_all(&maps, budget)
    }
}

/// How a certificate's word was checked against its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayPolicy {
    /// Exact comparison by the occurrence-pattern evaluator.
    AlignedEvaluator,
}

/// One verified step of a certificate construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    /// Number of evaluator or group-membership checks that passed.
    pub checks: usize,
    pub detail: String,
}

/// A generator word together with the ctrl map it is claimed to equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenWordCert {
    pub word: Vec<Generator>,
    pub target: CtrlDescriptor,
    pub verified: bool,
    pub policy: ReplayPolicy,
    /// `f₀` and the offset convention the word is read against.
    pub f0: CtrlDescriptor,
    pub convention: OffsetConvention,
    #[serde(default)]
    pub stages: Vec<StageRecord>,
}

impl GenWordCert {
    pub fn net_shift(&self, layout: &CtrlLayout) -> NetShiftVector {
        net_shift(&self.word, layout)
    }

    pub fn factors(&self) -> Result<Vec<Factor>> {
        word_to_factors(&self.word, &self.f0)
    }

    /// Replays the word through `evaluator` and compares with the target.
    pub fn replay(&self, evaluator: &Evaluator) -> Result<ProductVerdict> {
        if evaluator.convention() != self.convention {
            return Err(Error::Precondition("evaluator convention differs from certificate".into()));
        }
        evaluator.compare(&self.factors()?, &[Factor::Ctrl(self.target.clone())])
    }
}
