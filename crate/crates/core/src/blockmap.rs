//! Sliding block codes over multi-track full shifts.
//!
//! A [`BlockMap`] with memory `m` and anticipation `a` computes
//! `f(x)_i = rule(x_{i-m} … x_{i+a})`. The rule is stored as a total table
//! indexed by the radix-`|A|` encoding of the neighbourhood, leftmost cell
//! most significant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, PeriodicConfig};
use crate::error::{Error, Result};

/// Default cap on rule-table entries and exhaustive comparisons.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockMapFile", into = "BlockMapFile")]
pub struct BlockMap {
    alphabet: Alphabet,
    memory: usize,
    anticipation: usize,
    rule: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct BlockMapFile {
    alphabet: Alphabet,
    memory: usize,
    anticipation: usize,
    rule: Vec<u32>,
}

impl TryFrom<BlockMapFile> for BlockMap {
    type Error = Error;
    fn try_from(f: BlockMapFile) -> Result<Self> {
        BlockMap::from_table(f.alphabet, f.memory, f.anticipation, f.rule)
    }
}

impl From<BlockMap> for BlockMapFile {
    fn from(m: BlockMap) -> Self {
        BlockMapFile {
            alphabet: m.alphabet,
            memory: m.memory,
            anticipation: m.anticipation,
            rule: m.rule,
        }
    }
}

fn table_size(alphabet: &Alphabet, diameter: usize, budget: u64) -> Result<usize> {
    let needed = alphabet
        .words_of_length(diameter)
        .unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(needed as usize)
}

/// Writes the digits of `index` (radix `q`, most significant first) into `out`.
fn digits_into(mut index: usize, q: usize, out: &mut [u32]) {
    for d in out.iter_mut().rev() {
        *d = (index % q) as u32;
        index /= q;
    }
}

fn index_of(word: &[u32], q: usize) -> usize {
    word.iter().fold(0usize, |acc, &s| acc * q + s as usize)
}

impl BlockMap {
    /// Builds the rule table by evaluating `local` on every neighbourhood.
    ///
    /// `local` receives the word `x_{i-m} … x_{i+a}`.
    pub fn from_local<F>(
        alphabet: Alphabet,
        memory: usize,
        anticipation: usize,
        budget: u64,
        mut local: F,
    ) -> Result<Self>
    where
        F: FnMut(&[u32]) -> u32,
    {
        let d = memory + 1 + anticipation;
        let n = table_size(&alphabet, d, budget)?;
        let q = alphabet.size();
        let mut word = vec![0u32; d];
        let mut rule = Vec::with_capacity(n);
        for idx in 0..n {
            digits_into(idx, q, &mut word);
            let out = local(&word);
            debug_assert!((out as usize) < q);
            rule.push(out);
        }
        Ok(BlockMap {
            alphabet,
            memory,
            anticipation,
            rule,
        })
    }

    pub fn from_table(
        alphabet: Alphabet,
        memory: usize,
        anticipation: usize,
        rule: Vec<u32>,
    ) -> Result<Self> {
        let d = memory + 1 + anticipation;
        let expect = alphabet.words_of_length(d);
        if expect != Some(rule.len() as u128) {
            return Err(Error::Parse {
                location: "rule".into(),
                message: format!("expected {expect:?} entries, found {}", rule.len()),
            });
        }
        if let Some(&s) = rule.iter().find(|&&s| s as usize >= alphabet.size()) {
            return Err(Error::Parse {
                location: "rule".into(),
                message: format!("symbol {s} outside alphabet"),
            });
        }
        Ok(BlockMap {
            alphabet,
            memory,
            anticipation,
            rule,
        })
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let rule = (0..alphabet.size() as u32).collect();
        BlockMap {
            alphabet,
            memory: 0,
            anticipation: 0,
            rule,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn anticipation(&self) -> usize {
        self.anticipation
    }

    pub fn diameter(&self) -> usize {
        self.memory + 1 + self.anticipation
    }

    pub fn rule(&self) -> &[u32] {
        &self.rule
    }

    /// Output symbol for a neighbourhood word of length `diameter()`.
    pub fn local(&self, word: &[u32]) -> u32 {
        self.rule[index_of(word, self.alphabet.size())]
    }

    /// Output for a neighbourhood word that is wider than this map's own,
    /// centred at `center` within `word`.
    fn local_at(&self, word: &[u32], center: usize) -> u32 {
        self.local(&word[center - self.memory..=center + self.anticipation])
    }

    pub fn apply(&self, x: &PeriodicConfig) -> PeriodicConfig {
        let p = x.period() as i64;
        let d = self.diameter();
        let mut word = vec![0u32; d];
        let cells = (0..p)
            .map(|j| {
                for (k, slot) in word.iter_mut().enumerate() {
                    *slot = x.at(j - self.memory as i64 + k as i64);
                }
                self.local(&word)
            })
            .collect();
        PeriodicConfig::new(x.alphabet().clone(), cells).expect("rule outputs are symbols")
    }

    /// The same map re-expressed with a wider neighbourhood.
    pub fn padded(&self, memory: usize, anticipation: usize, budget: u64) -> Result<Self> {
        assert!(memory >= self.memory && anticipation >= self.anticipation);
        BlockMap::from_local(self.alphabet.clone(), memory, anticipation, budget, |w| {
            self.local_at(w, memory)
        })
    }

    fn check_alphabet(&self, other: &BlockMap) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.tracks().to_vec(),
                right: other.alphabet.tracks().to_vec(),
            });
        }
        Ok(())
    }
}

/// `f ∘ g`: `g` is applied first.
pub fn compose(f: &BlockMap, g: &BlockMap) -> Result<BlockMap> {
    compose_with_budget(f, g, DEFAULT_BUDGET)
}

pub fn compose_with_budget(f: &BlockMap, g: &BlockMap, budget: u64) -> Result<BlockMap> {
    f.check_alphabet(g)?;
    let memory = f.memory + g.memory;
    let anticipation = f.anticipation + g.anticipation;
    let fd = f.diameter();
    let mut inner = vec![0u32; fd];
    BlockMap::from_local(f.alphabet.clone(), memory, anticipation, budget, |w| {
        // g's output at offsets -f.memory ..= f.anticipation around the centre.
        for (k, slot) in inner.iter_mut().enumerate() {
            *slot = g.local(&w[k..k + g.diameter()]);
        }
        f.local(&inner)
    })
}

/// Composes a list of maps as functions: `maps[0] ∘ maps[1] ∘ …`.
pub fn compose_all(maps: &[&BlockMap], budget: u64) -> Result<BlockMap> {
    let (last, rest) = maps
        .split_last()
        .ok_or_else(|| Error::ParameterOutOfRange("empty composition".into()))?;
    let mut acc = (*last).clone();
    for f in rest.iter().rev() {
        acc = compose_with_budget(f, &acc, budget)?;
    }
    Ok(acc)
}

/// Shifts a single track by `power` cells: `σ(x)_i = x_{i+1}` for `power = 1`.
pub fn shift(alphabet: &Alphabet, track: usize, power: i64) -> Result<BlockMap> {
    if track >= alphabet.num_tracks() {
        return Err(Error::ParameterOutOfRange(format!(
            "track {track} of {}",
            alphabet.num_tracks()
        )));
    }
    let reach = power.unsigned_abs() as usize;
    let (memory, anticipation) = if power >= 0 { (0, reach) } else { (reach, 0) };
    let source = (memory as i64 + power) as usize;
    let a = alphabet.clone();
    BlockMap::from_local(alphabet.clone(), memory, anticipation, u64::MAX, move |w| {
        let v = a.component(w[source], track);
        a.with_component(w[memory], track, v)
    })
}

/// How an equality check was carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualityMode {
    ExhaustiveTable,
    PeriodicSample,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityPolicy {
    pub mode: EqualityMode,
    pub budget: u64,
    pub seed: u64,
}

impl EqualityPolicy {
    pub fn exhaustive() -> Self {
        EqualityPolicy {
            mode: EqualityMode::ExhaustiveTable,
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

impl Default for EqualityPolicy {
    fn default() -> Self {
        Self::exhaustive()
    }
}

/// Strength of an `Equal` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Every relevant case was checked; the verdict is a proof.
    Exhaustive { checked: u64 },
    Probabilistic { samples: u64 },
}

impl Evidence {
    pub fn is_proof(&self) -> bool {
        matches!(self, Evidence::Exhaustive { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equal { evidence: Evidence },
    /// A word (or periodic configuration) on which the two sides differ.
    Differ { witness: Vec<u32> },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal { .. })
    }
}

/// Compares two block maps under `policy`.
pub fn equal(f: &BlockMap, g: &BlockMap, policy: &EqualityPolicy) -> Result<Verdict> {
    f.check_alphabet(g)?;
    let memory = f.memory.max(g.memory);
    let anticipation = f.anticipation.max(g.anticipation);
    let d = memory + 1 + anticipation;
    let q = f.alphabet.size();
    let mut word = vec![0u32; d];
    let differs = |w: &[u32]| f.local_at(w, memory) != g.local_at(w, memory);
    match policy.mode {
        EqualityMode::ExhaustiveTable => {
            let n = table_size(&f.alphabet, d, policy.budget)?;
            for idx in 0..n {
                digits_into(idx, q, &mut word);
                if differs(&word) {
                    return Ok(Verdict::Differ { witness: word });
                }
            }
            Ok(Verdict::Equal {
                evidence: Evidence::Exhaustive { checked: n as u64 },
            })
        }
        EqualityMode::Randomized => {
            let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
            for _ in 0..policy.budget {
                for s in word.iter_mut() {
                    *s = rng.gen_range(0..q as u32);
                }
                if differs(&word) {
                    return Ok(Verdict::Differ { witness: word });
                }
            }
            Ok(Verdict::Equal {
                evidence: Evidence::Probabilistic {
                    samples: policy.budget,
                },
            })
        }
        EqualityMode::PeriodicSample => {
            // Random periodic points with periods cycling through 1..=2d.
            let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
            for s in 0..policy.budget {
                let p = 1 + (s as usize % (2 * d));
                let cells = (0..p).map(|_| rng.gen_range(0..q as u32)).collect();
                let x = PeriodicConfig::new(f.alphabet.clone(), cells)?;
                if f.apply(&x) != g.apply(&x) {
                    return Ok(Verdict::Differ {
                        witness: x.cells().to_vec(),
                    });
                }
            }
            Ok(Verdict::Equal {
                evidence: Evidence::Probabilistic {
                    samples: policy.budget,
                },
            })
        }
    }
}

/// Default radius limit used by [`invert`] callers.
pub fn default_radius_limit(f: &BlockMap) -> usize {
    2 * (f.memory + f.anticipation) + 2
}

/// Candidate inverse neighbourhoods in search order: by `max(m, a)`, then by
/// `m + a`, then by larger memory first.
fn radius_order(limit: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..=limit {
        let mut ring: Vec<(usize, usize)> = (0..=r)
            .flat_map(|m| (0..=r).map(move |a| (m, a)))
            .filter(|&(m, a)| m.max(a) == r)
            .collect();
        ring.sort_by_key(|&(m, a)| (m + a, std::cmp::Reverse(m)));
        out.extend(ring);
    }
    out
}

/// Looks for two distinct periodic points of a small period with equal images.
fn injectivity_witness(f: &BlockMap, budget: u64) -> Option<(Vec<u32>, Vec<u32>)> {
    let q = f.alphabet.size();
    for p in 1.. {
        let n = match f.alphabet.words_of_length(p) {
            Some(n) if n <= budget as u128 && p <= 8 => n as usize,
            _ => return None,
        };
        let mut seen = std::collections::HashMap::with_capacity(n);
        let mut cells = vec![0u32; p];
        for idx in 0..n {
            digits_into(idx, q, &mut cells);
            let x = PeriodicConfig::new(f.alphabet.clone(), cells.clone()).ok()?;
            let y = f.apply(&x).cells().to_vec();
            if let Some(prev) = seen.insert(y, cells.clone()) {
                return Some((prev, cells));
            }
        }
    }
    None
}

/// Materialises the inverse of a reversible block map.
///
/// Candidate inverse radii are tried in increasing order up to
/// `radius_limit`; any candidate found is confirmed by exhaustive equality of
/// both compositions with the identity.
pub fn invert(f: &BlockMap, radius_limit: usize) -> Result<BlockMap> {
    invert_with_budget(f, radius_limit, DEFAULT_BUDGET)
}

pub fn invert_with_budget(f: &BlockMap, radius_limit: usize, budget: u64) -> Result<BlockMap> {
    if let Some(w) = injectivity_witness(f, budget.min(1 << 16)) {
        return Err(Error::NotReversibleWithinLimit {
            radius_limit,
            witness: Some(w),
        });
    }
    let q = f.alphabet.size();
    let id = BlockMap::identity(f.alphabet.clone());
    let mut skipped = 0u128;
    for (m, a) in radius_order(radius_limit) {
        // x_0 must be determined by f(x) on [-m, a], which reads x on
        // [-m - f.memory, a + f.anticipation].
        let span = m + f.memory + 1 + a + f.anticipation;
        let n = match f.alphabet.words_of_length(span) {
            Some(n) if n <= budget as u128 => n as usize,
            n => {
                skipped = skipped.max(n.unwrap_or(u128::MAX));
                continue;
            }
        };
        let inv_len = m + 1 + a;
        let inv_size = table_size(&f.alphabet, inv_len, budget)?;
        let mut table: Vec<Option<u32>> = vec![None; inv_size];
        let mut x = vec![0u32; span];
        let mut y = vec![0u32; inv_len];
        let mut consistent = true;
        for idx in 0..n {
            digits_into(idx, q, &mut x);
            for (k, slot) in y.iter_mut().enumerate() {
                *slot = f.local(&x[k..k + f.diameter()]);
            }
            let centre = x[m + f.memory];
            let slot = &mut table[index_of(&y, q)];
            match slot {
                Some(prev) if *prev != centre => {
                    consistent = false;
                    break;
                }
                _ => *slot = Some(centre),
            }
        }
        if !consistent {
            continue;
        }
        let rule = table.into_iter().map(|s| s.unwrap_or(0)).collect();
        let g = BlockMap::from_table(f.alphabet.clone(), m, a, rule)?;
        let policy = EqualityPolicy::exhaustive().with_budget(budget);
        let fg = compose_with_budget(f, &g, budget)?;
        let gf = compose_with_budget(&g, f, budget)?;
        if equal(&fg, &id, &policy)?.is_equal() && equal(&gf, &id, &policy)?.is_equal() {
            return Ok(g);
        }
    }
    if skipped > 0 {
        return Err(Error::BudgetExceeded {
            needed: skipped,
            budget,
        });
    }
    Err(Error::NotReversibleWithinLimit {
        radius_limit,
        witness: None,
    })
}

/// The bijection a reversible map induces on `p`-periodic points, indexed by
/// the radix encoding of the period word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicAction {
    pub period: usize,
    pub table: Vec<u32>,
}

impl PeriodicAction {
    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Order as a permutation (lcm of cycle lengths).
    pub fn order(&self) -> u128 {
        crate::groups::perm::cycle_lengths(&self.table)
            .into_iter()
            .fold(1u128, |acc, c| num_integer_lcm(acc, c as u128))
    }
}

fn num_integer_lcm(a: u128, b: u128) -> u128 {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

pub fn restrict_to_period(f: &BlockMap, period: usize, budget: u64) -> Result<PeriodicAction> {
    if period == 0 {
        return Err(Error::ParameterOutOfRange("period must be positive".into()));
    }
    let n = table_size(&f.alphabet, period, budget)?;
    let q = f.alphabet.size();
    let mut cells = vec![0u32; period];
    let mut table = Vec::with_capacity(n);
    for idx in 0..n {
        digits_into(idx, q, &mut cells);
        let x = PeriodicConfig::new(f.alphabet.clone(), cells.clone())?;
        table.push(index_of(f.apply(&x).cells(), q) as u32);
    }
    Ok(PeriodicAction { period, table })
}

/// Length of the orbit of `x` under `f`, if it closes within `limit` steps.
pub fn orbit_length(f: &BlockMap, x: &PeriodicConfig, limit: usize) -> Option<usize> {
    let mut y = f.apply(x);
    for n in 1..=limit {
        if &y == x {
            return Some(n);
        }
        y = f.apply(&y);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc() -> Alphabet {
        Alphabet::two_track(2).unwrap()
    }

    fn binary() -> Alphabet {
        Alphabet::new(vec![2]).unwrap()
    }

    #[test]
    fn shift_and_inverse_compose_to_identity() {
        let a = bc();
        let s = shift(&a, 0, 1).unwrap();
        let si = shift(&a, 0, -1).unwrap();
        let id = BlockMap::identity(a);
        let v = equal(&compose(&s, &si).unwrap(), &id, &EqualityPolicy::exhaustive()).unwrap();
        assert!(v.is_equal());
        assert_eq!(shift(&bc(), 1, 0).unwrap(), BlockMap::identity(bc()));
    }

    #[test]
    fn radii_add_under_composition() {
        let s1 = shift(&bc(), 0, 1).unwrap();
        assert_eq!((s1.memory(), s1.anticipation()), (0, 1));
        let s2 = compose(&s1, &s1).unwrap();
        assert_eq!((s2.memory(), s2.anticipation()), (0, 2));
    }

    #[test]
    fn partial_shift_is_not_the_full_shift() {
        let a = bc();
        let s1 = shift(&a, 0, 1).unwrap();
        let full = compose(&s1, &shift(&a, 1, 1).unwrap()).unwrap();
        match equal(&s1, &full, &EqualityPolicy::exhaustive()).unwrap() {
            Verdict::Differ { witness } => {
                let c: Vec<usize> = witness.iter().map(|&s| a.component(s, 1)).collect();
                assert_ne!(c[0], c[1]);
            }
            v => panic!("expected counterexample, got {v:?}"),
        }
    }

    #[test]
    fn partial_shift_acts_on_its_track_only() {
        let a = bc();
        let x = PeriodicConfig::from_tracks(a.clone(), &[vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
        let y = shift(&a, 0, 1).unwrap().apply(&x);
        assert_eq!(y.track(0), vec![0, 0, 1]);
        assert_eq!(y.track(1), vec![0, 1, 1]);
    }

    #[test]
    fn invert_partial_shift() {
        let a = bc();
        let s1 = shift(&a, 0, 1).unwrap();
        let g = invert(&s1, default_radius_limit(&s1)).unwrap();
        let expect = shift(&a, 0, -1).unwrap();
        assert!(equal(&g, &expect, &EqualityPolicy::exhaustive()).unwrap().is_equal());
        assert_eq!((g.memory(), g.anticipation()), (1, 0));
    }

    #[test]
    fn xor_is_not_reversible() {
        let xor = BlockMap::from_local(binary(), 0, 1, DEFAULT_BUDGET, |w| w[0] ^ w[1]).unwrap();
        match invert(&xor, default_radius_limit(&xor)) {
            Err(Error::NotReversibleWithinLimit {
                witness: Some((x, y)),
                ..
            }) => {
                assert_eq!(x, vec![0]);
                assert_eq!(y, vec![1]);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn radius_search_order() {
        assert_eq!(
            &radius_order(1)[..],
            &[(0, 0), (1, 0), (0, 1), (1, 1)]
        );
    }

    #[test]
    fn budget_is_enforced() {
        let a = bc();
        let s = shift(&a, 0, 6).unwrap();
        let policy = EqualityPolicy::exhaustive().with_budget(100);
        assert!(matches!(
            equal(&s, &s, &policy),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn periodic_restriction() {
        let id = BlockMap::identity(bc());
        assert!(restrict_to_period(&id, 3, DEFAULT_BUDGET).unwrap().is_identity());

        let s = shift(&binary(), 0, 1).unwrap();
        let r = restrict_to_period(&s, 2, DEFAULT_BUDGET).unwrap();
        // "01" (index 1) becomes "10" (index 2)
        assert_eq!(r.table[1], 2);

        let s1 = shift(&bc(), 0, 1).unwrap();
        assert_eq!(restrict_to_period(&s1, 5, DEFAULT_BUDGET).unwrap().order(), 5);
    }

    #[test]
    fn randomized_modes_are_labelled_probabilistic() {
        let a = bc();
        let s = shift(&a, 0, 1).unwrap();
        for mode in [EqualityMode::Randomized, EqualityMode::PeriodicSample] {
            let p = EqualityPolicy { mode, budget: 64, seed: 3 };
            match equal(&s, &s, &p).unwrap() {
                Verdict::Equal { evidence } => assert!(!evidence.is_proof()),
                v => panic!("{v:?}"),
            }
            assert!(!equal(&s, &BlockMap::identity(a.clone()), &p).unwrap().is_equal());
        }
    }
}
