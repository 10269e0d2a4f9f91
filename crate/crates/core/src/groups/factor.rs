//! Factorisation of group elements as words in the original generators.
//!
//! A table of short words for coset representatives is filled Minkwitz-style:
//! random generator words are sifted through the base given by a [`Bsgs`],
//! keeping the shorter word whenever two candidates land on the same entry.
//! Every factorisation is replayed before it is returned.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bsgs::Bsgs;
use super::perm::Perm;
use crate::error::{Error, Result};

/// One letter of a generator word: generator index, possibly inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize) -> Self {
        Letter {
            gen: gen as u32,
            inv: false,
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

/// Evaluates a word left to right.
pub fn replay(word: &[Letter], gens: &[Perm]) -> Perm {
    let degree = gens.first().map_or(0, Perm::degree);
    let inverses: Vec<Perm> = gens.iter().map(Perm::inverse).collect();
    word.iter().fold(Perm::identity(degree), |acc, l| {
        let g = if l.inv {
            &inverses[l.gen as usize]
        } else {
            &gens[l.gen as usize]
        };
        acc.then(g)
    })
}

/// Free reduction, treating generators flagged as involutions as self-inverse.
pub fn reduce(word: &[Letter], involution: &[bool]) -> Vec<Letter> {
    let norm = |l: Letter| {
        if involution[l.gen as usize] {
            Letter { gen: l.gen, inv: false }
        } else {
            l
        }
    };
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        let l = norm(l);
        match out.last() {
            Some(&prev) if prev == norm(l.inverse()) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

pub fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| l.inverse()).collect()
}

#[derive(Debug, Clone)]
struct Entry {
    perm: Perm,
    word: Vec<Letter>,
}

/// Short-word transversal table over a fixed generator list.
#[derive(Debug, Clone)]
pub struct Factorizer {
    bsgs: Bsgs,
    gens: Vec<Perm>,
    involution: Vec<bool>,
    table: Vec<BTreeMap<u32, Entry>>,
    limit: usize,
}

impl Factorizer {
    /// Builds the table, drawing random words from a generator seeded with `seed`.
    pub fn new(gens: &[Perm], seed: u64) -> Result<Self> {
        let degree = gens
            .first()
            .map(Perm::degree)
            .ok_or_else(|| Error::ParameterOutOfRange("no generators".into()))?;
        let bsgs = Bsgs::new(degree, gens);
        let involution = gens
            .iter()
            .map(|g| g.then(g).is_identity())
            .collect();
        let table = (0..bsgs.depth())
            .map(|i| {
                let mut m = BTreeMap::new();
                m.insert(
                    bsgs.base()[i],
                    Entry {
                        perm: Perm::identity(degree),
                        word: Vec::new(),
                    },
                );
                m
            })
            .collect();
        let mut f = Factorizer {
            bsgs,
            gens: gens.to_vec(),
            involution,
            table,
            limit: 16 + 2 * degree,
        };
        f.fill(seed)?;
        Ok(f)
    }

    pub fn bsgs(&self) -> &Bsgs {
        &self.bsgs
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    fn filled(&self) -> usize {
        self.table.iter().map(BTreeMap::len).sum()
    }

    fn capacity(&self) -> usize {
        (0..self.bsgs.depth()).map(|i| self.bsgs.orbit(i).len()).sum()
    }

    /// Sum over levels of the longest table word: no factorisation is longer.
    pub fn word_length_bound(&self) -> usize {
        self.table
            .iter()
            .map(|lv| lv.values().map(|e| e.word.len()).max().unwrap_or(0))
            .sum()
    }

    fn sift_insert(&mut self, mut g: Perm, mut word: Vec<Letter>) {
        for i in 0..self.table.len() {
            if g.is_identity() || word.len() > self.limit {
                return;
            }
            let b = self.bsgs.base()[i];
            let beta = g.apply(b);
            match self.table[i].get_mut(&beta) {
                None => {
                    let gi = g.inverse();
                    let back = gi.apply(b);
                    let inv_word = invert_word(&word);
                    self.table[i].insert(beta, Entry { perm: g, word });
                    self.table[i].entry(back).or_insert(Entry {
                        perm: gi,
                        word: inv_word,
                    });
                    return;
                }
                Some(e) => {
                    if word.len() < e.word.len() {
                        std::mem::swap(&mut e.perm, &mut g);
                        std::mem::swap(&mut e.word, &mut word);
                    }
                    let t_inv = e.perm.inverse();
                    let mut w = word;
                    w.extend(invert_word(&e.word));
                    word = reduce(&w, &self.involution);
                    g = g.then(&t_inv);
                }
            }
        }
    }

    fn fill(&mut self, seed: u64) -> Result<()> {
        let capacity = self.capacity();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.gens.len();
        let max_rounds = 64;
        for _round in 0..max_rounds {
            let before = self.filled();
            let samples = 4 * capacity + 64;
            for _ in 0..samples {
                let len = rng.gen_range(1..=self.limit.min(4 * n + 16));
                let word: Vec<Letter> = (0..len)
                    .map(|_| Letter {
                        gen: rng.gen_range(0..n) as u32,
                        inv: rng.gen_bool(0.5),
                    })
                    .collect();
                let word = reduce(&word, &self.involution);
                let g = replay(&word, &self.gens);
                self.sift_insert(g, word);
            }
            self.improve(&mut rng);
            if self.filled() == capacity {
                return Ok(());
            }
            if self.filled() < before + capacity / 100 + 1 {
                self.limit *= 2;
            }
        }
        Err(Error::Precondition(format!(
            "factorisation table incomplete: {} of {capacity} entries",
            self.filled()
        )))
    }

    /// Sifts products of existing entries with generators and with each other.
    fn improve<R: Rng>(&mut self, rng: &mut R) {
        let entries: Vec<(Perm, Vec<Letter>)> = self
            .table
            .iter()
            .flat_map(|lv| lv.values().map(|e| (e.perm.clone(), e.word.clone())))
            .collect();
        for (p, w) in &entries {
            for (gi, g) in self.gens.clone().iter().enumerate() {
                let mut word = w.clone();
                word.push(Letter::new(gi));
                let word = reduce(&word, &self.involution);
                self.sift_insert(p.then(g), word);
            }
        }
        for _ in 0..entries.len() {
            let (a, wa) = &entries[rng.gen_range(0..entries.len())];
            let (b, wb) = &entries[rng.gen_range(0..entries.len())];
            let mut word = wa.clone();
            word.extend_from_slice(wb);
            let word = reduce(&word, &self.involution);
            self.sift_insert(a.then(b), word);
        }
    }

    /// A word whose left-to-right replay equals `target`.
    pub fn factor(&self, target: &Perm) -> Result<Vec<Letter>> {
        if !self.bsgs.contains(target) {
            return Err(Error::NotInGeneratedGroup);
        }
        let mut g = target.clone();
        let mut parts: Vec<&[Letter]> = Vec::new();
        for i in 0..self.table.len() {
            let beta = g.apply(self.bsgs.base()[i]);
            let e = self.table[i]
                .get(&beta)
                .expect("table is complete after construction");
            g = g.then(&e.perm.inverse());
            parts.push(&e.word);
        }
        debug_assert!(g.is_identity());
        let word: Vec<Letter> = parts.iter().rev().flat_map(|w| w.iter().copied()).collect();
        let word = reduce(&word, &self.involution);
        if replay(&word, &self.gens) != *target {
            return Err(Error::Precondition("factorisation failed replay".into()));
        }
        Ok(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn reduction_cancels_inverse_pairs() {
        let a = Letter::new(0);
        let b = Letter::new(1);
        let w = [a, b, b.inverse(), a.inverse(), b];
        assert_eq!(reduce(&w, &[false, false]), vec![b]);
        assert_eq!(reduce(&[a, a], &[true]), vec![]);
    }

    #[test]
    fn factors_replay() {
        let gens = [
            Perm::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap(),
            Perm::from_cycles(6, &[&[0, 1]]).unwrap(),
        ];
        let f = Factorizer::new(&gens, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let t = Perm::random(6, &mut rng);
            let w = f.factor(&t).unwrap();
            assert_eq!(replay(&w, &gens), t);
            assert!(w.len() <= f.word_length_bound());
        }
    }

    #[test]
    fn identity_has_empty_word() {
        let gens = [Perm::from_cycles(4, &[&[0, 1, 2]]).unwrap()];
        let f = Factorizer::new(&gens, 0).unwrap();
        assert!(f.factor(&Perm::identity(4)).unwrap().is_empty());
        assert_eq!(
            f.factor(&Perm::from_cycles(4, &[&[0, 1]]).unwrap()),
            Err(Error::NotInGeneratedGroup)
        );
    }
}
