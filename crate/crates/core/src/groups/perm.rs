//! Permutations of finite point sets stored as explicit image tables.
//!
//! Points of `{0,1}^k` are encoded as integers with the leftmost cell as the
//! most significant bit. Products are written left to right and applied
//! left factor first: `a.then(&b)` maps `x` to `b(a(x))`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermFile", into = "PermFile")]
pub struct Perm {
    table: Vec<u32>,
}

/// On-disk form `{width, map}`; `width` is absent for domains that are not
/// bit strings.
#[derive(Serialize, Deserialize)]
struct PermFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<u32>,
    map: Vec<u32>,
}

impl TryFrom<PermFile> for Perm {
    type Error = Error;
    fn try_from(f: PermFile) -> Result<Self> {
        if let Some(k) = f.width {
            if k >= 32 || f.map.len() != 1usize << k {
                return Err(Error::Parse {
                    location: "width".into(),
                    message: format!("map has {} entries, width {k} needs 2^{k}", f.map.len()),
                });
            }
        }
        Perm::from_table(f.map)
    }
}

impl From<Perm> for PermFile {
    fn from(p: Perm) -> Self {
        PermFile {
            width: p.width(),
            map: p.table,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "Perm({}; id)", self.degree());
        }
        write!(f, "Perm({}; ", self.degree())?;
        for c in self.cycles() {
            let parts: Vec<String> = c.iter().map(u32::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        write!(f, ")")
    }
}

/// Lengths of all cycles (fixed points included) of a bijective table.
pub fn cycle_lengths(table: &[u32]) -> Vec<usize> {
    let mut seen = vec![false; table.len()];
    let mut out = Vec::new();
    for start in 0..table.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = table[x] as usize;
            len += 1;
        }
        out.push(len);
    }
    out
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            table: (0..degree as u32).collect(),
        }
    }

    /// The identity on `{0,1}^width`.
    pub fn identity_bits(width: u32) -> Self {
        Self::identity(1usize << width)
    }

    pub fn from_table(table: Vec<u32>) -> Result<Self> {
        let n = table.len();
        let mut hit = vec![false; n];
        for (i, &t) in table.iter().enumerate() {
            let t = t as usize;
            if t >= n || hit[t] {
                return Err(Error::Parse {
                    location: format!("map[{i}]"),
                    message: "table is not a bijection".into(),
                });
            }
            hit[t] = true;
        }
        Ok(Perm { table })
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut table: Vec<u32> = (0..degree as u32).collect();
        for c in cycles {
            for (k, &p) in c.iter().enumerate() {
                if p as usize >= degree {
                    return Err(Error::ParameterOutOfRange(format!("point {p} ≥ {degree}")));
                }
                table[p as usize] = c[(k + 1) % c.len()];
            }
        }
        Self::from_table(table)
    }

    pub fn transposition(degree: usize, a: u32, b: u32) -> Self {
        let mut table: Vec<u32> = (0..degree as u32).collect();
        table.swap(a as usize, b as usize);
        Perm { table }
    }

    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        let mut table: Vec<u32> = (0..degree as u32).collect();
        table.shuffle(rng);
        Perm { table }
    }

    /// Uniformly random even permutation (`degree ≥ 2`).
    pub fn random_even<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        let mut p = Self::random(degree, rng);
        if p.parity() == Parity::Odd {
            p.table.swap(0, 1);
        }
        p
    }

    /// Random 3-cycle on three distinct points drawn from `points`.
    pub fn random_three_cycle<R: Rng + ?Sized>(degree: usize, points: &[u32], rng: &mut R) -> Self {
        let pick: Vec<u32> = points.choose_multiple(rng, 3).copied().collect();
        Self::from_cycles(degree, &[&pick]).expect("points in range")
    }

    pub fn degree(&self) -> usize {
        self.table.len()
    }

    /// `Some(k)` when the degree is `2^k`.
    pub fn width(&self) -> Option<u32> {
        let n = self.table.len();
        n.is_power_of_two().then(|| n.trailing_zeros())
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &t)| i as u32 == t)
    }

    /// Left-to-right product: apply `self`, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            table: self.table.iter().map(|&x| other.table[x as usize]).collect(),
        }
    }

    pub fn try_then(&self, other: &Perm) -> Result<Perm> {
        self.same_degree(other)?;
        Ok(self.then(other))
    }

    pub fn inverse(&self) -> Perm {
        let mut table = vec![0u32; self.table.len()];
        for (i, &t) in self.table.iter().enumerate() {
            table[t as usize] = i as u32;
        }
        Perm { table }
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            out = out.then(&base);
        }
        out
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, other: &Perm) -> Result<Perm> {
        self.same_degree(other)?;
        Ok(self
            .inverse()
            .then(&other.inverse())
            .then(self)
            .then(other))
    }

    /// `a^b = b⁻¹ a b`.
    pub fn conjugate_by(&self, other: &Perm) -> Result<Perm> {
        self.same_degree(other)?;
        Ok(other.inverse().then(self).then(other))
    }

    fn same_degree(&self, other: &Perm) -> Result<()> {
        if self.degree() != other.degree() {
            return match (self.width(), other.width()) {
                (Some(a), Some(b)) => Err(Error::WidthMismatch(a, b)),
                _ => Err(Error::DomainMismatch(self.degree(), other.degree())),
            };
        }
        Ok(())
    }

    pub fn parity(&self) -> Parity {
        let transpositions: usize = cycle_lengths(&self.table).iter().map(|c| c - 1).sum();
        if transpositions.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Moved points.
    pub fn support(&self) -> BTreeSet<u32> {
        self.table
            .iter()
            .enumerate()
            .filter(|&(i, &t)| i as u32 != t)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Nontrivial cycles, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.table.len()];
        let mut out = Vec::new();
        for start in 0..self.table.len() {
            if seen[start] || self.table[start] as usize == start {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x as u32);
                x = self.table[x] as usize;
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for c in cycle_lengths(&self.table) {
            let c = BigUint::from(c);
            let g = num_integer_gcd(&acc, &c);
            acc = acc * &c / g;
        }
        acc
    }

    /// Places a permutation of `{0,1}^k` on bits `offset .. offset + k`
    /// (counted from the left) of `{0,1}^total`, acting as identity elsewhere.
    pub fn placed(&self, offset: u32, total: u32) -> Result<Perm> {
        let k = self
            .width()
            .ok_or_else(|| Error::ParameterOutOfRange("degree is not a power of two".into()))?;
        if offset + k > total {
            return Err(Error::ParameterOutOfRange(format!(
                "window {offset}..{} exceeds {total} bits",
                offset + k
            )));
        }
        let shift = total - offset - k;
        let mask = (1u32 << k) - 1;
        let table = (0..1u32 << total)
            .map(|x| {
                let inner = (x >> shift) & mask;
                let image = self.table[inner as usize];
                (x & !(mask << shift)) | (image << shift)
            })
            .collect();
        Ok(Perm { table })
    }

    /// Restricts to `points` (which must be invariant) and relabels them `0..len`.
    pub fn restrict(&self, points: &[u32]) -> Result<Perm> {
        let index: std::collections::HashMap<u32, u32> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let table = points
            .iter()
            .map(|&p| {
                index.get(&self.apply(p)).copied().ok_or_else(|| {
                    Error::Precondition(format!("point set not invariant at {p}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Perm { table })
    }

    /// Inverse of [`restrict`]: lifts a permutation of `0..points.len()` to
    /// one of `0..degree` acting on `points`.
    pub fn lift(&self, points: &[u32], degree: usize) -> Perm {
        let mut table: Vec<u32> = (0..degree as u32).collect();
        for (i, &p) in points.iter().enumerate() {
            table[p as usize] = points[self.table[i] as usize];
        }
        Perm { table }
    }
}

fn num_integer_gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while b != BigUint::from(0u32) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// `n!/2` computed directly, used as an independent cross-check of BSGS orders.
pub fn alternating_order(n: usize) -> BigUint {
    let fact: BigUint = (1..=n as u64).map(BigUint::from).product();
    if n >= 2 {
        fact / 2u32
    } else {
        fact
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basic_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Perm::random(16, &mut rng);
        assert!(p.commutator(&p).unwrap().is_identity());
        assert_eq!(Perm::transposition(4, 0, 1).parity(), Parity::Odd);
        let c = Perm::from_cycles(8, &[&[1, 4, 6]]).unwrap();
        assert_eq!(c.support().len(), 3);
        assert!(c.is_even());
        assert_eq!(c.order(), BigUint::from(3u32));
    }

    #[test]
    fn application_order_is_left_first() {
        let a = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.then(&b).apply(0), 2);
    }

    #[test]
    fn width_mismatch() {
        let a = Perm::identity_bits(2);
        let b = Perm::identity_bits(3);
        assert_eq!(a.commutator(&b), Err(Error::WidthMismatch(2, 3)));
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_table(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn placement_uses_leftmost_msb() {
        // NOT on the leftmost of three bits flips the value by 4.
        let not = Perm::from_table(vec![1, 0]).unwrap();
        let p = not.placed(0, 3).unwrap();
        assert_eq!(p.apply(0b000), 0b100);
        let q = not.placed(2, 3).unwrap();
        assert_eq!(q.apply(0b000), 0b001);
    }

    #[test]
    fn alt_orders() {
        assert_eq!(alternating_order(5), BigUint::from(60u32));
        assert_eq!(alternating_order(16), BigUint::from(10461394944000u64));
    }

    proptest! {
        #[test]
        fn inverse_and_parity_are_consistent(seed in any::<u64>(), n in 2usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Perm::random(n, &mut rng);
            let b = Perm::random(n, &mut rng);
            prop_assert!(a.then(&a.inverse()).is_identity());
            let ab = a.then(&b);
            prop_assert_eq!(ab.is_even(), a.is_even() == b.is_even());
            prop_assert!(a.commutator(&b).unwrap().is_even());
            prop_assert!(Perm::random_even(n, &mut rng).is_even());
        }
    }
}
