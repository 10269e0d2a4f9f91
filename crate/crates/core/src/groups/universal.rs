//! Translate-generated gate groups and the finite-window search for
//! involutions whose translates generate large alternating groups.

use serde::{Deserialize, Serialize};

use super::bsgs::Bsgs;
use super::perm::Perm;
use crate::error::{Error, Result};

/// Largest window (in bits) a translate group may be built on by default.
pub const MAX_TRANSLATE_WIDTH: u32 = 10;

/// Copies of `f` placed at every offset `0 ..= m - n` on an `m`-bit window.
pub fn translates(f: &Perm, m: u32) -> Result<Vec<Perm>> {
    let n = f
        .width()
        .ok_or_else(|| Error::ParameterOutOfRange("F must act on bit strings".into()))?;
    if n > m {
        return Err(Error::ParameterOutOfRange(format!("width {n} > window {m}")));
    }
    (0..=m - n).map(|r| f.placed(r, m)).collect()
}

/// Group generated by the translates of `f` inside `{0,1}^m`.
pub fn translate_group(f: &Perm, m: u32) -> Result<Bsgs> {
    if m > MAX_TRANSLATE_WIDTH {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << m,
            budget: 1 << MAX_TRANSLATE_WIDTH,
        });
    }
    Ok(Bsgs::new(1 << m, &translates(f, m)?))
}

/// Lifts a permutation of the first `inner` bits to `{0,1}^outer`, leaving
/// the remaining bits untouched.
pub fn localize(p: &Perm, outer: u32) -> Result<Perm> {
    p.placed(0, outer)
}

/// Whether `group` (on `outer` bits) contains every even permutation of the
/// first `inner` bits, acting independently of the rest.
///
/// Tested on the generators `(0 1 j)`, `j ≥ 2`, of the inner alternating group.
pub fn contains_localized_alt(group: &Bsgs, inner: u32) -> bool {
    let outer = group.degree().trailing_zeros();
    if inner > outer || inner == 0 {
        return false;
    }
    let n = 1u32 << inner;
    if n < 3 {
        return true;
    }
    (2..n).all(|j| {
        let c = Perm::from_cycles(n as usize, &[&[0, 1, j]]).unwrap();
        group.contains(&localize(&c, outer).unwrap())
    })
}

/// All involutions (including the identity) of `{0, …, degree-1}` in a fixed
/// lexicographic enumeration order.
pub fn involutions(degree: usize) -> Vec<Perm> {
    fn rec(table: &mut Vec<u32>, next: usize, out: &mut Vec<Perm>) {
        let n = table.len();
        let Some(i) = (next..n).find(|&i| table[i] == u32::MAX) else {
            out.push(Perm::from_table(table.clone()).unwrap());
            return;
        };
        table[i] = i as u32;
        rec(table, i + 1, out);
        for j in i + 1..n {
            if table[j] == u32::MAX {
                table[i] = j as u32;
                table[j] = i as u32;
                rec(table, i + 1, out);
                table[j] = u32::MAX;
            }
        }
        table[i] = u32::MAX;
    }
    let mut out = Vec::new();
    rec(&mut vec![u32::MAX; degree], 0, &mut out);
    out
}

/// A searched involution and what was verified about it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvolutionCandidate {
    pub map: Vec<u32>,
    pub width: u32,
    pub test_width: u32,
    pub inner_width: u32,
    /// Order of the translate group on the test window, in decimal.
    pub group_order: String,
    /// Passed the localized-alternating membership tests on the test window.
    /// This is finite evidence only.
    pub verified: bool,
}

impl InvolutionCandidate {
    pub fn perm(&self) -> Perm {
        Perm::from_table(self.map.clone()).unwrap()
    }
}

fn orbit_size(degree: usize, gens: &[Perm], start: u32) -> usize {
    let mut seen = vec![false; degree];
    seen[start as usize] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count
}

/// Involutions `F` of width `n` whose translates on `m_test` bits contain the
/// alternating group of the first `m_test - 2` bits.
///
/// At most `budget` non-identity involutions are examined, in enumeration
/// order; `max_results` stops the search early.
pub fn search_universal_involution(
    n: u32,
    m_test: u32,
    budget: usize,
    max_results: usize,
) -> Result<Vec<InvolutionCandidate>> {
    if n > m_test {
        return Err(Error::ParameterOutOfRange(format!("n = {n} > m_test = {m_test}")));
    }
    if n > 3 {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << n,
            budget: 8,
        });
    }
    let inner = m_test.saturating_sub(2).max(1);
    let mut found = Vec::new();
    for f in involutions(1 << n)
        .into_iter()
        .filter(|f| !f.is_identity())
        .take(budget)
    {
        let gens = translates(&f, m_test)?;
        if orbit_size(1 << m_test, &gens, 0) < 1 << inner {
            continue;
        }
        let group = Bsgs::new(1 << m_test, &gens);
        if contains_localized_alt(&group, inner) {
            found.push(InvolutionCandidate {
                map: f.table().to_vec(),
                width: n,
                test_width: m_test,
                inner_width: inner,
                group_order: group.order().to_string(),
                verified: true,
            });
            if found.len() >= max_results {
                break;
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoneFoundWithinBudget(budget));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::gates::{cnot_gate, swap_gate, toffoli_gate};
    use num_bigint::BigUint;

    #[test]
    fn involution_counts() {
        // telephone numbers
        assert_eq!(involutions(4).len(), 10);
        assert_eq!(involutions(8).len(), 764);
        assert!(involutions(8).iter().all(|f| f.then(f).is_identity()));
    }

    #[test]
    fn bit_swap_translates_permute_coordinates() {
        let g = translate_group(&swap_gate(), 3).unwrap();
        assert_eq!(g.order(), BigUint::from(6u32));
    }

    #[test]
    fn cnot_alone() {
        let g = translate_group(&cnot_gate(), 2).unwrap();
        assert_eq!(g.order(), BigUint::from(2u32));
    }

    #[test]
    fn toffoli_translates_fix_zero() {
        let g = translate_group(&toffoli_gate(), 4).unwrap();
        assert_eq!(g.orbit_of(0), vec![0]);
    }

    #[test]
    fn localized_alt() {
        let alt = Bsgs::new(
            16,
            &[
                Perm::from_cycles(16, &[&[0, 1, 2]]).unwrap(),
                Perm::from_cycles(16, &[&(1..16).collect::<Vec<u32>>()]).unwrap(),
            ],
        );
        assert!(contains_localized_alt(&alt, 4));
        let t = Bsgs::new(4, &[Perm::transposition(4, 0, 1)]);
        assert!(!contains_localized_alt(&t, 2));
    }

    #[test]
    fn width_one_finds_nothing() {
        assert_eq!(
            search_universal_involution(1, 4, 10, 10).unwrap_err(),
            Error::NoneFoundWithinBudget(10)
        );
    }
}
