//! Finite checks for the commutator-generation and simplicity steps.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::bsgs::Bsgs;
use super::perm::{alternating_order, Perm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub points: usize,
    /// Order of the generated group, decimal.
    pub order: String,
    /// `|Alt(points)|`, computed independently as `points!/2`.
    pub expected: String,
    pub holds: bool,
}

fn three_cycles(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            for c in b + 1..n as u32 {
                out.push(Perm::from_cycles(n, &[&[a, b, c]]).unwrap());
                out.push(Perm::from_cycles(n, &[&[a, c, b]]).unwrap());
            }
        }
    }
    out
}

/// Checks that commutators of even permutations supported on a family of
/// `family_size` words generate the whole alternating group on that family.
///
/// Commutators `[x, y]` are taken over `x` in the generators `(0 1 j)` and
/// `y` over all 3-cycles, and their group is computed by Schreier–Sims.
pub fn commutator_generation_check(family_size: usize) -> Result<GenerationReport> {
    if family_size < 5 {
        return Err(Error::FamilyTooSmall(family_size));
    }
    let n = family_size;
    let left: Vec<Perm> = (2..n as u32)
        .map(|j| Perm::from_cycles(n, &[&[0, 1, j]]).unwrap())
        .collect();
    let right = three_cycles(n);
    let mut gens = Vec::new();
    for x in &left {
        for y in &right {
            let c = x.commutator(y)?;
            if !c.is_identity() && !gens.contains(&c) {
                gens.push(c);
            }
        }
    }
    let group = Bsgs::new(n, &gens);
    let order = group.order();
    let expected = alternating_order(n);
    Ok(GenerationReport {
        points: n,
        holds: order == expected,
        order: order.to_string(),
        expected: expected.to_string(),
    })
}

/// Normal closure of `seed` under `Alt({0,1}^ℓ)`.
///
/// Requires `ℓ ≥ 3` (so the domain has at least 5 points) and an even seed;
/// domains above `2^max_ell` are refused.
pub fn normal_closure_check(ell: u32, seed: &Perm, max_ell: u32) -> Result<GenerationReport> {
    if ell < 3 {
        return Err(Error::Precondition(format!(
            "ℓ = {ell}: Alt of {} points is not simple",
            1u32 << ell
        )));
    }
    if ell > max_ell {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << ell,
            budget: 1 << max_ell,
        });
    }
    let n = 1usize << ell;
    if seed.degree() != n {
        return Err(Error::WidthMismatch(seed.width().unwrap_or(0), ell));
    }
    if !seed.is_even() {
        return Err(Error::NotEven);
    }
    let expected = alternating_order(n);
    let conjugators: Vec<Perm> = (2..n as u32)
        .map(|j| Perm::from_cycles(n, &[&[0, 1, j]]).unwrap())
        .collect();
    let mut gens = vec![seed.clone()];
    let mut closure = Bsgs::new(n, &gens);
    loop {
        let mut added = false;
        let current = gens.clone();
        for g in &current {
            for a in &conjugators {
                let c = g.conjugate_by(a)?;
                if !closure.contains(&c) {
                    gens.push(c);
                    closure = Bsgs::new(n, &gens);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let order: BigUint = closure.order();
    Ok(GenerationReport {
        points: n,
        holds: order == expected,
        order: order.to_string(),
        expected: expected.to_string(),
    })
}
