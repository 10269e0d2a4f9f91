//! Machine checks of the commutator and conjugation identities for
//! controlled permutations, and the offset-convention check built on them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::{Evaluator, Factor, ProductVerdict};
use super::{ww_control, CtrlDescriptor, OffsetConvention};
use crate::error::{Error, Result};
use crate::groups::perm::Perm;
use crate::words::{is_unbordered, MutuallyUnborderedFamily, Word};

/// How a group commutator is expanded into a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorExpansion {
    /// `[f, g] = f⁻¹ g⁻¹ f g`, the expansion used throughout.
    InverseFirst,
    /// `[f, g] = f g f⁻¹ g⁻¹`.
    InverseLast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    /// Verdict under the fixed expansion (`f⁻¹ g⁻¹ f g`, right-action
    /// conjugation `f^g = g⁻¹ f g`).
    pub verdict: ProductVerdict,
    /// Verdict under the mirrored expansion.
    pub alternate: ProductVerdict,
    /// Whether the supports of the permutations lie in the family, when one
    /// was supplied.
    pub precondition_ok: bool,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.verdict.is_equal()
    }

    /// Expansions under which the identity held.
    pub fn holding_expansions(&self) -> Vec<CommutatorExpansion> {
        let mut out = Vec::new();
        if self.verdict.is_equal() {
            out.push(CommutatorExpansion::InverseFirst);
        }
        if self.alternate.is_equal() {
            out.push(CommutatorExpansion::InverseLast);
        }
        out
    }
}

fn check_base(ev: &Evaluator, perms: &[&Perm]) -> Result<()> {
    let w = ev.base();
    if !is_unbordered(w) {
        return Err(Error::Precondition(format!("control word {w} is bordered")));
    }
    for p in perms {
        if p.width() != Some(w.len() as u32) {
            return Err(Error::WidthMismatch(p.width().unwrap_or(0), w.len() as u32));
        }
    }
    Ok(())
}

fn supported_in(p: &Perm, family: Option<&MutuallyUnborderedFamily>) -> bool {
    match family {
        None => true,
        Some(f) => {
            let pts = f.points();
            p.support().iter().all(|x| pts.contains(x))
        }
    }
}

fn ctrl(p: &Perm, w: &Word, i: i64) -> Result<Factor> {
    Ok(Factor::Ctrl(CtrlDescriptor::new(p.clone(), w.clone(), i)?))
}

/// `[ctrl π₁[w]_i, ctrl π₂[w]_{i+ℓ}]` against `ctrl [π₁,π₂][ww]_i`.
///
/// The supports of `π₁`, `π₂` are expected inside `family`; when they are
/// not, the check still runs and `precondition_ok` is false.
pub fn verify_commutator_identity(
    ev: &Evaluator,
    p1: &Perm,
    p2: &Perm,
    offset: i64,
    family: Option<&MutuallyUnborderedFamily>,
) -> Result<IdentityReport> {
    check_base(ev, &[p1, p2])?;
    let w = ev.base();
    let ell = w.len() as i64;
    let f = ctrl(p1, w, offset)?;
    let g = ctrl(p2, w, offset + ell)?;
    let (fi, gi) = (f.inverse(), g.inverse());

    let lhs = [fi.clone(), gi.clone(), f.clone(), g.clone()];
    let rhs = [Factor::Ctrl(ww_control(&p1.commutator(p2)?, w, offset)?)];
    let verdict = ev.compare(&lhs, &rhs)?;

    let mirrored = p1.then(p2).then(&p1.inverse()).then(&p2.inverse());
    let lhs = [f, g, fi, gi];
    let rhs = [Factor::Ctrl(ww_control(&mirrored, w, offset)?)];
    let alternate = ev.compare(&lhs, &rhs)?;

    Ok(IdentityReport {
        verdict,
        alternate,
        precondition_ok: supported_in(p1, family) && supported_in(p2, family),
    })
}

/// `(ctrl π₁[ww]_i)^{ctrl π₂[w]_i}` against `ctrl(π₁^{π₂})[ww]_i`.
pub fn verify_conjugation_identity(
    ev: &Evaluator,
    p1: &Perm,
    p2: &Perm,
    offset: i64,
) -> Result<IdentityReport> {
    check_base(ev, &[p1, p2])?;
    let w = ev.base();
    let big = Factor::Ctrl(ww_control(p1, w, offset)?);
    let g = ctrl(p2, w, offset)?;

    let lhs = [g.inverse(), big.clone(), g.clone()];
    let rhs = [Factor::Ctrl(ww_control(&p1.conjugate_by(p2)?, w, offset)?)];
    let verdict = ev.compare(&lhs, &rhs)?;

    let mirrored = p2.then(p1).then(&p2.inverse());
    let lhs = [g.clone(), big, g.inverse()];
    let rhs = [Factor::Ctrl(ww_control(&mirrored, w, offset)?)];
    let alternate = ev.compare(&lhs, &rhs)?;

    Ok(IdentityReport {
        verdict,
        alternate,
        precondition_ok: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionReport {
    /// `f₀^{σ₁} = ctrl F[w]_{-1}` held under the forward convention.
    pub forward_conjugate: bool,
    pub backward_conjugate: bool,
    /// The commutator identity held on the sampled instances.
    pub forward_commutator: bool,
    pub backward_commutator: bool,
    pub selected: Option<OffsetConvention>,
}

/// Decides which offset convention makes both `f₀^{σ₁} = ctrl F[w]_{-1}` and
/// the commutator identity hold.
///
/// `family` supplies the support for the commutator samples (3-cycles drawn
/// with `seed`); `q` is the control alphabet size.
pub fn select_offset_convention(
    f: &Perm,
    family: &MutuallyUnborderedFamily,
    q: usize,
    samples: usize,
    seed: u64,
) -> Result<ConventionReport> {
    let w = family.words()[0].clone();
    let pts = family.points();
    let run = |conv: OffsetConvention| -> Result<(bool, bool)> {
        let ev = Evaluator::new(w.clone(), q, conv)?;
        let f0 = ctrl(f, &w, 0)?;
        let conj = ev
            .compare(&[Factor::Shift(-1), f0, Factor::Shift(1)], &[ctrl(f, &w, -1)?])?
            .is_equal();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degree = 1usize << w.len();
        let mut comm = true;
        for _ in 0..samples {
            let p1 = Perm::random_three_cycle(degree, &pts, &mut rng);
            let p2 = Perm::random_three_cycle(degree, &pts, &mut rng);
            comm &= verify_commutator_identity(&ev, &p1, &p2, 0, Some(family))?.holds();
        }
        Ok((conj, comm))
    };
    let (fc, fm) = run(OffsetConvention::Forward)?;
    let (bc, bm) = run(OffsetConvention::Backward)?;
    let selected = match (fc && fm, bc && bm) {
        (false, true) => Some(OffsetConvention::Backward),
        (true, false) => Some(OffsetConvention::Forward),
        _ => None,
    };
    Ok(ConventionReport {
        forward_conjugate: fc,
        backward_conjugate: bc,
        forward_commutator: fm,
        backward_commutator: bm,
        selected,
    })
}
