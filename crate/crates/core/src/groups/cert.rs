//! Generator-word certificates: explicit words in `σ₁^{±1}` and
//! `f₀ = ctrl(F)[w]_0` that evaluate to a requested ctrl map.
//!
//! A `w`-controlled target is reached by factoring its window permutation
//! over the translates of `F` and spelling each translate as a conjugate of
//! `f₀` by a power of `σ₁`. A `ww`-controlled target is split into 3-cycles,
//! each obtained from commutators of `w`-controlled 3-cycles on the family
//! `U` and then moved into place by conjugation.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::factor::Factorizer;
use super::perm::Perm;
use super::universal::translates;
use crate::ctrl::{
    conjugate_offset, ww_control, CtrlDescriptor, Evaluator, Factor, OffsetConvention,
    ProductVerdict,
};
use crate::error::{Error, Result};
use crate::generators::{factors_to_word, GenWordCert, ReplayPolicy, StageRecord};
use crate::words::{is_unbordered, MutuallyUnborderedFamily, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertParams {
    pub w: Word,
    /// The involution `F` of `{0,1}^n`.
    pub f: Perm,
    /// Size of the control track alphabet.
    pub q: usize,
    pub convention: OffsetConvention,
    /// Needed only for `ww`-controlled targets.
    pub family: Option<MutuallyUnborderedFamily>,
    pub seed: u64,
}

/// Builds certificates for one parameter set, keeping the translate-group
/// factorizer between targets.
pub struct Certifier {
    params: CertParams,
    ell: u32,
    f0: CtrlDescriptor,
    evaluator: Evaluator,
    gens: Vec<Perm>,
    factorizer: OnceLock<std::result::Result<Factorizer, Error>>,
}

fn push(out: &mut Vec<Factor>, f: Factor) {
    if let Factor::Shift(t) = f {
        if t == 0 {
            return;
        }
        if let Some(Factor::Shift(prev)) = out.last_mut() {
            *prev += t;
            if *prev == 0 {
                out.pop();
            }
            return;
        }
    }
    out.push(f);
}

fn extend(out: &mut Vec<Factor>, fs: &[Factor]) {
    for f in fs {
        push(out, f.clone());
    }
}

fn invert(fs: &[Factor]) -> Vec<Factor> {
    fs.iter().rev().map(Factor::inverse).collect()
}

fn require_equal(v: ProductVerdict, stage: &str, what: String) -> Result<()> {
    if v.is_equal() {
        Ok(())
    } else {
        Err(Error::NotReachable {
            stage: stage.into(),
            reason: format!("{what}: {v:?}"),
        })
    }
}

/// Writes an even permutation as a left-first product of 3-cycles.
pub fn three_cycle_factors(p: &Perm) -> Result<Vec<[u32; 3]>> {
    if !p.is_even() {
        return Err(Error::NotEven);
    }
    let mut g = p.clone();
    let mut tail = Vec::new();
    while !g.is_identity() {
        let moved: Vec<u32> = g.support().into_iter().collect();
        let x = moved[0];
        let y = g.apply(x);
        let z = *moved
            .iter()
            .find(|&&z| z != x && z != y)
            .expect("an even non-identity permutation moves at least three points");
        let c = Perm::from_cycles(g.degree(), &[&[x, y, z]])?;
        // g = g' then c, with g' fixing x and everything g fixes
        g = g.then(&c.inverse());
        tail.push([x, y, z]);
    }
    tail.reverse();
    Ok(tail)
}

/// An even permutation sending `from[k]` to `to[k]`.
fn even_extension(from: &[u32; 3], to: &[u32; 3], degree: usize) -> Perm {
    let mut table: Vec<u32> = (0..degree as u32).collect();
    for k in 0..3 {
        let u = from[k] as usize;
        let p = table.iter().position(|&v| v == to[k]).unwrap();
        table.swap(u, p);
    }
    let mut rho = Perm::from_table(table).unwrap();
    if !rho.is_even() {
        let free: Vec<u32> = (0..degree as u32)
            .filter(|x| !from.contains(x))
            .take(2)
            .collect();
        rho = Perm::transposition(degree, free[0], free[1]).then(&rho);
    }
    rho
}

impl Certifier {
    pub fn new(params: CertParams) -> Result<Self> {
        if !is_unbordered(&params.w) {
            return Err(Error::Precondition(format!("control word {} is bordered", params.w)));
        }
        if !params.f.then(&params.f).is_identity() {
            return Err(Error::Precondition("F is not an involution".into()));
        }
        let ell = params.w.len() as u32;
        let f0 = CtrlDescriptor::new(params.f.clone(), params.w.clone(), 0)?;
        let evaluator = Evaluator::new(params.w.clone(), params.q, params.convention)?;
        let gens = translates(&params.f, ell)?;
        Ok(Certifier {
            params,
            ell,
            f0,
            evaluator,
            gens,
            factorizer: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &CertParams {
        &self.params
    }

    pub fn f0(&self) -> &CtrlDescriptor {
        &self.f0
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    /// Translate-group factorizer, built on first use.
    pub fn factorizer(&self) -> Result<&Factorizer> {
        self.factorizer
            .get_or_init(|| Factorizer::new(&self.gens, self.params.seed))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `f₀` conjugated so that its window starts at `start`.
    fn conjugate(&self, start: i64) -> Vec<Factor> {
        let mut out = Vec::new();
        push(&mut out, Factor::Shift(-start));
        push(&mut out, Factor::Ctrl(self.f0.clone()));
        push(&mut out, Factor::Shift(start));
        out
    }

    fn window_start(&self, offset: i64) -> i64 {
        self.params.convention.window_start(offset)
    }

    /// Stage 1: each translate of `F` in the window at `start` is the
    /// matching conjugate of `f₀`.
    fn check_conjugates(&self, start: i64) -> Result<StageRecord> {
        let w = &self.params.w;
        for (r, g) in self.gens.iter().enumerate() {
            let at = start + r as i64;
            let direct = conjugate_offset(&self.f0, -at, self.params.convention);
            let window_offset = conjugate_offset(&self.f0, -start, self.params.convention).offset();
            let placed = CtrlDescriptor::new(g.clone(), w.clone(), window_offset)?;
            let v = self.evaluator.compare(&self.conjugate(at), &[Factor::Ctrl(direct)])?;
            require_equal(v, "conjugates", format!("f₀ conjugated to cell {at}"))?;
            let v = self.evaluator.compare(&self.conjugate(at), &[Factor::Ctrl(placed)])?;
            require_equal(v, "conjugates", format!("translate {r} in window at {start}"))?;
        }
        Ok(StageRecord {
            stage: "conjugates".into(),
            checks: 2 * self.gens.len(),
            detail: format!("f₀^(σ₁^j) for j in {start}..={}", start + self.gens.len() as i64 - 1),
        })
    }

    /// Stage 2: a product for `ctrl(π)[w]` with `π` on `ℓ` bits and the
    /// window at `start`.
    fn window_product(&self, pi: &Perm, start: i64) -> Result<(Vec<Factor>, StageRecord)> {
        let mut out = Vec::new();
        if pi.is_identity() {
            return Ok((out, StageRecord {
                stage: "factorization".into(),
                checks: 0,
                detail: "identity window permutation".into(),
            }));
        }
        if let Some(r) = self.gens.iter().position(|g| g == pi) {
            extend(&mut out, &self.conjugate(start + r as i64));
            return Ok((out, StageRecord {
                stage: "factorization".into(),
                checks: 1,
                detail: format!("single translate at bit {r}"),
            }));
        }
        let fz = self.factorizer()?;
        let letters = fz.factor(pi).map_err(|e| match e {
            Error::NotInGeneratedGroup => Error::NotReachable {
                stage: "factorization".into(),
                reason: format!(
                    "window permutation outside the translate group of order {}",
                    fz.bsgs().order()
                ),
            },
            e => e,
        })?;
        for l in &letters {
            // translates of an involution are involutions, so inverse letters
            // spell the same conjugate
            extend(&mut out, &self.conjugate(start + l.gen as i64));
        }
        Ok((out, StageRecord {
            stage: "factorization".into(),
            checks: 1,
            detail: format!("{} translate letters, replay checked", letters.len()),
        }))
    }

    fn w_target(&self, target: &CtrlDescriptor) -> Result<(Vec<Factor>, Vec<StageRecord>)> {
        let pi = target.perm().placed(0, self.ell)?;
        let start = self.window_start(target.offset());
        let s1 = self.check_conjugates(start)?;
        let (fs, s2) = self.window_product(&pi, start)?;
        Ok((fs, vec![s1, s2]))
    }

    fn ww_target(&self, target: &CtrlDescriptor) -> Result<(Vec<Factor>, Vec<StageRecord>)> {
        let family = self.params.family.as_ref().ok_or_else(|| {
            Error::Precondition("ww-controlled targets need a mutually unbordered family".into())
        })?;
        if family.len() < 5 {
            return Err(Error::FamilyTooSmall(family.len()));
        }
        if family.word_len() != self.ell as usize {
            return Err(Error::WidthMismatch(family.word_len() as u32, self.ell));
        }
        let w = &self.params.w;
        let ell = self.ell as i64;
        let offset = target.offset();
        let pi = target.perm().placed(0, self.ell)?;
        if !pi.is_even() {
            return Err(Error::NotReachable {
                stage: "parity".into(),
                reason: "ww-controlled targets are reached for even window permutations only".into(),
            });
        }
        let cycles = three_cycle_factors(&pi)?;
        let degree = 1usize << self.ell;
        let u: Vec<u32> = family.points();
        let on_u: Vec<Perm> = {
            let mut v = Vec::new();
            for a in 0..u.len() {
                for b in 0..u.len() {
                    for c in 0..u.len() {
                        if a < b && a < c && b != c {
                            v.push(Perm::from_cycles(degree, &[&[u[a], u[b], u[c]]])?);
                        }
                    }
                }
            }
            v
        };

        let mut stages = Vec::new();
        let mut out = Vec::new();
        let mut identity_checks = 0;
        let mut seen_starts = std::collections::BTreeSet::new();
        let mut window = |d: &CtrlDescriptor, stages: &mut Vec<StageRecord>| -> Result<Vec<Factor>> {
            let (fs, recs) = self.w_target(d)?;
            let v = self.evaluator.compare(&fs, &[Factor::Ctrl(d.clone())])?;
            require_equal(v, "factorization", format!("ctrl {:?} at offset {}", d.perm(), d.offset()))?;
            if seen_starts.insert(self.window_start(d.offset())) {
                stages.extend(recs);
            }
            Ok(fs)
        };

        for c in &cycles {
            let cp = Perm::from_cycles(degree, &[&c[..]])?;
            let (tau, rho) = if c.iter().all(|x| u.contains(x)) {
                (cp.clone(), None)
            } else {
                let tau = Perm::from_cycles(degree, &[&[u[0], u[1], u[2]]])?;
                let mut rho = even_extension(&[u[0], u[1], u[2]], c, degree);
                if tau.conjugate_by(&rho)? != cp {
                    rho = rho.inverse();
                }
                if tau.conjugate_by(&rho)? != cp {
                    return Err(Error::Precondition("conjugator construction failed".into()));
                }
                (tau, Some(rho))
            };
            let (alpha, beta) = on_u
                .iter()
                .flat_map(|a| on_u.iter().map(move |b| (a, b)))
                .find(|(a, b)| a.commutator(b).map(|x| x == tau).unwrap_or(false))
                .ok_or_else(|| Error::NotReachable {
                    stage: "commutator".into(),
                    reason: format!("no 3-cycles on U with commutator {tau:?}"),
                })?;

            // [ctrl α[w]_i, ctrl β[w]_{i+ℓ}] = ctrl [α,β][ww]_i
            let fa = CtrlDescriptor::new(alpha.clone(), w.clone(), offset)?;
            let fb = CtrlDescriptor::new(beta.clone(), w.clone(), offset + ell)?;
            let comm = [
                Factor::Ctrl(fa.inverse()),
                Factor::Ctrl(fb.inverse()),
                Factor::Ctrl(fa.clone()),
                Factor::Ctrl(fb.clone()),
            ];
            let tau_ww = ww_control(&tau, w, offset)?;
            let v = self.evaluator.compare(&comm, &[Factor::Ctrl(tau_ww.clone())])?;
            require_equal(v, "commutator", format!("[α, β] = {tau:?}"))?;
            identity_checks += 1;

            let wa = window(&fa, &mut stages)?;
            let wb = window(&fb, &mut stages)?;
            let mut piece = Vec::new();
            extend(&mut piece, &invert(&wa));
            extend(&mut piece, &invert(&wb));
            extend(&mut piece, &wa);
            extend(&mut piece, &wb);

            if let Some(rho) = rho {
                let g = CtrlDescriptor::new(rho.clone(), w.clone(), offset)?;
                let conj = [
                    Factor::Ctrl(g.inverse()),
                    Factor::Ctrl(tau_ww),
                    Factor::Ctrl(g.clone()),
                ];
                let v = self
                    .evaluator
                    .compare(&conj, &[Factor::Ctrl(ww_control(&cp, w, offset)?)])?;
                require_equal(v, "conjugation", format!("τ^ρ = {cp:?}"))?;
                identity_checks += 1;
                let wr = window(&g, &mut stages)?;
                let mut moved = Vec::new();
                extend(&mut moved, &invert(&wr));
                extend(&mut moved, &piece);
                extend(&mut moved, &wr);
                piece = moved;
            }
            extend(&mut out, &piece);
        }
        stages.push(StageRecord {
            stage: "ww identities".into(),
            checks: identity_checks,
            detail: format!("{} three-cycles", cycles.len()),
        });
        Ok((out, stages))
    }

    /// Builds and verifies a certificate for `target`.
    pub fn certify(&self, target: &CtrlDescriptor) -> Result<GenWordCert> {
        let w = &self.params.w;
        if target.width() > self.ell {
            return Err(Error::WidthMismatch(target.width(), self.ell));
        }
        let (factors, mut stages) = if target.control() == w {
            self.w_target(target)?
        } else if *target.control() == w.repeat(2) {
            self.ww_target(target)?
        } else {
            return Err(Error::UnsupportedFactor(format!(
                "control word {} is neither {w} nor {w}{w}",
                target.control()
            )));
        };
        let word = factors_to_word(&factors, &self.f0)?;
        let v = self.evaluator.compare(&factors, &[Factor::Ctrl(target.clone())])?;
        let verified = v.is_equal();
        stages.push(StageRecord {
            stage: "replay".into(),
            checks: usize::from(verified),
            detail: format!("{} letters, {} f₀ factors: {v:?}", word.len(), factors.iter().filter(|f| matches!(f, Factor::Ctrl(_))).count()),
        });
        Ok(GenWordCert {
            word,
            target: target.clone(),
            verified,
            policy: ReplayPolicy::AlignedEvaluator,
            f0: self.f0.clone(),
            convention: self.params.convention,
            stages,
        })
    }
}

/// One-shot form of [`Certifier::certify`].
pub fn generator_word_certificate(target: &CtrlDescriptor, params: &CertParams) -> Result<GenWordCert> {
    Certifier::new(params.clone())?.certify(target)
}
