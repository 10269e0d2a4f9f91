//! Single-purpose subcommands. Each returns a serializable value that `main`
//! prints as JSON.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rcalab_core::groups::universal::{search_universal_involution, InvolutionCandidate};
use rcalab_core::groups::{CertParams, Certifier, Decomposer, GateSequence, GateSet};
use rcalab_core::words::{enumerate_unbordered, formula_family, sparse_ones_family};
use rcalab_core::{CtrlDescriptor, GenWordCert, MutuallyUnborderedFamily, OffsetConvention, Perm, Word};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct WordsOutput {
    pub ell: usize,
    pub count: usize,
    pub unbordered: Vec<Word>,
    /// Absent when `k` violates the length bound.
    pub formula_family: Option<MutuallyUnborderedFamily>,
    pub sparse_family: Option<MutuallyUnborderedFamily>,
}

pub fn words(ell: usize, k: u32, budget: u64) -> Result<WordsOutput, CliError> {
    if ell == 0 || ell > 24 {
        return Err(CliError::ConfigInvalid(format!("ℓ = {ell} must be in 1..=24")));
    }
    let unbordered = enumerate_unbordered(ell, 2, budget)?;
    Ok(WordsOutput {
        ell,
        count: unbordered.len(),
        unbordered,
        formula_family: formula_family(ell, k).ok(),
        sparse_family: sparse_ones_family(ell).ok(),
    })
}

#[derive(Debug, Serialize)]
pub struct DecomposeOutput {
    pub target: Perm,
    pub gates: String,
    pub length: usize,
    pub sequence: GateSequence,
    pub replay_verified: bool,
}

/// Decomposes `target`, or a seeded random even permutation of `width` bits.
pub fn decompose(
    target: Option<Perm>,
    width: u32,
    gates: &str,
    seed: u64,
) -> Result<DecomposeOutput, CliError> {
    let set = GateSet::by_name(gates)?;
    let target = match target {
        Some(p) => p,
        None => {
            if !(2..=8).contains(&width) {
                return Err(CliError::ConfigInvalid(format!("width {width} must be in 2..=8")));
            }
            Perm::random_even(1 << width, &mut ChaCha8Rng::seed_from_u64(seed))
        }
    };
    let width = target.width().ok_or_else(|| {
        CliError::ConfigInvalid(format!("degree {} is not a power of two", target.degree()))
    })?;
    let sequence = Decomposer::new(&set, width, seed)?.decompose(&target)?;
    let replay_verified = set.replay(&sequence, width)? == target;
    Ok(DecomposeOutput {
        target,
        gates: gates.to_string(),
        length: sequence.len(),
        sequence,
        replay_verified,
    })
}

pub fn search_involution(
    n: u32,
    test_width: u32,
    limit: usize,
    max_results: usize,
) -> Result<Vec<InvolutionCandidate>, CliError> {
    Ok(search_universal_involution(n, test_width, limit, max_results)?)
}

/// Certificate for `target`. A control word of the form `ww` is certified
/// against `w`, with a family of `ℓ`-bit words for the commutator step.
pub fn certify(
    target: &CtrlDescriptor,
    involution: Option<Perm>,
    n: u32,
    seed: u64,
) -> Result<GenWordCert, CliError> {
    let f = match involution {
        Some(f) => f,
        None => search_universal_involution(n, n + 3, 1000, 1)?
            .first()
            .map(InvolutionCandidate::perm)
            .ok_or(rcalab_core::Error::NoneFoundWithinBudget(1000))?,
    };
    let control = target.control();
    let half = control.len() / 2;
    let symbols = control.symbols();
    let (w, family) = if control.len().is_multiple_of(2) && symbols[..half] == symbols[half..] {
        let w = Word::new(symbols[..half].to_vec())?;
        let family = formula_family(half, 3).or_else(|_| sparse_ones_family(half))?;
        (w, Some(family))
    } else {
        (control.clone(), None)
    };
    let certifier = Certifier::new(CertParams {
        w,
        f,
        q: 2,
        convention: OffsetConvention::Backward,
        family,
        seed,
    })?;
    Ok(certifier.certify(target)?)
}
