//! Controlled permutations `ctrl(π)[u]_i`.
//!
//! `ctrl(π)[u]_i` leaves the control track alone and, at every occurrence of
//! `u` on the control track, applies `π` to a window of the target track.
//! Where that window sits relative to the occurrence is fixed by an
//! [`OffsetConvention`].

mod eval;
mod identities;

pub use eval::{
    invert_product, AlignedNormalForm, Block, ComponentAction, Evaluator, Factor, PatternForm,
    ProductVerdict,
};
pub use identities::{
    select_offset_convention, verify_commutator_identity, verify_conjugation_identity,
    CommutatorExpansion, ConventionReport, IdentityReport,
};

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::blockmap::{self, BlockMap};
use crate::error::{Error, Result};
use crate::groups::perm::Perm;
use crate::words::Word;

/// Placement of the window relative to an occurrence of the control word at `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(Default)]
pub enum OffsetConvention {
    /// Window starts at `p + i`.
    Forward,
    /// Window starts at `p - i`: the control word sits `i` cells right of
    /// the window start. Under this reading conjugating by `σ₁^j` adds `j`
    /// to the offset and `f₀^{σ₁^i} = ctrl(F)[w]_{-i}` with right actions.
    #[default]
    Backward,
}

impl OffsetConvention {
    /// Window start relative to the occurrence position.
    pub fn window_start(self, offset: i64) -> i64 {
        match self {
            OffsetConvention::Forward => offset,
            OffsetConvention::Backward => -offset,
        }
    }

    fn offset_for_start(self, start: i64) -> i64 {
        match self {
            OffsetConvention::Forward => start,
            OffsetConvention::Backward => -start,
        }
    }
}


/// Which tracks of the alphabet carry the control word and the window bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtrlLayout {
    pub alphabet: Alphabet,
    pub control_track: usize,
    pub target_track: usize,
}

impl CtrlLayout {
    pub fn new(alphabet: Alphabet, control_track: usize, target_track: usize) -> Result<Self> {
        let n = alphabet.num_tracks();
        if control_track >= n || target_track >= n || control_track == target_track {
            return Err(Error::ParameterOutOfRange("bad track indices".into()));
        }
        if alphabet.tracks()[target_track] != 2 {
            return Err(Error::ParameterOutOfRange("target track must be binary".into()));
        }
        Ok(CtrlLayout {
            alphabet,
            control_track,
            target_track,
        })
    }

    /// `B × C` with `|B| = b`.
    pub fn two_track(b: usize) -> Result<Self> {
        Self::new(Alphabet::two_track(b)?, 0, 1)
    }

    /// `B′ × B × C`: the control word lives on the middle track.
    pub fn three_track() -> Self {
        Self::new(Alphabet::three_track(), 1, 2).unwrap()
    }

    /// `σ₁^power`, the shift of the control track.
    pub fn partial_shift(&self, power: i64) -> BlockMap {
        blockmap::shift(&self.alphabet, self.control_track, power).expect("track in range")
    }
}

/// Symbolic form of `ctrl(π)[u]_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DescriptorFile", into = "DescriptorFile")]
pub struct CtrlDescriptor {
    control: Word,
    offset: i64,
    width: u32,
    perm: Perm,
}

impl CtrlDescriptor {
    /// Validates that windows of distinct occurrences of `control` are disjoint.
    pub fn new(perm: Perm, control: Word, offset: i64) -> Result<Self> {
        let width = perm
            .width()
            .ok_or_else(|| Error::ParameterOutOfRange("π must act on bit strings".into()))?;
        let distance = control.min_occurrence_distance();
        if distance < width as usize {
            return Err(Error::OverlappingWindows {
                control: control.to_string(),
                distance,
                width,
            });
        }
        Ok(CtrlDescriptor {
            control,
            offset,
            width,
            perm,
        })
    }

    pub fn control(&self) -> &Word {
        &self.control
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    pub fn inverse(&self) -> CtrlDescriptor {
        CtrlDescriptor {
            perm: self.perm.inverse(),
            ..self.clone()
        }
    }

    pub fn with_offset(&self, offset: i64) -> CtrlDescriptor {
        CtrlDescriptor {
            offset,
            ..self.clone()
        }
    }

    /// Compiles to a block map on `layout`.
    pub fn compile(
        &self,
        layout: &CtrlLayout,
        convention: OffsetConvention,
        budget: u64,
    ) -> Result<BlockMap> {
        let b_size = layout.alphabet.tracks()[layout.control_track];
        if let Some(&s) = self.control.symbols().iter().find(|&&s| s as usize >= b_size) {
            return Err(Error::ParameterOutOfRange(format!(
                "control symbol {s} outside track of size {b_size}"
            )));
        }
        let s = convention.window_start(self.offset);
        let k = self.width as i64;
        let len = self.control.len() as i64;
        let lo = (-s - k + 1).min(-k + 1).min(0);
        let hi = (-s + len - 1).max(k - 1).max(0);
        let memory = (-lo) as usize;
        let anticipation = hi as usize;
        let a = layout.alphabet.clone();
        let (ct, tt) = (layout.control_track, layout.target_track);
        let u = self.control.symbols().to_vec();
        let perm = self.perm.clone();
        BlockMap::from_local(a.clone(), memory, anticipation, budget, |w| {
            let c = memory as i64;
            let at = |r: i64| w[(c + r) as usize];
            let centre = w[memory];
            for p in (-s - k + 1)..=(-s) {
                let hit = u
                    .iter()
                    .enumerate()
                    .all(|(t, &sym)| a.component(at(p + t as i64), ct) == sym as usize);
                if !hit {
                    continue;
                }
                let start = p + s;
                let content = (0..k).fold(0u32, |acc, r| {
                    (acc << 1) | a.component(at(start + r), tt) as u32
                });
                let image = perm.apply(content);
                let j = -start;
                let bit = (image >> (k - 1 - j)) & 1;
                return a.with_component(centre, tt, bit as usize);
            }
            centre
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DescriptorFile {
    control: Word,
    offset: i64,
    width: u32,
    perm: Perm,
}

impl TryFrom<DescriptorFile> for CtrlDescriptor {
    type Error = Error;
    fn try_from(f: DescriptorFile) -> Result<Self> {
        if f.perm.width() != Some(f.width) {
            return Err(Error::Parse {
                location: "width".into(),
                message: format!("perm does not act on {}-bit windows", f.width),
            });
        }
        CtrlDescriptor::new(f.perm, f.control, f.offset)
    }
}

impl From<CtrlDescriptor> for DescriptorFile {
    fn from(d: CtrlDescriptor) -> Self {
        DescriptorFile {
            control: d.control,
            offset: d.offset,
            width: d.width,
            perm: d.perm,
        }
    }
}

/// `ctrl(π)[u]_i`, compiled, with its descriptor.
pub fn make_ctrl(
    perm: &Perm,
    control: &Word,
    offset: i64,
    layout: &CtrlLayout,
    convention: OffsetConvention,
    budget: u64,
) -> Result<(BlockMap, CtrlDescriptor)> {
    let d = CtrlDescriptor::new(perm.clone(), control.clone(), offset)?;
    Ok((d.compile(layout, convention, budget)?, d))
}

/// Compiles a left-first product of factors into one block map.
pub fn compile_product(
    factors: &[Factor],
    layout: &CtrlLayout,
    convention: OffsetConvention,
    budget: u64,
) -> Result<BlockMap> {
    let maps = factors
        .iter()
        .map(|f| match f {
            Factor::Ctrl(d) => d.compile(layout, convention, budget),
            Factor::Shift(t) => Ok(layout.partial_shift(*t)),
        })
        .collect::<Result<Vec<_>>>()?;
    if maps.is_empty() {
        return Ok(BlockMap::identity(layout.alphabet.clone()));
    }
    let refs: Vec<&BlockMap> = maps.iter().rev().collect();
    blockmap::compose_all(&refs, budget)
}

/// Descriptor of `σ₁^{-j} ∘ d ∘ σ₁^{j}` (function composition, `σ₁^j` first).
pub fn conjugate_offset(d: &CtrlDescriptor, j: i64, convention: OffsetConvention) -> CtrlDescriptor {
    let start = convention.window_start(d.offset) - j;
    d.with_offset(convention.offset_for_start(start))
}

/// `ctrl(π)[ww]_i` with an `ℓ`-bit window.
pub fn ww_control(perm: &Perm, w: &Word, offset: i64) -> Result<CtrlDescriptor> {
    if perm.width() != Some(w.len() as u32) {
        return Err(Error::WidthMismatch(perm.width().unwrap_or(0), w.len() as u32));
    }
    CtrlDescriptor::new(perm.clone(), w.repeat(2), offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::PeriodicConfig;
    use crate::blockmap::{compose_all, equal, EqualityPolicy, DEFAULT_BUDGET};
    use crate::groups::gates::{swap_gate, toffoli_gate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn exhaustive() -> EqualityPolicy {
        EqualityPolicy::exhaustive()
    }

    #[test]
    fn identity_perm_compiles_to_identity() {
        let layout = CtrlLayout::two_track(2).unwrap();
        let (f, _) = make_ctrl(
            &Perm::identity_bits(4),
            &w("0111"),
            0,
            &layout,
            OffsetConvention::Backward,
            DEFAULT_BUDGET,
        )
        .unwrap();
        let id = BlockMap::identity(layout.alphabet.clone());
        assert!(equal(&f, &id, &exhaustive()).unwrap().is_equal());
    }

    #[test]
    fn self_overlapping_control_rejected() {
        let err = CtrlDescriptor::new(swap_gate(), w("00"), 0).unwrap_err();
        assert!(matches!(err, Error::OverlappingWindows { distance: 1, .. }));
    }

    #[test]
    fn involution_squares_to_identity() {
        let layout = CtrlLayout::two_track(2).unwrap();
        for (word, f) in [("0111", swap_gate()), ("0111", toffoli_gate()), ("011", toffoli_gate())] {
            for conv in [OffsetConvention::Forward, OffsetConvention::Backward] {
                let (f0, _) = make_ctrl(&f, &w(word), 0, &layout, conv, DEFAULT_BUDGET).unwrap();
                let sq = compose_all(&[&f0, &f0], DEFAULT_BUDGET).unwrap();
                let id = BlockMap::identity(layout.alphabet.clone());
                assert!(equal(&sq, &id, &exhaustive()).unwrap().is_equal());
            }
        }
    }

    #[test]
    fn window_placement_on_a_periodic_point() {
        // 011 occurs at 2; a 2-bit window at offset 1 starts at cell 1
        // (backward) or cell 3 (forward).
        let layout = CtrlLayout::two_track(2).unwrap();
        let f = Perm::from_table(vec![2, 3, 0, 1]).unwrap(); // flip the left bit
        let d = CtrlDescriptor::new(f, w("011"), 1).unwrap();
        let m = d.compile(&layout, OffsetConvention::Backward, DEFAULT_BUDGET).unwrap();
        let x = PeriodicConfig::from_tracks(
            layout.alphabet.clone(),
            &[vec![0, 0, 0, 1, 1, 0, 0, 0], vec![0; 8]],
        )
        .unwrap();
        let y = m.apply(&x);
        assert_eq!(y.track(0), x.track(0));
        assert_eq!(y.track(1), vec![0, 1, 0, 0, 0, 0, 0, 0]);
        let m = d.compile(&layout, OffsetConvention::Forward, DEFAULT_BUDGET).unwrap();
        assert_eq!(m.apply(&x).track(1), vec![0, 0, 0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn conjugation_moves_the_window() {
        let layout = CtrlLayout::two_track(2).unwrap();
        let d = CtrlDescriptor::new(swap_gate(), w("011"), 0).unwrap();
        for conv in [OffsetConvention::Forward, OffsetConvention::Backward] {
            let f0 = d.compile(&layout, conv, DEFAULT_BUDGET).unwrap();
            let s = layout.partial_shift(1);
            let si = layout.partial_shift(-1);
            let conj = compose_all(&[&si, &f0, &s], DEFAULT_BUDGET).unwrap();
            let c = conjugate_offset(&d, 1, conv);
            let cm = c.compile(&layout, conv, DEFAULT_BUDGET).unwrap();
            assert!(equal(&cm, &conj, &exhaustive()).unwrap().is_equal());
            assert_eq!(conjugate_offset(&c, -1, conv), d);
            assert_eq!(conjugate_offset(&d, 0, conv), d);
        }
        assert_eq!(conjugate_offset(&d, 1, OffsetConvention::Backward).offset(), 1);
        assert_eq!(conjugate_offset(&d, 1, OffsetConvention::Forward).offset(), -1);
    }

    #[test]
    fn ww_windows_are_disjoint() {
        let base = w("0111");
        let ww = base.repeat(2);
        let text = base.repeat(3);
        let occ = ww.occurrences_in(text.symbols());
        assert_eq!(occ, vec![0, 4]);
        assert!(ww_control(&Perm::identity_bits(4), &base, 0).is_ok());
    }

    #[test]
    fn control_track_is_preserved_and_far_cells_fixed() {
        let layout = CtrlLayout::two_track(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ell in 2..=6usize {
            let base = crate::words::enumerate_unbordered(ell, 2, 1 << 12).unwrap()[0].clone();
            let k = (ell as u32).min(3);
            let p = Perm::random(1 << k, &mut rng);
            let d = CtrlDescriptor::new(p, base.clone(), 0).unwrap();
            let m = d.compile(&layout, OffsetConvention::Backward, 1 << 22).unwrap();
            for _ in 0..20 {
                let per = rng.gen_range(1..=16);
                let cells: Vec<u32> = (0..per).map(|_| rng.gen_range(0..4)).collect();
                let x = PeriodicConfig::new(layout.alphabet.clone(), cells).unwrap();
                let y = m.apply(&x);
                assert_eq!(y.track(0), x.track(0));
                // cells outside every window keep their bit
                let b: Vec<u8> = x.track(0).iter().map(|&v| v as u8).collect();
                let text: Vec<u8> = b.iter().chain(b.iter()).chain(b.iter()).copied().collect();
                let occ = base.occurrences_in(&text);
                for j in 0..per {
                    let jj = j + per;
                    let covered = occ.iter().any(|&o| jj >= o && jj < o + k as usize);
                    if !covered {
                        assert_eq!(y.track(1)[j], x.track(1)[j]);
                    }
                }
            }
        }
    }
}
