//! Exact evaluation of products of controlled permutations and partial
//! shifts that share one base control word `w`.
//!
//! A product only ever rewrites the target track, inside windows hung off
//! occurrences of powers of `w` on the control track. Which windows exist is
//! decided by the occurrence set of `w`, so the product is determined by
//! finitely many *occurrence patterns*: sets of positions in `[0, span)`
//! containing `0`, filtered for realizability. In each pattern overlapping
//! windows are merged into components; a component whose leftmost owner is
//! the occurrence at `0` is checked exactly, either on all inputs or only on
//! those the windows can move.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::{CtrlDescriptor, OffsetConvention};
use crate::error::{Error, Result};
use crate::groups::perm::Perm;
use crate::words::Word;

/// One factor of a product; products are applied left factor first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    Ctrl(CtrlDescriptor),
    /// `σ₁^t` on the control track.
    Shift(i64),
}

impl Factor {
    pub fn inverse(&self) -> Factor {
        match self {
            Factor::Ctrl(d) => Factor::Ctrl(d.inverse()),
            Factor::Shift(t) => Factor::Shift(-t),
        }
    }
}

/// Inverse of a left-first product.
pub fn invert_product(factors: &[Factor]) -> Vec<Factor> {
    factors.iter().rev().map(Factor::inverse).collect()
}

/// A permutation of the target bits of a run of `width` cells, leftmost cell
/// most significant, kept as the sorted list of moved points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentAction {
    width: u32,
    moved: Vec<(u64, u64)>,
}

impl ComponentAction {
    pub fn from_perm(p: &Perm) -> Option<ComponentAction> {
        let width = p.width()?;
        let moved = p
            .table()
            .iter()
            .enumerate()
            .filter(|&(x, &y)| x as u32 != y)
            .map(|(x, &y)| (x as u64, y as u64))
            .collect();
        Some(ComponentAction { width, moved })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn moved(&self) -> &[(u64, u64)] {
        &self.moved
    }

    pub fn apply(&self, x: u64) -> u64 {
        match self.moved.binary_search_by_key(&x, |&(a, _)| a) {
            Ok(i) => self.moved[i].1,
            Err(_) => x,
        }
    }
}

/// A merged run of windows of one product inside one pattern.
#[derive(Debug, Clone)]
pub struct Block {
    pub start: i64,
    pub width: u32,
    /// Contains a window owned by the occurrence at `0`.
    pub anchored: bool,
    /// No occurrence outside the span can add a window touching this block.
    pub determined: bool,
    /// Too wide to tabulate within the component budget.
    pub oversized: bool,
    /// `None` for identity, undetermined and oversized blocks.
    pub action: Option<Arc<ComponentAction>>,
}

impl Block {
    fn end(&self) -> i64 {
        self.start + self.width as i64
    }
}

#[derive(Debug, Clone)]
pub struct PatternForm {
    /// Occurrences of the base word, relative to the anchor at `0`.
    pub occurrences: Vec<i64>,
    pub blocks: Vec<Block>,
}

impl PatternForm {
    /// Blocks with a non-identity action.
    pub fn active_blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.action.is_some())
    }
}

/// Normal form of a product: net control-track shift and, per occurrence
/// pattern, the merged window blocks with their composed actions.
#[derive(Debug, Clone)]
pub struct AlignedNormalForm {
    pub shift: i64,
    pub span: usize,
    pub patterns: Vec<PatternForm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductVerdict {
    Equal {
        patterns: usize,
        components: usize,
    },
    ShiftMismatch {
        lhs: i64,
        rhs: i64,
    },
    Differ {
        occurrences: Vec<i64>,
        /// First cell of the offending component.
        start: i64,
        input: Vec<u8>,
        lhs: Vec<u8>,
        rhs: Vec<u8>,
    },
}

impl ProductVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, ProductVerdict::Equal { .. })
    }
}

#[derive(Debug, Clone)]
struct Placed {
    index: usize,
    /// Distinguishes factors of the two sides of a comparison in memo keys.
    uid: usize,
    reps: usize,
    rho: i64,
    width: u32,
    table: Arc<Vec<u32>>,
    support: Arc<Vec<u32>>,
}

#[derive(Debug, Clone)]
struct Prepared {
    placed: Vec<Placed>,
    shift: i64,
}

impl Prepared {
    fn rho_min(&self) -> i64 {
        self.placed.iter().map(|p| p.rho).min().unwrap_or(0)
    }

    fn reach(&self) -> i64 {
        self.placed
            .iter()
            .map(|p| p.rho.abs() + p.width as i64)
            .max()
            .unwrap_or(0)
    }
}

/// Evaluator for products over one base word on a control track of size `q`.
pub struct Evaluator {
    base: Word,
    q: usize,
    convention: OffsetConvention,
    max_component_bits: u32,
    max_patterns: usize,
    max_span_retries: usize,
    patterns: Mutex<HashMap<usize, Arc<Vec<Vec<i64>>>>>,
}

impl Evaluator {
    pub fn new(base: Word, q: usize, convention: OffsetConvention) -> Result<Self> {
        if let Some(&s) = base.symbols().iter().find(|&&s| s as usize >= q) {
            return Err(Error::ParameterOutOfRange(format!(
                "symbol {s} outside control alphabet of size {q}"
            )));
        }
        Ok(Evaluator {
            base,
            q,
            convention,
            max_component_bits: 22,
            max_patterns: 1 << 20,
            max_span_retries: 3,
            patterns: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_max_component_bits(mut self, bits: u32) -> Self {
        self.max_component_bits = bits.min(40);
        self
    }

    pub fn with_max_patterns(mut self, n: usize) -> Self {
        self.max_patterns = n;
        self
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn convention(&self) -> OffsetConvention {
        self.convention
    }

    pub fn control_alphabet_size(&self) -> usize {
        self.q
    }

    fn ell(&self) -> usize {
        self.base.len()
    }

    fn prepare(&self, factors: &[Factor], uid_base: usize) -> Result<Prepared> {
        let mut placed = Vec::new();
        let mut t = 0i64;
        for (index, f) in factors.iter().enumerate() {
            match f {
                Factor::Shift(s) => t += s,
                Factor::Ctrl(d) => {
                    let reps = self.power_of_base(d.control())?;
                    if d.perm().is_identity() {
                        continue;
                    }
                    placed.push(Placed {
                        index,
                        uid: uid_base + index,
                        reps,
                        rho: self.convention.window_start(d.offset()) - t,
                        width: d.width(),
                        table: Arc::new(d.perm().table().to_vec()),
                        support: Arc::new(d.perm().support().into_iter().collect()),
                    });
                }
            }
        }
        Ok(Prepared { placed, shift: t })
    }

    fn power_of_base(&self, control: &Word) -> Result<usize> {
        let l = self.ell();
        let c = control.symbols();
        if c.len().is_multiple_of(l) && c.chunks(l).all(|ch| ch == self.base.symbols()) {
            Ok(c.len() / l)
        } else {
            Err(Error::UnsupportedFactor(format!(
                "control {control} is not a power of {}",
                self.base
            )))
        }
    }

    fn initial_span(&self, sides: &[&Prepared]) -> usize {
        let reach = sides.iter().map(|p| p.reach()).max().unwrap_or(0);
        let rmax = sides
            .iter()
            .flat_map(|p| p.placed.iter().map(|x| x.reps))
            .max()
            .unwrap_or(1);
        (4 * self.ell()) + reach as usize + (rmax - 1) * self.ell()
    }

    /// Realizable occurrence patterns in `[0, span)` anchored at `0`.
    pub fn patterns(&self, span: usize) -> Result<Arc<Vec<Vec<i64>>>> {
        if let Some(p) = self.patterns.lock().unwrap().get(&span) {
            return Ok(p.clone());
        }
        let d = self.base.min_occurrence_distance();
        let mut raw = Vec::new();
        let mut cur = vec![0i64];
        fn rec(
            cur: &mut Vec<i64>,
            next: i64,
            span: i64,
            d: i64,
            out: &mut Vec<Vec<i64>>,
            cap: usize,
        ) -> bool {
            out.push(cur.clone());
            if out.len() > cap {
                return false;
            }
            for p in next..span {
                cur.push(p);
                let ok = rec(cur, p + d, span, d, out, cap);
                cur.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        if !rec(&mut cur, d as i64, span as i64, d as i64, &mut raw, self.max_patterns) {
            return Err(Error::BudgetExceeded {
                needed: raw.len() as u128,
                budget: self.max_patterns as u64,
            });
        }
        let realizable: Vec<Vec<i64>> = raw
            .into_par_iter()
            .filter(|q| self.realizable(q, span))
            .collect();
        let realizable = Arc::new(realizable);
        self.patterns
            .lock()
            .unwrap()
            .insert(span, realizable.clone());
        Ok(realizable)
    }

    /// Whether some control-track word has exactly `occ` as its occurrences
    /// of the base word among positions `[0, span)`.
    fn realizable(&self, occ: &[i64], span: usize) -> bool {
        let Some(a) = OccurrenceAutomaton::new(&self.base, self.q) else {
            return true;
        };
        let mut wanted = vec![false; span];
        for &p in occ {
            wanted[p as usize] = true;
        }
        let mut cur = a.start();
        for want in wanted {
            match a.step(&cur, want) {
                Some(next) => cur = next,
                None => return false,
            }
        }
        true
    }

    /// Normal form of a product.
    ///
    /// Fails with [`Error::BudgetExceeded`] when an anchored block is too
    /// wide to tabulate or never becomes determined; [`Evaluator::compare`]
    /// still decides equality in those cases.
    pub fn symbolic_product(&self, factors: &[Factor]) -> Result<AlignedNormalForm> {
        let prep = self.prepare(factors, 0)?;
        let mut span = self.initial_span(&[&prep]);
        for _ in 0..=self.max_span_retries {
            let form = self.form_at(&prep, span)?;
            let anchored = || form.patterns.iter().flat_map(|p| &p.blocks).filter(|b| b.anchored);
            if let Some(b) = anchored().find(|b| b.oversized) {
                return Err(Error::BudgetExceeded {
                    needed: 1u128 << b.width.min(127),
                    budget: 1 << self.max_component_bits,
                });
            }
            if anchored().all(|b| b.determined) {
                return Ok(form);
            }
            span += 2 * self.ell();
        }
        Err(Error::BudgetExceeded {
            needed: span as u128,
            budget: (span - 2 * self.ell()) as u64,
        })
    }

    /// Compares two products exactly.
    ///
    /// Occurrence patterns are grown one position at a time and cut off as
    /// soon as the component anchored at `0` is determined, so each leaf of
    /// the search stands for every pattern extending it.
    pub fn compare(&self, lhs: &[Factor], rhs: &[Factor]) -> Result<ProductVerdict> {
        let l = self.prepare(lhs, 0)?;
        let r = self.prepare(rhs, lhs.len())?;
        if l.shift != r.shift {
            return Ok(ProductVerdict::ShiftMismatch {
                lhs: l.shift,
                rhs: r.shift,
            });
        }
        let ell = self.ell() as i64;
        let d = self.base.min_occurrence_distance() as i64;
        let mut search = PatternSearch {
            l: &l,
            r: &r,
            ell,
            d,
            bits: self.max_component_bits,
            max_span: (self.initial_span(&[&l, &r]) + self.max_span_retries * 2 * self.ell()) as i64,
            max_nodes: self.max_patterns,
            automaton: OccurrenceAutomaton::new(&self.base, self.q),
            memo: HashMap::new(),
            cones: HashMap::new(),
            nodes: 0,
            leaves: 0,
            components: 0,
        };
        let mut occ = vec![0];
        let states = search.automaton.as_ref().map(|a| a.start());
        let Some(states) = search.advance(states, true) else {
            return Err(Error::Precondition(format!("{} never occurs", self.base)));
        };
        if let Some(v) = search.visit(&mut occ, d, states)? {
            return Ok(v);
        }
        Ok(ProductVerdict::Equal {
            patterns: search.leaves,
            components: search.components,
        })
    }

    fn form_at(&self, prep: &Prepared, span: usize) -> Result<AlignedNormalForm> {
        let patterns = self.patterns(span)?;
        let ell = self.ell() as i64;
        let bits = self.max_component_bits;
        let forms = patterns
            .par_chunks(64)
            .map(|chunk| {
                let mut memo: HashMap<Vec<(usize, i64)>, Option<Arc<ComponentAction>>> =
                    HashMap::new();
                chunk
                    .iter()
                    .map(|occ| pattern_form(prep, occ, span as i64, ell, bits, &mut memo))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AlignedNormalForm {
            shift: prep.shift,
            span,
            patterns: forms.into_iter().flatten().collect(),
        })
    }
}

/// Tracks which last-`(ℓ-1)`-symbol states a control word can be in while
/// matching a prescribed occurrence sequence.
struct OccurrenceAutomaton {
    q: usize,
    states: usize,
    code: usize,
}

impl OccurrenceAutomaton {
    /// `None` when the state space is too large to track; every pattern is
    /// then treated as realizable.
    fn new(base: &Word, q: usize) -> Option<Self> {
        let states = q.checked_pow(base.len() as u32 - 1).filter(|&s| s <= 1 << 20)?;
        let code = base.symbols().iter().fold(0usize, |a, &s| a * q + s as usize);
        Some(OccurrenceAutomaton { q, states, code })
    }

    fn start(&self) -> Vec<bool> {
        vec![true; self.states]
    }

    /// Appends one symbol; `want` says whether the base word must end there.
    fn step(&self, cur: &[bool], want: bool) -> Option<Vec<bool>> {
        let mut next = vec![false; self.states];
        let mut any = false;
        for (st, _) in cur.iter().enumerate().filter(|(_, &r)| r) {
            for sym in 0..self.q {
                let window = st * self.q + sym;
                if (window == self.code) == want {
                    next[window % self.states] = true;
                    any = true;
                }
            }
        }
        any.then_some(next)
    }
}

/// Depth-first search over occurrence prefixes for [`Evaluator::compare`].
struct PatternSearch<'p> {
    l: &'p Prepared,
    r: &'p Prepared,
    ell: i64,
    d: i64,
    bits: u32,
    max_span: i64,
    max_nodes: usize,
    automaton: Option<OccurrenceAutomaton>,
    memo: BlockMemo,
    cones: ConeMemo,
    nodes: usize,
    leaves: usize,
    components: usize,
}

impl PatternSearch<'_> {
    /// Decides one more position (occupied or not) and, for an occupied one,
    /// the `d - 1` positions after it that no occurrence can take.
    fn advance(&self, states: Option<Vec<bool>>, occupied: bool) -> Option<Option<Vec<bool>>> {
        let Some(a) = &self.automaton else {
            return Some(None);
        };
        let mut cur = a.step(states.as_deref()?, occupied)?;
        if occupied {
            for _ in 1..self.d {
                cur = a.step(&cur, false)?;
            }
        }
        Some(Some(cur))
    }

    /// `occ` lists the occurrences in `[0, span)`; returns a differing
    /// witness if one is found below this node.
    fn visit(
        &mut self,
        occ: &mut Vec<i64>,
        span: i64,
        states: Option<Vec<bool>>,
    ) -> Result<Option<ProductVerdict>> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::BudgetExceeded {
                needed: self.nodes as u128,
                budget: self.max_nodes as u64,
            });
        }
        match self.leaf(occ, span)? {
            PatternOutcome::Equal(n) => {
                self.leaves += 1;
                self.components += n;
                return Ok(None);
            }
            PatternOutcome::Differ(v) => return Ok(Some(v)),
            PatternOutcome::Inexact => {}
        }
        if span >= self.max_span {
            return Err(Error::BudgetExceeded {
                needed: span as u128 + 1,
                budget: self.max_span as u64,
            });
        }
        if let Some(next) = self.advance(states.clone(), true) {
            occ.push(span);
            let found = self.visit(occ, span + self.d, next)?;
            occ.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        match self.advance(states, false) {
            Some(next) => self.visit(occ, span + 1, next),
            None => Ok(None),
        }
    }

    fn leaf(&mut self, occ: &[i64], span: i64) -> Result<PatternOutcome> {
        // the anchor's own windows must exist before anything is judged
        let reps = self.l.placed.iter().chain(&self.r.placed).map(|p| p.reps).max().unwrap_or(1);
        if span <= (reps as i64 - 1) * self.ell {
            return Ok(PatternOutcome::Inexact);
        }
        let a = pattern_form(self.l, occ, span, self.ell, self.bits, &mut self.memo)?;
        let b = pattern_form(self.r, occ, span, self.ell, self.bits, &mut self.memo)?;
        match compare_pattern(&a, &b, self.bits) {
            Ok(PatternOutcome::Inexact) | Err(Error::BudgetExceeded { .. }) => {
                cone_check(self.l, self.r, occ, span, self.ell, self.bits, &mut self.cones)
            }
            other => other,
        }
    }
}

struct Window<'a> {
    start: i64,
    placed: &'a Placed,
    anchored: bool,
}

type BlockMemo = HashMap<Vec<(usize, i64)>, Option<Arc<ComponentAction>>>;

/// Windows present in a pattern, sorted by factor then position, and the
/// first cell an occurrence outside the span could reach.
fn pattern_windows<'a>(prep: &'a Prepared, occ: &[i64], span: i64, ell: i64) -> (Vec<Window<'a>>, i64) {
    let present = |p: i64| occ.binary_search(&p).is_ok();
    let mut bound = span + prep.rho_min();
    let mut windows = Vec::new();
    for pl in &prep.placed {
        for &o in occ {
            let last = o + (pl.reps as i64 - 1) * ell;
            if last >= span {
                bound = bound.min(o + pl.rho);
                continue;
            }
            if (1..pl.reps as i64).all(|j| present(o + j * ell)) {
                windows.push(Window {
                    start: o + pl.rho,
                    placed: pl,
                    anchored: o == 0,
                });
            }
        }
    }
    (windows, bound)
}

fn pattern_form(
    prep: &Prepared,
    occ: &[i64],
    span: i64,
    ell: i64,
    max_bits: u32,
    memo: &mut BlockMemo,
) -> Result<PatternForm> {
    let (mut windows, bound) = pattern_windows(prep, occ, span, ell);
    windows.sort_by_key(|w| (w.start, w.placed.index));
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < windows.len() {
        let start = windows[i].start;
        let mut end = start + windows[i].placed.width as i64;
        let mut j = i + 1;
        while j < windows.len() && windows[j].start < end {
            end = end.max(windows[j].start + windows[j].placed.width as i64);
            j += 1;
        }
        let group = &windows[i..j];
        i = j;
        let anchored = group.iter().any(|w| w.anchored);
        let determined = end <= bound;
        let width = (end - start) as u32;
        let mut oversized = false;
        let action = if determined {
            let mut key: Vec<(usize, i64)> = group
                .iter()
                .map(|w| (w.placed.uid, w.start - start))
                .collect();
            key.sort();
            match memo.get(&key) {
                Some(a) => a.clone(),
                None => {
                    let mut parts: Vec<(usize, u32, Part)> = group
                        .iter()
                        .map(|w| (w.placed.index, (w.start - start) as u32, Part::Window(w.placed)))
                        .collect();
                    parts.sort_by_key(|p| p.0);
                    let parts: Vec<(u32, Part)> = parts.into_iter().map(|(_, o, p)| (o, p)).collect();
                    match evaluate(width, &parts, max_bits) {
                        Ok(moved) => {
                            let a = (!moved.is_empty())
                                .then(|| Arc::new(ComponentAction { width, moved }));
                            memo.insert(key, a.clone());
                            a
                        }
                        Err(Error::BudgetExceeded { .. }) => {
                            oversized = true;
                            None
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        } else {
            None
        };
        blocks.push(Block {
            start,
            width,
            anchored,
            determined,
            oversized,
            action,
        });
    }
    Ok(PatternForm {
        occurrences: occ.to_vec(),
        blocks,
    })
}

type ConeMemo = HashMap<(i64, Vec<(usize, i64)>, Vec<(usize, i64)>), Option<(u64, u64, u64)>>;

/// Windows (in application order) that can influence cell `c`, and the hull
/// of cells they cover.
fn cone<'w, 'a>(windows: &'w [Window<'a>], c: i64) -> (i64, i64, Vec<&'w Window<'a>>) {
    let (mut lo, mut hi) = (c, c + 1);
    let mut used = Vec::new();
    for w in windows.iter().rev() {
        let end = w.start + w.placed.width as i64;
        if w.start < hi && end > lo {
            lo = lo.min(w.start);
            hi = hi.max(end);
            used.push(w);
        }
    }
    used.reverse();
    (lo, hi, used)
}

fn window_parts<'a>(ws: &[&Window<'a>], lo: i64) -> Vec<(u32, Part<'a>)> {
    ws.iter()
        .map(|w| ((w.start - lo) as u32, Part::Window(w.placed)))
        .collect()
}

/// Cell-by-cell comparison through backward light cones; used when window
/// components chain too far to tabulate.
fn cone_check(
    l: &Prepared,
    r: &Prepared,
    occ: &[i64],
    span: i64,
    ell: i64,
    max_bits: u32,
    memo: &mut ConeMemo,
) -> Result<PatternOutcome> {
    let (mut wl, bl) = pattern_windows(l, occ, span, ell);
    let (mut wr, br) = pattern_windows(r, occ, span, ell);
    let bound = bl.min(br);
    wl.sort_by_key(|w| (w.placed.index, w.start));
    wr.sort_by_key(|w| (w.placed.index, w.start));
    let ext: i64 = l
        .placed
        .iter()
        .chain(&r.placed)
        .map(|p| p.width as i64)
        .sum();
    let anchored = wl.iter().chain(&wr).filter(|w| w.anchored);
    let Some(first) = anchored.clone().map(|w| w.start).min() else {
        return Ok(PatternOutcome::Equal(0));
    };
    let last = anchored.map(|w| w.start + w.placed.width as i64).max().unwrap();
    let mut checked = 0;
    for c in first - ext..last + ext {
        let (llo, lhi, cl) = cone(&wl, c);
        let (rlo, rhi, cr) = cone(&wr, c);
        if !cl.iter().chain(&cr).any(|w| w.anchored) {
            continue;
        }
        let (lo, hi) = (llo.min(rlo), lhi.max(rhi));
        if hi > bound {
            return Ok(PatternOutcome::Inexact);
        }
        checked += 1;
        let key_of = |ws: &[&Window]| -> Vec<(usize, i64)> {
            ws.iter().map(|w| (w.placed.uid, w.start - lo)).collect()
        };
        let key = (c - lo, key_of(&cl), key_of(&cr));
        let found = match memo.get(&key) {
            Some(v) => *v,
            None => {
                let width = (hi - lo) as u32;
                let (pl, pr) = (window_parts(&cl, lo), window_parts(&cr, lo));
                let both: Vec<(u32, Part)> = pl.iter().chain(&pr).copied().collect();
                let bit = width - 1 - (c - lo) as u32;
                let mut found = None;
                for x in candidate_inputs(width, &both, max_bits)? {
                    let (y1, y2) = (apply_parts(width, &pl, x), apply_parts(width, &pr, x));
                    if (y1 ^ y2) >> bit & 1 == 1 {
                        found = Some((x, y1, y2));
                        break;
                    }
                }
                memo.insert(key, found);
                found
            }
        };
        if let Some((x, y1, y2)) = found {
            let width = (hi - lo) as u32;
            return Ok(PatternOutcome::Differ(ProductVerdict::Differ {
                occurrences: occ.to_vec(),
                start: lo,
                input: bits_of(x, width),
                lhs: bits_of(y1, width),
                rhs: bits_of(y2, width),
            }));
        }
    }
    Ok(PatternOutcome::Equal(checked))
}

#[derive(Clone, Copy)]
enum Part<'a> {
    Window(&'a Placed),
    Action(&'a ComponentAction),
}

impl Part<'_> {
    fn width(&self) -> u32 {
        match self {
            Part::Window(p) => p.width,
            Part::Action(a) => a.width,
        }
    }

    fn moved_inputs(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            Part::Window(p) => Box::new(p.support.iter().map(|&x| x as u64)),
            Part::Action(a) => Box::new(a.moved.iter().map(|&(x, _)| x)),
        }
    }

    fn moved_count(&self) -> u64 {
        match self {
            Part::Window(p) => p.support.len() as u64,
            Part::Action(a) => a.moved.len() as u64,
        }
    }

    fn apply(&self, c: u64) -> u64 {
        match self {
            Part::Window(p) => p.table[c as usize] as u64,
            Part::Action(a) => a.apply(c),
        }
    }
}

fn apply_parts(width: u32, parts: &[(u32, Part)], mut x: u64) -> u64 {
    for (off, part) in parts {
        let k = part.width();
        let sh = width - off - k;
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let c = (x >> sh) & mask;
        x = (x & !(mask << sh)) | (part.apply(c) << sh);
    }
    x
}

/// Inputs on which some part could move something; every other input is
/// fixed by the whole sequence.
fn candidate_inputs(width: u32, parts: &[(u32, Part)], max_bits: u32) -> Result<Vec<u64>> {
    if width > 64 {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << 64,
            budget: 1 << max_bits,
        });
    }
    let count: u128 = parts
        .iter()
        .map(|(_, p)| (p.moved_count() as u128) << (width - p.width()))
        .sum();
    let full = 1u128 << width;
    if width <= max_bits && full <= count {
        return Ok((0..1u64 << width).collect());
    }
    if count > 1u128 << max_bits {
        return Err(Error::BudgetExceeded {
            needed: count.min(full),
            budget: 1 << max_bits,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for (off, p) in parts {
        let k = p.width();
        let sh = width - off - k;
        let hi_bits = *off;
        for m in p.moved_inputs() {
            for hi in 0..1u64 << hi_bits {
                for lo in 0..1u64 << sh {
                    let top = if hi_bits == 0 { 0 } else { hi << (width - hi_bits) };
                    out.push(top | (m << sh) | lo);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn evaluate(width: u32, parts: &[(u32, Part)], max_bits: u32) -> Result<Vec<(u64, u64)>> {
    Ok(candidate_inputs(width, parts, max_bits)?
        .into_iter()
        .filter_map(|x| {
            let y = apply_parts(width, parts, x);
            (x != y).then_some((x, y))
        })
        .collect())
}

fn bits_of(x: u64, width: u32) -> Vec<u8> {
    (0..width).rev().map(|i| ((x >> i) & 1) as u8).collect()
}

/// `Some(verdict)` when decided, `None` when the span was too short.
fn compare_forms(
    a: &AlignedNormalForm,
    b: &AlignedNormalForm,
    max_bits: u32,
) -> Result<Option<ProductVerdict>> {
    if a.shift != b.shift {
        return Ok(Some(ProductVerdict::ShiftMismatch {
            lhs: a.shift,
            rhs: b.shift,
        }));
    }
    if a.span != b.span || a.patterns.len() != b.patterns.len() {
        return Err(Error::Precondition(
            "normal forms built over different spans".into(),
        ));
    }
    let results = a
        .patterns
        .par_iter()
        .zip(b.patterns.par_iter())
        .map(|(pa, pb)| compare_pattern(pa, pb, max_bits))
        .collect::<Result<Vec<_>>>()?;
    let mut components = 0;
    for r in results {
        match r {
            PatternOutcome::Equal(n) => components += n,
            PatternOutcome::Inexact => return Ok(None),
            PatternOutcome::Differ(v) => return Ok(Some(v)),
        }
    }
    Ok(Some(ProductVerdict::Equal {
        patterns: a.patterns.len(),
        components,
    }))
}

enum PatternOutcome {
    Equal(usize),
    Inexact,
    Differ(ProductVerdict),
}

fn compare_pattern(pa: &PatternForm, pb: &PatternForm, max_bits: u32) -> Result<PatternOutcome> {
    let mut all: Vec<(&Block, bool)> = pa
        .blocks
        .iter()
        .map(|x| (x, true))
        .chain(pb.blocks.iter().map(|x| (x, false)))
        .collect();
    all.sort_by_key(|(x, _)| x.start);
    let mut checked = 0;
    let mut i = 0;
    while i < all.len() {
        let start = all[i].0.start;
        let mut end = all[i].0.end();
        let mut j = i + 1;
        while j < all.len() && all[j].0.start < end {
            end = end.max(all[j].0.end());
            j += 1;
        }
        let group = &all[i..j];
        i = j;
        if !group.iter().any(|(x, _)| x.anchored) {
            continue;
        }
        if group.iter().any(|(x, _)| !x.determined || x.oversized) {
            return Ok(PatternOutcome::Inexact);
        }
        checked += 1;
        let lhs: Vec<&Block> = group.iter().filter(|g| g.1).map(|g| g.0).collect();
        let rhs: Vec<&Block> = group.iter().filter(|g| !g.1).map(|g| g.0).collect();
        let same = lhs.len() == rhs.len()
            && lhs.iter().zip(&rhs).all(|(x, y)| {
                x.start == y.start && x.width == y.width && x.action == y.action
            });
        if same {
            continue;
        }
        let width = (end - start) as u32;
        fn parts<'b>(side: &[&'b Block], start: i64) -> Vec<(u32, Part<'b>)> {
            side.iter()
                .filter_map(|x| {
                    x.action
                        .as_deref()
                        .map(|a| ((x.start - start) as u32, Part::Action(a)))
                })
                .collect()
        }
        let lp = parts(&lhs, start);
        let rp = parts(&rhs, start);
        let both: Vec<(u32, Part)> = lp.iter().chain(rp.iter()).copied().collect();
        for x in candidate_inputs(width, &both, max_bits)? {
            let y1 = apply_parts(width, &lp, x);
            let y2 = apply_parts(width, &rp, x);
            if y1 != y2 {
                return Ok(PatternOutcome::Differ(ProductVerdict::Differ {
                    occurrences: pa.occurrences.clone(),
                    start,
                    input: bits_of(x, width),
                    lhs: bits_of(y1, width),
                    rhs: bits_of(y2, width),
                }));
            }
        }
    }
    Ok(PatternOutcome::Equal(checked))
}

impl AlignedNormalForm {
    /// Exact equality of two forms built by the same evaluator over the same
    /// span. Fails with [`Error::BudgetExceeded`] if the span was too short.
    pub fn equivalent(&self, other: &AlignedNormalForm, max_component_bits: u32) -> Result<ProductVerdict> {
        compare_forms(self, other, max_component_bits)?.ok_or(Error::BudgetExceeded {
            needed: self.span as u128 + 1,
            budget: self.span as u64,
        })
    }

    /// Number of non-identity blocks anchored at the pattern origin.
    pub fn anchored_block_count(&self) -> usize {
        self.patterns
            .iter()
            .map(|p| p.active_blocks().filter(|b| b.anchored).count())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::gates::{swap_gate, toffoli_gate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn ctrl(p: &Perm, c: &str, i: i64) -> Factor {
        Factor::Ctrl(CtrlDescriptor::new(p.clone(), w(c), i).unwrap())
    }

    fn ev(base: &str) -> Evaluator {
        Evaluator::new(w(base), 2, OffsetConvention::Backward).unwrap()
    }

    #[test]
    fn patterns_respect_spacing_and_realizability() {
        let e = ev("011");
        let pats = e.patterns(7).unwrap();
        assert!(pats.iter().all(|p| p[0] == 0));
        assert!(pats.iter().all(|p| p.windows(2).all(|x| x[1] - x[0] >= 3)));
        assert!(pats.contains(&vec![0, 3]));
        assert!(pats.contains(&vec![0]));
        assert!(pats.contains(&vec![0, 4]));
    }

    #[test]
    fn unrealizable_pattern_filtered() {
        let e = Evaluator::new(w("00"), 2, OffsetConvention::Backward).unwrap();
        // 00 at 0 and at 2 without one at 1 is impossible (cells 0..3 all 0).
        assert!(!e.realizable(&[0, 2], 3));
        assert!(e.realizable(&[0, 1, 2], 3));
    }

    #[test]
    fn same_window_composes_left_first() {
        let e = ev("0111");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p1 = Perm::random(16, &mut rng);
        let p2 = Perm::random(16, &mut rng);
        let nf = e
            .symbolic_product(&[ctrl(&p1, "0111", 0), ctrl(&p2, "0111", 0)])
            .unwrap();
        let single = nf.patterns.iter().find(|p| p.occurrences == vec![0]).unwrap();
        let blocks: Vec<&Block> = single.active_blocks().collect();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].start, 0);
        let expect = ComponentAction::from_perm(&p1.then(&p2)).unwrap();
        assert_eq!(**blocks[0].action.as_ref().unwrap(), expect);
    }

    #[test]
    fn disjoint_windows_commute() {
        let e = ev("0111");
        let a = ctrl(&toffoli_gate().placed(0, 4).unwrap(), "0111", 0);
        let b = ctrl(&swap_gate().placed(1, 4).unwrap(), "0111", 4);
        let nf = e.symbolic_product(&[a.clone(), b.clone()]).unwrap();
        let single = nf.patterns.iter().find(|p| p.occurrences == vec![0]).unwrap();
        assert_eq!(single.active_blocks().count(), 2);
        // b's window for an occurrence at 4 is a's window for one at 0.
        assert!(!e.compare(&[a.clone(), b.clone()], &[b, a]).unwrap().is_equal());
        let a = ctrl(&swap_gate().placed(0, 4).unwrap(), "0111", 0);
        let b = ctrl(&swap_gate().placed(2, 4).unwrap(), "0111", 0);
        assert!(e.compare(&[a.clone(), b.clone()], &[b, a]).unwrap().is_equal());
    }

    #[test]
    fn shift_conjugation_matches_offset() {
        let e = ev("0111");
        let f = ctrl(&swap_gate(), "0111", 0);
        let lhs = [Factor::Shift(-1), f, Factor::Shift(1)];
        let rhs = [ctrl(&swap_gate(), "0111", -1)];
        assert!(e.compare(&lhs, &rhs).unwrap().is_equal());
        let wrong = [ctrl(&swap_gate(), "0111", 1)];
        assert!(matches!(
            e.compare(&lhs, &wrong).unwrap(),
            ProductVerdict::Differ { .. }
        ));
    }

    #[test]
    fn net_shift_mismatch() {
        let e = ev("01");
        assert_eq!(
            e.compare(&[Factor::Shift(1)], &[]).unwrap(),
            ProductVerdict::ShiftMismatch { lhs: 1, rhs: 0 }
        );
    }

    #[test]
    fn inverse_cancels() {
        let e = ev("0011");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = Perm::random(8, &mut rng);
        let prod = vec![ctrl(&p, "0011", 2), Factor::Shift(3), ctrl(&p, "00110011", 1)];
        let mut both = prod.clone();
        both.extend(invert_product(&prod));
        assert!(e.compare(&both, &[]).unwrap().is_equal());
    }

    #[test]
    fn foreign_control_rejected() {
        let e = ev("0011");
        let f = ctrl(&swap_gate(), "0111", 0);
        assert!(matches!(e.symbolic_product(&[f]), Err(Error::UnsupportedFactor(_))));
    }
}
