//! Alignment resolution: choose a conflict-free subset of candidates.
//!
//! Objective, in order: most covered tokens (hypothesis plus reference),
//! highest weighted credit, fewest chunks, smallest total positional
//! distance. Sets of at most [`EXHAUSTIVE_LIMIT`] candidates are searched
//! by subset enumeration. Larger sets use a search over hypothesis
//! positions. A [`BEAM_WIDTH`] beam runs first, ranking states by an
//! optimistic bound on their completion. Its result seeds a second pass
//! that discards only states which provably cannot beat it; states with
//! identical futures (same used tokens, same open chunk end) are merged.
//! That pass is exact while its frontier stays within [`EXACT_FRONTIER`]
//! states and falls back to the beam rule if it overflows.

use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matchgen::{CandidateMatch, MatchSet};

pub const EXHAUSTIVE_LIMIT: usize = 12;
pub const BEAM_WIDTH: usize = 40;
/// Frontier size up to which the position search keeps every state.
pub const EXACT_FRONTIER: usize = 65536;

/// Search budget for [`align_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest candidate count searched by subset enumeration.
    pub exhaustive: usize,
    /// States kept per position once the frontier has overflowed.
    pub beam_width: usize,
    /// Frontier size that triggers beam pruning; `0` prunes from the start.
    pub exact_frontier: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            exhaustive: EXHAUSTIVE_LIMIT,
            beam_width: BEAM_WIDTH,
            exact_frontier: EXACT_FRONTIER,
        }
    }
}

/// Fixed-point scale for weighted credit, so that sums are exact and
/// independent of addition order.
const CREDIT_SCALE: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alignment {
    pub matches: Vec<CandidateMatch>,
    pub chunks: usize,
    pub total_weighted: f64,
    pub covered_hyp: usize,
    pub covered_ref: usize,
}

impl Alignment {
    pub fn empty() -> Self {
        Alignment {
            matches: Vec::new(),
            chunks: 0,
            total_weighted: 0.0,
            covered_hyp: 0,
            covered_ref: 0,
        }
    }

    pub fn covered(&self) -> usize {
        self.covered_hyp + self.covered_ref
    }
}

fn credit_units(c: &CandidateMatch) -> i64 {
    (c.credit() * CREDIT_SCALE).round() as i64
}

fn distance(c: &CandidateMatch) -> usize {
    c.hyp.start.abs_diff(c.reference.start)
}

/// Contiguous in both sides and in the same order.
fn continues(prev: &CandidateMatch, next: &CandidateMatch) -> bool {
    prev.hyp.end == next.hyp.start && prev.reference.end == next.reference.start
}

/// Number of maximal runs of matches that are adjacent and identically
/// ordered in hypothesis and reference. Input must be sorted by hypothesis
/// position and conflict-free.
pub fn count_chunks(matches: &[CandidateMatch]) -> Result<usize> {
    let mut chunks = 0;
    for (i, m) in matches.iter().enumerate() {
        if i > 0 {
            let prev = &matches[i - 1];
            if m.hyp.start < prev.hyp.end {
                return Err(Error::Internal(format!(
                    "count_chunks: matches unsorted or overlapping at hypothesis position {}",
                    m.hyp.start
                )));
            }
            if continues(prev, m) {
                continue;
            }
        }
        chunks += 1;
    }
    Ok(chunks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Objective {
    covered: usize,
    units: i64,
    chunks: usize,
    distance: usize,
}

impl Objective {
    fn key(&self) -> (usize, i64, Reverse<usize>, Reverse<usize>) {
        (self.covered, self.units, Reverse(self.chunks), Reverse(self.distance))
    }

    /// `Greater` means better.
    fn cmp_quality(&self, other: &Objective) -> Ordering {
        self.key().cmp(&other.key())
    }
}

pub fn align(set: &MatchSet) -> Alignment {
    align_with(set, SearchLimits::default())
}

pub fn align_with(set: &MatchSet, limits: SearchLimits) -> Alignment {
    if set.candidates.is_empty() {
        return Alignment::empty();
    }
    let mut order: Vec<usize> = (0..set.candidates.len()).collect();
    order.sort_by_key(|&i| {
        let c = &set.candidates[i];
        (c.hyp.start, c.reference.start, c.hyp.end, c.reference.end)
    });
    let cands: Vec<&CandidateMatch> = order.iter().map(|&i| &set.candidates[i]).collect();
    let chosen = if cands.len() <= limits.exhaustive.min(31) {
        exhaustive(&cands)
    } else {
        beam(&cands, set.hyp_len, set.ref_len, limits)
    };
    build(chosen.into_iter().map(|i| cands[i].clone()).collect())
}

fn build(mut matches: Vec<CandidateMatch>) -> Alignment {
    matches.sort_by_key(|m| m.hyp.start);
    let chunks = count_chunks(&matches).expect("aligner produced overlapping matches");
    Alignment {
        total_weighted: matches.iter().map(CandidateMatch::credit).sum(),
        covered_hyp: matches.iter().map(|m| m.hyp.len()).sum(),
        covered_ref: matches.iter().map(|m| m.reference.len()).sum(),
        chunks,
        matches,
    }
}

/// Candidate indices must already be sorted by hypothesis start.
fn exhaustive(cands: &[&CandidateMatch]) -> Vec<usize> {
    let n = cands.len();
    let conflicts: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && cands[i].conflicts(cands[j]))
                .fold(0u32, |acc, j| acc | (1 << j))
        })
        .collect();
    let mut best_mask = 0u32;
    let mut best = Objective::default();
    for mask in 1u32..(1u32 << n) {
        if (0..n).any(|i| mask & (1 << i) != 0 && conflicts[i] & mask != 0) {
            continue;
        }
        let mut obj = Objective::default();
        let mut prev: Option<&CandidateMatch> = None;
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            let c = cands[i];
            obj.covered += c.hyp.len() + c.reference.len();
            obj.units += credit_units(c);
            obj.distance += distance(c);
            if !prev.is_some_and(|p| continues(p, c)) {
                obj.chunks += 1;
            }
            prev = Some(c);
        }
        if obj.cmp_quality(&best) == Ordering::Greater {
            best = obj;
            best_mask = mask;
        }
    }
    (0..n).filter(|i| best_mask & (1 << i) != 0).collect()
}

/// Token set; sentences up to 128 tokens stay inline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Bits {
    Inline([u64; 2]),
    Heap(Box<[u64]>),
}

impl Bits {
    fn new(len: usize) -> Self {
        if len <= 128 {
            Bits::Inline([0; 2])
        } else {
            Bits::Heap(vec![0; len.div_ceil(64)].into_boxed_slice())
        }
    }

    fn words(&self) -> &[u64] {
        match self {
            Bits::Inline(w) => w,
            Bits::Heap(w) => w,
        }
    }

    fn words_mut(&mut self) -> &mut [u64] {
        match self {
            Bits::Inline(w) => w,
            Bits::Heap(w) => w,
        }
    }

    fn get(&self, i: usize) -> bool {
        self.words()[i / 64] & (1 << (i % 64)) != 0
    }

    fn any_in(&self, start: usize, end: usize) -> bool {
        (start..end).any(|i| self.get(i))
    }

    fn set_range(&mut self, start: usize, end: usize) {
        let words = self.words_mut();
        for i in start..end {
            words[i / 64] |= 1 << (i % 64);
        }
    }

    /// Copy with bits below `from` cleared.
    fn tail_from(&self, from: usize) -> Bits {
        let mut out = self.clone();
        for (w, word) in out.words_mut().iter_mut().enumerate() {
            *word &= high_mask(w, from);
        }
        out
    }

    /// Every bit at or above `from` set in `self` is also set in `other`.
    fn subset_of(&self, other: &Bits, from: usize) -> bool {
        self.words()
            .iter()
            .zip(other.words())
            .enumerate()
            .all(|(w, (a, b))| a & !b & high_mask(w, from) == 0)
    }
}

/// Mask of the bits of word `w` at positions `>= from`.
fn high_mask(w: usize, from: usize) -> u64 {
    let lo = w * 64;
    if from <= lo {
        u64::MAX
    } else if from >= lo + 64 {
        0
    } else {
        u64::MAX << (from - lo)
    }
}

/// Chosen candidates as a linked trail shared between states.
const NO_NODE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct State {
    hyp_used: Bits,
    ref_used: Bits,
    trail: u32,
    last: Option<usize>,
    obj: Objective,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct StateKey {
    ref_used: Bits,
    hyp_ahead: Bits,
    open_chunk: Option<(usize, usize)>,
}

/// Optimistic completion of a state, scaled by `BOUND_SCALE`: covered
/// tokens and credit units it could still reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Bound {
    covered: i64,
    units: i64,
}

/// Shares of a candidate's gain are spread over its tokens; the scale makes
/// them integers for spans up to six tokens and rounds up beyond.
const BOUND_SCALE: i64 = 60;

fn share(total: i64, len: usize) -> i64 {
    (total * BOUND_SCALE + len as i64 - 1) / len as i64
}

/// A candidate that may still be chosen, with its per-token gain shares.
struct Pending<'a> {
    cand: &'a CandidateMatch,
    hyp_cover: i64,
    hyp_units: i64,
    ref_cover: i64,
    ref_units: i64,
}

/// Per-token maxima over candidates still compatible with a state, summed
/// on each side; the smaller side bounds the gain.
struct Bounder<'a> {
    pending: Vec<Pending<'a>>,
    hyp: Vec<(i64, i64)>,
    reference: Vec<(i64, i64)>,
}

impl<'a> Bounder<'a> {
    fn new(cands: &[&'a CandidateMatch], hyp_len: usize, ref_len: usize) -> Self {
        Bounder {
            pending: cands
                .iter()
                .map(|&c| {
                    let cover = (c.hyp.len() + c.reference.len()) as i64;
                    let units = credit_units(c);
                    Pending {
                        cand: c,
                        hyp_cover: share(cover, c.hyp.len()),
                        hyp_units: share(units, c.hyp.len()),
                        ref_cover: share(cover, c.reference.len()),
                        ref_units: share(units, c.reference.len()),
                    }
                })
                .collect(),
            hyp: vec![(0, 0); hyp_len],
            reference: vec![(0, 0); ref_len],
        }
    }

    /// Forget candidates starting at or before `pos`.
    fn advance(&mut self, pos: usize) {
        self.pending.retain(|p| p.cand.hyp.start > pos);
    }

    fn bound(&mut self, s: &State) -> Bound {
        self.hyp.iter_mut().for_each(|x| *x = (0, 0));
        self.reference.iter_mut().for_each(|x| *x = (0, 0));
        for p in &self.pending {
            let c = p.cand;
            if s.ref_used.any_in(c.reference.start, c.reference.end) || s.hyp_used.any_in(c.hyp.start, c.hyp.end) {
                continue;
            }
            for slot in &mut self.hyp[c.hyp.start..c.hyp.end] {
                slot.0 = slot.0.max(p.hyp_cover);
                slot.1 = slot.1.max(p.hyp_units);
            }
            for slot in &mut self.reference[c.reference.start..c.reference.end] {
                slot.0 = slot.0.max(p.ref_cover);
                slot.1 = slot.1.max(p.ref_units);
            }
        }
        let sum = |v: &[(i64, i64)]| v.iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
        let (h, r) = (sum(&self.hyp), sum(&self.reference));
        Bound {
            covered: s.obj.covered as i64 * BOUND_SCALE + h.0.min(r.0),
            units: s.obj.units * BOUND_SCALE + h.1.min(r.1),
        }
    }
}

fn open_chunk(s: &State, cands: &[&CandidateMatch], pos: usize) -> Option<(usize, usize)> {
    s.last
        .map(|l| cands[l])
        .filter(|c| c.hyp.end > pos)
        .map(|c| (c.hyp.end, c.reference.end))
}

/// `a` is at least as good as `b` now and every completion of `b` is also
/// open to `a`, so `b` can be dropped without losing the optimum.
fn dominates(a: &State, b: &State, cands: &[&CandidateMatch], pos: usize) -> bool {
    if a.obj.cmp_quality(&b.obj) == Ordering::Less {
        return false;
    }
    let b_open = open_chunk(b, cands, pos);
    if b_open.is_some() && open_chunk(a, cands, pos) != b_open {
        return false;
    }
    a.ref_used.subset_of(&b.ref_used, 0) && a.hyp_used.subset_of(&b.hyp_used, pos + 1)
}

fn beam(cands: &[&CandidateMatch], hyp_len: usize, ref_len: usize, limits: SearchLimits) -> Vec<usize> {
    let mut by_start: Vec<Vec<usize>> = vec![Vec::new(); hyp_len];
    for (i, c) in cands.iter().enumerate() {
        by_start[c.hyp.start].push(i);
    }
    let search = Search {
        cands,
        by_start: &by_start,
        hyp_len,
        ref_len,
        beam_width: limits.beam_width.max(1),
    };
    let (quick_obj, quick) = search.run(0, None);
    if limits.exact_frontier == 0 {
        return quick;
    }
    // The beam result seeds an exact pass that prunes against it.
    let (obj, chosen) = search.run(limits.exact_frontier, Some(quick_obj));
    if obj.cmp_quality(&quick_obj) == Ordering::Greater {
        chosen
    } else {
        quick
    }
}

struct Search<'a> {
    cands: &'a [&'a CandidateMatch],
    by_start: &'a [Vec<usize>],
    hyp_len: usize,
    ref_len: usize,
    beam_width: usize,
}

/// `s`, with optimistic completion `b`, cannot end strictly better than
/// `best`. Chunks and distance never decrease as matches are added.
fn cannot_beat(b: &Bound, s: &Objective, best: &Objective) -> bool {
    let covered = best.covered as i64 * BOUND_SCALE;
    let units = best.units * BOUND_SCALE;
    (b.covered, b.units) < (covered, units)
        || ((b.covered, b.units) == (covered, units) && (s.chunks, s.distance) >= (best.chunks, best.distance))
}

impl Search<'_> {
    /// Search over hypothesis positions. The frontier is kept whole until it
    /// exceeds `exact_frontier` states, then cut to the beam width.
    fn run(&self, exact_frontier: usize, incumbent: Option<Objective>) -> (Objective, Vec<usize>) {
        let cands = self.cands;
        let mut trail: Vec<(u32, u32)> = Vec::new();
        let mut bounder = Bounder::new(cands, self.hyp_len, self.ref_len);
        let mut states = vec![State {
            hyp_used: Bits::new(self.hyp_len),
            ref_used: Bits::new(self.ref_len),
            trail: NO_NODE,
            last: None,
            obj: Objective::default(),
        }];

        let mut capped = false;
        for (pos, starting) in self.by_start.iter().enumerate() {
            if starting.is_empty() {
                continue;
            }
            let mut next: Vec<State> = Vec::with_capacity(states.len() * (starting.len() + 1));
            let mut seen: HashMap<StateKey, usize> = HashMap::with_capacity(next.capacity());
            let mut offer = |state: State, next: &mut Vec<State>| {
                let key = StateKey {
                    ref_used: state.ref_used.clone(),
                    hyp_ahead: state.hyp_used.tail_from(pos + 1),
                    open_chunk: open_chunk(&state, cands, pos),
                };
                match seen.get(&key) {
                    Some(&idx) => {
                        if state.obj.cmp_quality(&next[idx].obj) == Ordering::Greater {
                            next[idx] = state;
                        }
                    }
                    None => {
                        seen.insert(key, next.len());
                        next.push(state);
                    }
                }
            };

            for state in &states {
                if !state.hyp_used.get(pos) {
                    for &ci in starting {
                        let c = cands[ci];
                        if state.hyp_used.any_in(c.hyp.start, c.hyp.end)
                            || state.ref_used.any_in(c.reference.start, c.reference.end)
                        {
                            continue;
                        }
                        let mut s = state.clone();
                        s.hyp_used.set_range(c.hyp.start, c.hyp.end);
                        s.ref_used.set_range(c.reference.start, c.reference.end);
                        s.obj.covered += c.hyp.len() + c.reference.len();
                        s.obj.units += credit_units(c);
                        s.obj.distance += distance(c);
                        if !s.last.is_some_and(|l| continues(cands[l], c)) {
                            s.obj.chunks += 1;
                        }
                        trail.push((state.trail, ci as u32));
                        s.trail = (trail.len() - 1) as u32;
                        s.last = Some(ci);
                        offer(s, &mut next);
                    }
                }
                offer(state.clone(), &mut next);
            }
            bounder.advance(pos);
            let mut ranked: Vec<(Bound, State)> = next.into_iter().map(|s| (bounder.bound(&s), s)).collect();
            // A state whose best completion covers less than some state
            // already covers can never win.
            let reached = ranked.iter().map(|(_, s)| s.obj.covered).max().unwrap_or(0) as i64 * BOUND_SCALE;
            ranked.retain(|(b, _)| b.covered >= reached);
            if let Some(best) = &incumbent {
                ranked.retain(|(b, s)| !cannot_beat(b, &s.obj, best));
                if ranked.is_empty() {
                    return (Objective::default(), Vec::new());
                }
            }
            capped |= ranked.len() > exact_frontier;
            if !capped {
                states = ranked.into_iter().map(|(_, s)| s).collect();
                continue;
            }
            // Stable: equal states keep generation order.
            ranked.sort_by_key(|(b, s)| (Reverse(*b), s.obj.chunks, s.obj.distance));
            let mut kept: Vec<State> = Vec::with_capacity(self.beam_width);
            for (_, s) in ranked {
                if kept.len() == self.beam_width {
                    break;
                }
                if !kept.iter().any(|k| dominates(k, &s, cands, pos)) {
                    kept.push(s);
                }
            }
            states = kept;
        }

        let best = states
            .into_iter()
            .reduce(|best, s| if s.obj.cmp_quality(&best.obj) == Ordering::Greater { s } else { best })
            .expect("search never empties");
        let mut chosen = Vec::new();
        let mut node = best.trail;
        while node != NO_NODE {
            let (parent, ci) = trail[node as usize];
            chosen.push(ci as usize);
            node = parent;
        }
        chosen.reverse();
        (best.obj, chosen)
    }
}
