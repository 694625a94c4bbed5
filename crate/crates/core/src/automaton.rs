//! Complete deterministic automata, state sets and words.
//!
//! States and letters are 0-based indices. A word acts left to right: the
//! first letter is applied first, so `δ(q, uv) = δ(δ(q, u), v)`.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::pairs::PairMergeTable;

/// A complete deterministic transition table over `n` states and `k` letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    n: usize,
    k: usize,
    /// Row-major: `delta[q * k + l]`.
    delta: Vec<usize>,
    letter_names: Vec<String>,
}

/// Default display names: `a`, `b` for binary alphabets, `a1`..`ak` otherwise.
pub fn default_letter_names(k: usize) -> Vec<String> {
    if k == 2 {
        vec!["a".to_string(), "b".to_string()]
    } else {
        (1..=k).map(|i| format!("a{i}")).collect()
    }
}

impl Dfa {
    /// Builds an automaton from a row-major table of `n * k` targets.
    pub fn new(n: usize, k: usize, delta: Vec<usize>) -> Result<Self> {
        Self::with_letter_names(n, k, delta, default_letter_names(k))
    }

    pub fn with_letter_names(n: usize, k: usize, delta: Vec<usize>, letter_names: Vec<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAutomaton("state count must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::InvalidAutomaton("alphabet size must be at least 1".into()));
        }
        if delta.len() != n * k {
            return Err(Error::InvalidAutomaton(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                n * k
            )));
        }
        if let Some(pos) = delta.iter().position(|&t| t >= n) {
            return Err(Error::StateOutOfRange { state: delta[pos], n });
        }
        validate_letter_names(&letter_names, k)?;
        Ok(Dfa { n, k, delta, letter_names })
    }

    /// Builds an automaton from one row of targets per state.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if let Some((q, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(Error::InvalidAutomaton(format!("row {q} has a different length than row 0")));
        }
        Self::new(n, k, rows.concat())
    }

    /// Builds an automaton from one closure per letter.
    pub fn from_fn(n: usize, k: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut delta = Vec::with_capacity(n * k);
        for q in 0..n {
            for l in 0..k {
                delta.push(f(q, l));
            }
        }
        Self::new(n, k, delta)
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn num_letters(&self) -> usize {
        self.k
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letter_names
    }

    pub fn letter_name(&self, l: usize) -> &str {
        &self.letter_names[l]
    }

    /// True when the letter names are the defaults for this alphabet size.
    pub fn has_default_letter_names(&self) -> bool {
        self.letter_names == default_letter_names(self.k)
    }

    /// Replaces the display names of the letters.
    pub fn set_letter_names(&mut self, names: Vec<String>) -> Result<()> {
        validate_letter_names(&names, self.k)?;
        self.letter_names = names;
        Ok(())
    }

    /// Looks a letter up by display name, falling back to a decimal index.
    pub fn letter_by_name(&self, name: &str) -> Option<usize> {
        self.letter_names.iter().position(|s| s == name).or_else(|| name.parse::<usize>().ok().filter(|&l| l < self.k))
    }

    /// The raw row-major transition table.
    pub fn table(&self) -> &[usize] {
        &self.delta
    }

    pub fn row(&self, q: usize) -> &[usize] {
        &self.delta[q * self.k..(q + 1) * self.k]
    }

    /// The map `q -> δ(q, l)` for one letter.
    pub fn letter_map(&self, l: usize) -> Vec<usize> {
        (0..self.n).map(|q| self.delta[q * self.k + l]).collect()
    }

    #[inline]
    pub(crate) fn target(&self, q: usize, l: usize) -> usize {
        self.delta[q * self.k + l]
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::StateOutOfRange { state: q, n: self.n })
        }
    }

    fn check_letter(&self, l: usize) -> Result<()> {
        if l < self.k {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange { letter: l, k: self.k })
        }
    }

    /// `δ(q, l)`.
    pub fn step(&self, q: usize, l: usize) -> Result<usize> {
        self.check_state(q)?;
        self.check_letter(l)?;
        Ok(self.target(q, l))
    }

    /// `δ(q, w)` for a single state.
    pub fn run(&self, q: usize, w: &Word) -> Result<usize> {
        self.check_state(q)?;
        self.check_word(w)?;
        Ok(w.iter().fold(q, |q, l| self.target(q, l)))
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.iter().try_for_each(|l| self.check_letter(l))
    }

    /// The image of a state set under a letter.
    pub fn apply_letter(&self, s: &StateSet, l: usize) -> Result<StateSet> {
        self.check_letter(l)?;
        self.check_set(s)?;
        let mut out = StateSet::empty(self.n);
        for q in s.iter() {
            out.insert(self.target(q, l));
        }
        Ok(out)
    }

    /// The image `S.w` of a state set under a word.
    pub fn apply_word(&self, s: &StateSet, w: &Word) -> Result<StateSet> {
        self.check_set(s)?;
        self.check_word(w)?;
        let mut current = s.clone();
        for l in w.iter() {
            let mut next = StateSet::empty(self.n);
            for q in current.iter() {
                next.insert(self.target(q, l));
            }
            current = next;
        }
        Ok(current)
    }

    fn check_set(&self, s: &StateSet) -> Result<()> {
        if s.capacity() == self.n {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "state set over {} states applied to an automaton with {} states",
                s.capacity(),
                self.n
            )))
        }
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.n)
    }

    /// Every state fixed by all letters.
    pub fn fixed_states(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.row(q).iter().all(|&t| t == q)).collect()
    }

    /// Sink detection with a diagnostic for the several-sinks case.
    pub fn sink_status(&self) -> SinkStatus {
        let fixed = self.fixed_states();
        match fixed.len() {
            0 => SinkStatus::None,
            1 => SinkStatus::Unique(fixed[0]),
            _ => SinkStatus::Multiple(fixed),
        }
    }

    /// The unique state fixed by every letter, if there is exactly one.
    pub fn find_sink(&self) -> Option<usize> {
        match self.sink_status() {
            SinkStatus::Unique(z) => Some(z),
            _ => None,
        }
    }

    /// True iff `l` maps `domain` bijectively onto itself.
    pub fn is_permutation_on(&self, l: usize, domain: &StateSet) -> bool {
        if l >= self.k || domain.capacity() != self.n {
            return false;
        }
        let mut hit = StateSet::empty(self.n);
        for q in domain.iter() {
            let t = self.target(q, l);
            if !domain.contains(t) || hit.contains(t) {
                return false;
            }
            hit.insert(t);
        }
        true
    }

    /// Least `m >= 1` such that `l^m` is the identity, computed as the least
    /// common multiple of the cycle lengths. `None` if `l` is not a
    /// permutation of the state set.
    pub fn letter_order(&self, l: usize) -> Option<u64> {
        if !self.is_permutation_on(l, &self.full_set()) {
            return None;
        }
        let mut seen = vec![false; self.n];
        let mut order: u64 = 1;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut len: u64 = 0;
            let mut q = start;
            while !seen[q] {
                seen[q] = true;
                q = self.target(q, l);
                len += 1;
            }
            order = order.lcm(&len);
        }
        Some(order)
    }

    /// Detects almost-permutation structure, trying both letter orientations.
    pub fn classify_almost_permutation(&self) -> std::result::Result<ApProfile, ProfileMismatch> {
        if self.k != 2 {
            return Err(ProfileMismatch::NotBinary);
        }
        let sink = match self.sink_status() {
            SinkStatus::Unique(z) => z,
            SinkStatus::None => return Err(ProfileMismatch::NoSink),
            SinkStatus::Multiple(v) => return Err(ProfileMismatch::MultipleSinks(v)),
        };
        let full = self.full_set();
        let found: Vec<ApProfile> = [(0usize, 1usize), (1, 0)]
            .into_iter()
            .filter_map(|(perm, collapse)| {
                if !self.is_permutation_on(perm, &full) {
                    return None;
                }
                let mut pre = (0..self.n).filter(|&q| q != sink && self.target(q, collapse) == sink);
                let r = pre.next()?;
                if pre.next().is_some() {
                    return None;
                }
                let mut rest = full.clone();
                rest.remove(r);
                self.is_permutation_on(collapse, &rest).then_some(ApProfile {
                    sink,
                    pre_sink: r,
                    perm_letter: perm,
                    collapse_letter: collapse,
                })
            })
            .collect();
        match found.len() {
            0 => Err(ProfileMismatch::NoOrientation),
            1 => Ok(found[0]),
            _ => Err(ProfileMismatch::Ambiguous),
        }
    }

    /// Almost-permutation profile, or `None`. Does not check synchronization.
    pub fn almost_permutation_profile(&self) -> Option<ApProfile> {
        self.classify_almost_permutation().ok()
    }

    /// True iff some word sends every state to one state.
    ///
    /// With a sink this is reachability of the sink from every state;
    /// otherwise every pair of states has to be mergeable.
    pub fn is_synchronizing(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        match self.sink_status() {
            SinkStatus::Unique(z) => self.all_reach(z),
            SinkStatus::Multiple(_) => false,
            SinkStatus::None => PairMergeTable::new(self).all_mergeable(),
        }
    }

    /// True iff `target` is reachable from every state.
    pub(crate) fn all_reach(&self, target: usize) -> bool {
        let preds = self.predecessors();
        let mut seen = vec![false; self.n];
        seen[target] = true;
        let mut queue = VecDeque::from([target]);
        let mut count = 1;
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !seen[p] {
                    seen[p] = true;
                    count += 1;
                    queue.push_back(p);
                }
            }
        }
        count == self.n
    }

    /// For each state, the states with a transition into it (any letter, deduplicated).
    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.n];
        for q in 0..self.n {
            for &t in self.row(q) {
                if preds[t].last() != Some(&q) {
                    preds[t].push(q);
                }
            }
        }
        preds
    }

    /// Renames state `q` to `perm[q]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Dfa> {
        check_bijection(perm, self.n)?;
        let mut delta = vec![0; self.n * self.k];
        for q in 0..self.n {
            for l in 0..self.k {
                delta[perm[q] * self.k + l] = perm[self.target(q, l)];
            }
        }
        Ok(Dfa { n: self.n, k: self.k, delta, letter_names: self.letter_names.clone() })
    }
}

/// Checks that `perm` is a bijection on `0..n`.
pub fn check_bijection(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::NotBijection(format!("length {} for {} states", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotBijection(format!("value {p} out of range or repeated")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a bijection on `0..perm.len()`.
pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    check_bijection(perm, perm.len())?;
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    Ok(inv)
}

fn validate_letter_names(names: &[String], k: usize) -> Result<()> {
    if names.len() != k {
        return Err(Error::InvalidAutomaton(format!("{} letter names for an alphabet of size {k}", names.len())));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(Error::InvalidAutomaton(format!("bad letter name {name:?}")));
        }
        if names[..i].contains(name) {
            return Err(Error::InvalidAutomaton(format!("duplicate letter name {name:?}")));
        }
    }
    Ok(())
}

/// Result of sink detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SinkStatus {
    None,
    Unique(usize),
    /// Several states are fixed by every letter; such an automaton never synchronizes.
    Multiple(Vec<usize>),
}

/// Almost-permutation structure: one letter permutes all states, the other
/// permutes everything except the pre-sink state, which it sends to the sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ApProfile {
    pub sink: usize,
    pub pre_sink: usize,
    pub perm_letter: usize,
    pub collapse_letter: usize,
}

/// Why [`Dfa::classify_almost_permutation`] found no profile.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileMismatch {
    #[error("alphabet is not binary")]
    NotBinary,
    #[error("no sink state")]
    NoSink,
    #[error("several states are fixed by every letter: {0:?}")]
    MultipleSinks(Vec<usize>),
    #[error("neither letter orientation satisfies the almost-permutation conditions")]
    NoOrientation,
    #[error("both letter orientations satisfy the almost-permutation conditions")]
    Ambiguous,
}

/// A subset of `0..n` stored as a bit mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    n: usize,
    blocks: Vec<u64>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet { n, blocks: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for q in 0..n {
            s.insert(q);
        }
        s
    }

    pub fn singleton(n: usize, q: usize) -> Result<Self> {
        Self::from_states(n, [q])
    }

    pub fn from_states(n: usize, states: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for q in states {
            if q >= n {
                return Err(Error::StateOutOfRange { state: q, n });
            }
            s.insert(q);
        }
        Ok(s)
    }

    /// Builds a set over at most 64 states from a raw mask.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > 64 || (n < 64 && mask >> n != 0) {
            return Err(Error::InvalidParameter(format!("mask {mask:#x} does not fit {n} states")));
        }
        let mut s = Self::empty(n);
        if n > 0 {
            s.blocks[0] = mask;
        }
        Ok(s)
    }

    /// Number of states this set ranges over.
    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn contains(&self, q: usize) -> bool {
        q < self.n && self.blocks[q / 64] >> (q % 64) & 1 == 1
    }

    /// Panics if `q` is out of range.
    pub fn insert(&mut self, q: usize) {
        assert!(q < self.n, "state {q} out of range for {} states", self.n);
        self.blocks[q / 64] |= 1 << (q % 64);
    }

    pub fn remove(&mut self, q: usize) {
        if q < self.n {
            self.blocks[q / 64] &= !(1 << (q % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let tz = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(i * 64 + tz)
            })
        })
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

/// A finite word over letter indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    /// Parses a word over the binary alphabet written with `a` and `b`.
    pub fn from_ab(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '.' && *c != '·')
            .map(|c| match c {
                'a' => Ok(0),
                'b' => Ok(1),
                other => Err(Error::InvalidParameter(format!("letter {other:?} is not a or b"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Parses a word using the automaton's letter names. Single-character
    /// names may be concatenated; longer names must be space-separated.
    pub fn parse_with(dfa: &Dfa, s: &str) -> Result<Self> {
        let lookup = |tok: &str| {
            dfa.letter_names()
                .iter()
                .position(|n| n == tok)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown letter {tok:?}")))
        };
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            match lookup(tok) {
                Ok(l) => letters.push(l),
                Err(e) => {
                    // fall back to a run of single-character names
                    let mut buf = [0u8; 4];
                    for c in tok.chars() {
                        letters.push(lookup(c.encode_utf8(&mut buf)).map_err(|_| e.clone())?);
                    }
                }
            }
        }
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, l: usize) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    /// `self` repeated `times` times.
    pub fn power(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// Word without its last letter.
    pub fn without_last(&self) -> Word {
        Word(self.0[..self.0.len().saturating_sub(1)].to_vec())
    }

    /// Renders the word with the automaton's letter names.
    pub fn display_with(&self, dfa: &Dfa) -> String {
        let names = dfa.letter_names();
        let single = names.iter().all(|n| n.chars().count() == 1);
        let parts = self.iter().map(|l| names.get(l).map_or("?", String::as_str));
        if single {
            parts.collect()
        } else {
            parts.collect::<Vec<_>>().join(" ")
        }
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl FromIterator<usize> for Word {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}
