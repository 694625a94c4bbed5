//! Reset thresholds: exact breadth-first search over the power set, an
//! exhaustive word-enumeration oracle, and a greedy upper bound.
//!
//! The exact search runs level by level from the full state set, expanding
//! letters in index order. Each level is kept as a vector in discovery order,
//! which makes discovery order coincide with the lexicographic order of the
//! least word reaching each subset. The first singleton found is therefore
//! reached by the lexicographically least shortest reset word, and the
//! witness is recovered by scanning the levels backwards for the first
//! (subset, letter) pair producing the current subset.

use std::hash::Hash;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::automaton::{Dfa, Word};
use crate::error::{Error, Result};
use crate::pairs::PairMergeTable;

/// Default cap on the number of distinct subsets visited.
pub const DEFAULT_MAX_SUBSETS: u64 = 1 << 26;

/// Largest state count for which visited subsets are tracked in a dense bitmap.
const DENSE_MAX_STATES: usize = 30;

/// Outcome of a successful reset-threshold computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtResult {
    /// Length of a shortest reset word.
    pub threshold: usize,
    /// A reset word of exactly `threshold` letters.
    pub witness: Word,
    /// Distinct subsets visited by the search (words examined, for the brute-force oracle).
    pub explored: u64,
    pub synchronizing: bool,
}

/// Resource caps for the exact search. A search that hits a cap reports
/// [`SolveError::LimitExceeded`] rather than a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    pub max_subsets: u64,
    /// `None` means `n²`.
    pub max_length: Option<usize>,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits { max_subsets: DEFAULT_MAX_SUBSETS, max_length: None }
    }
}

impl SolverLimits {
    pub fn new(max_subsets: u64, max_length: Option<usize>) -> Result<Self> {
        let limits = SolverLimits { max_subsets, max_length };
        limits.validate()?;
        Ok(limits)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_subsets == 0 {
            return Err(Error::InvalidParameter("max_subsets must be positive".into()));
        }
        if self.max_length == Some(0) {
            return Err(Error::InvalidParameter("max_length must be positive".into()));
        }
        Ok(())
    }

    fn length_cap(&self, n: usize) -> usize {
        self.max_length.unwrap_or(n.saturating_mul(n))
    }
}

/// Why the exact search produced no threshold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("not synchronizing ({explored} subsets reachable, none a singleton)")]
    NotSynchronizing { explored: u64 },
    #[error("limit exceeded: {reason} (explored {explored} subsets, depth {depth})")]
    LimitExceeded { reason: String, explored: u64, depth: usize },
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// Exact reset threshold with the lexicographically least shortest reset word.
pub fn exact_reset_threshold(dfa: &Dfa, limits: &SolverLimits) -> Result<RtResult, SolveError> {
    limits.validate()?;
    let n = dfa.num_states();
    let (letters, explored) = if n <= DENSE_MAX_STATES {
        bfs(DenseSpace::<u32>::new(dfa), dfa, limits)?
    } else if n <= 32 {
        bfs(HashSpace::<u32>::new(dfa), dfa, limits)?
    } else if n <= 64 {
        bfs(HashSpace::<u64>::new(dfa), dfa, limits)?
    } else {
        bfs(WideSpace::new(dfa), dfa, limits)?
    };
    Ok(RtResult { threshold: letters.len(), witness: Word::from_letters(letters), explored, synchronizing: true })
}

/// The state of the search: subset encoding, letter images and visited set.
trait Space {
    type Mask: Clone + Eq;
    fn full(&self) -> Self::Mask;
    fn image(&self, m: &Self::Mask, l: usize) -> Self::Mask;
    fn is_singleton(m: &Self::Mask) -> bool;
    /// Marks `m` visited; true if it was new.
    fn insert(&mut self, m: &Self::Mask) -> bool;
    fn visited(&self) -> u64;
}

fn bfs<S: Space>(mut space: S, dfa: &Dfa, limits: &SolverLimits) -> Result<(Vec<usize>, u64), SolveError> {
    let k = dfa.num_letters();
    let max_len = limits.length_cap(dfa.num_states());
    let full = space.full();
    space.insert(&full);
    if S::is_singleton(&full) {
        return Ok((Vec::new(), 1));
    }
    let mut levels: Vec<Vec<S::Mask>> = vec![vec![full]];
    loop {
        let depth = levels.len() - 1;
        let current = levels.last().expect("at least one level");
        if current.is_empty() {
            return Err(SolveError::NotSynchronizing { explored: space.visited() });
        }
        if depth + 1 > max_len {
            return Err(SolveError::LimitExceeded {
                reason: format!("no reset word of length at most {max_len}"),
                explored: space.visited(),
                depth,
            });
        }
        let mut next = Vec::new();
        for (idx, m) in current.iter().enumerate() {
            for l in 0..k {
                let img = space.image(m, l);
                if !space.insert(&img) {
                    continue;
                }
                if S::is_singleton(&img) {
                    let mut word = vec![l];
                    let mut target = current[idx].clone();
                    for level in levels[..depth].iter().rev() {
                        let (parent, letter) = first_parent(&space, level, &target, k);
                        word.push(letter);
                        target = parent;
                    }
                    word.reverse();
                    return Ok((word, space.visited()));
                }
                if space.visited() > limits.max_subsets {
                    return Err(SolveError::LimitExceeded {
                        reason: format!("more than {} subsets", limits.max_subsets),
                        explored: space.visited(),
                        depth,
                    });
                }
                next.push(img);
            }
        }
        levels.push(next);
    }
}

/// The first (subset, letter) in expansion order of `level` whose image is `target`.
fn first_parent<S: Space>(space: &S, level: &[S::Mask], target: &S::Mask, k: usize) -> (S::Mask, usize) {
    level
        .iter()
        .find_map(|m| (0..k).find(|&l| space.image(m, l) == *target).map(|l| (m.clone(), l)))
        .expect("every subset in a level has a parent in the previous level")
}

/// Masks of at most 64 bits.
trait NarrowMask: Copy + Eq + Hash {
    fn from_u64(x: u64) -> Self;
    fn to_u64(self) -> u64;
}

impl NarrowMask for u32 {
    fn from_u64(x: u64) -> Self {
        x as u32
    }
    fn to_u64(self) -> u64 {
        self as u64
    }
}

impl NarrowMask for u64 {
    fn from_u64(x: u64) -> Self {
        x
    }
    fn to_u64(self) -> u64 {
        self
    }
}

/// Per-letter byte-sliced image tables: the image of a mask is the union of
/// the images of its bytes.
struct ByteImages {
    n: usize,
    bytes: usize,
    table: Vec<u64>,
}

impl ByteImages {
    fn new(dfa: &Dfa) -> Self {
        let n = dfa.num_states();
        assert!(n <= 64);
        let k = dfa.num_letters();
        let bytes = n.div_ceil(8);
        let mut table = vec![0u64; k * bytes * 256];
        for l in 0..k {
            for b in 0..bytes {
                let base = (l * bytes + b) * 256;
                for v in 1..256usize {
                    // build from the value with its lowest bit cleared
                    let low = v.trailing_zeros() as usize;
                    let q = b * 8 + low;
                    let bit = if q < n { 1u64 << dfa.target(q, l) } else { 0 };
                    table[base + v] = table[base + (v & (v - 1))] | bit;
                }
            }
        }
        ByteImages { n, bytes, table }
    }

    #[inline]
    fn image(&self, mut m: u64, l: usize) -> u64 {
        let mut out = 0;
        let mut base = l * self.bytes * 256;
        while m != 0 {
            out |= self.table[base + (m & 0xff) as usize];
            m >>= 8;
            base += 256;
        }
        out
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }
}

/// Visited set as one bit per subset of `0..n`.
struct DenseSpace<M> {
    images: ByteImages,
    bits: Vec<u64>,
    count: u64,
    _mask: std::marker::PhantomData<M>,
}

impl<M: NarrowMask> DenseSpace<M> {
    fn new(dfa: &Dfa) -> Self {
        let n = dfa.num_states();
        let words = ((1usize << n) / 64).max(1);
        DenseSpace { images: ByteImages::new(dfa), bits: vec![0; words], count: 0, _mask: Default::default() }
    }
}

impl<M: NarrowMask> Space for DenseSpace<M> {
    type Mask = M;
    fn full(&self) -> M {
        M::from_u64(self.images.full())
    }
    #[inline]
    fn image(&self, m: &M, l: usize) -> M {
        M::from_u64(self.images.image(m.to_u64(), l))
    }
    fn is_singleton(m: &M) -> bool {
        m.to_u64().count_ones() == 1
    }
    #[inline]
    fn insert(&mut self, m: &M) -> bool {
        let x = m.to_u64() as usize;
        let (w, b) = (x / 64, x % 64);
        let fresh = self.bits[w] >> b & 1 == 0;
        if fresh {
            self.bits[w] |= 1 << b;
            self.count += 1;
        }
        fresh
    }
    fn visited(&self) -> u64 {
        self.count
    }
}

/// Visited set as a hash set of narrow masks.
struct HashSpace<M> {
    images: ByteImages,
    seen: FxHashSet<M>,
}

impl<M: NarrowMask> HashSpace<M> {
    fn new(dfa: &Dfa) -> Self {
        HashSpace { images: ByteImages::new(dfa), seen: FxHashSet::default() }
    }
}

impl<M: NarrowMask> Space for HashSpace<M> {
    type Mask = M;
    fn full(&self) -> M {
        M::from_u64(self.images.full())
    }
    fn image(&self, m: &M, l: usize) -> M {
        M::from_u64(self.images.image(m.to_u64(), l))
    }
    fn is_singleton(m: &M) -> bool {
        m.to_u64().count_ones() == 1
    }
    fn insert(&mut self, m: &M) -> bool {
        self.seen.insert(*m)
    }
    fn visited(&self) -> u64 {
        self.seen.len() as u64
    }
}

/// Fallback for more than 64 states: multi-word masks.
struct WideSpace {
    n: usize,
    targets: Vec<Vec<usize>>,
    seen: FxHashSet<Box<[u64]>>,
}

impl WideSpace {
    fn new(dfa: &Dfa) -> Self {
        let targets = (0..dfa.num_letters()).map(|l| dfa.letter_map(l)).collect();
        WideSpace { n: dfa.num_states(), targets, seen: FxHashSet::default() }
    }
}

impl Space for WideSpace {
    type Mask = Box<[u64]>;
    fn full(&self) -> Box<[u64]> {
        let mut m = vec![0u64; self.n.div_ceil(64)];
        for q in 0..self.n {
            m[q / 64] |= 1 << (q % 64);
        }
        m.into()
    }
    fn image(&self, m: &Box<[u64]>, l: usize) -> Box<[u64]> {
        let targets = &self.targets[l];
        let mut out = vec![0u64; m.len()];
        for (i, &block) in m.iter().enumerate() {
            let mut b = block;
            while b != 0 {
                let q = i * 64 + b.trailing_zeros() as usize;
                b &= b - 1;
                let t = targets[q];
                out[t / 64] |= 1 << (t % 64);
            }
        }
        out.into()
    }
    fn is_singleton(m: &Box<[u64]>) -> bool {
        m.iter().map(|b| b.count_ones()).sum::<u32>() == 1
    }
    fn insert(&mut self, m: &Box<[u64]>) -> bool {
        self.seen.insert(m.clone())
    }
    fn visited(&self) -> u64 {
        self.seen.len() as u64
    }
}

/// Independent oracle: tries every word in length-then-lexicographic order
/// and returns the first reset word, or `None` if there is none of length at
/// most `max_length`. No subset pruning.
pub fn brute_force_rt(dfa: &Dfa, max_length: usize) -> Option<RtResult> {
    let n = dfa.num_states();
    let k = dfa.num_letters();
    let mut examined: u64 = 0;
    for len in 0..=max_length {
        let mut word = vec![0usize; len];
        loop {
            examined += 1;
            let end = |q: usize| word.iter().fold(q, |q, &l| dfa.target(q, l));
            let first = end(0);
            if (1..n).all(|q| end(q) == first) {
                return Some(RtResult {
                    threshold: len,
                    witness: Word::from_letters(word),
                    explored: examined,
                    synchronizing: true,
                });
            }
            if !next_word(&mut word, k) {
                break;
            }
        }
    }
    None
}

/// Advances to the next word of the same length; false after the last one.
fn next_word(word: &mut [usize], k: usize) -> bool {
    for pos in (0..word.len()).rev() {
        word[pos] += 1;
        if word[pos] < k {
            return true;
        }
        word[pos] = 0;
    }
    false
}

/// Greedy reset word: repeatedly applies a shortest word merging some pair of
/// the current image. `None` if the automaton is not synchronizing.
pub fn greedy_upper_bound(dfa: &Dfa) -> Option<Word> {
    let table = PairMergeTable::new(dfa);
    let mut current = dfa.full_set();
    let mut word = Word::new();
    while current.len() > 1 {
        let states: Vec<usize> = current.iter().collect();
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, &p) in states.iter().enumerate() {
            for &q in &states[i + 1..] {
                if let Some(d) = table.distance(p, q) {
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, p, q));
                    }
                }
            }
        }
        let (_, p, q) = best?;
        let merge = table.merging_word(p, q)?;
        current = dfa.apply_word(&current, &merge).expect("letters come from the automaton");
        word.extend_from(&merge);
    }
    Some(word)
}

/// True iff `w` sends the whole state set to a single state.
pub fn verify_reset_word(dfa: &Dfa, w: &Word) -> Result<bool> {
    Ok(dfa.apply_word(&dfa.full_set(), w)?.len() == 1)
}
