//! Shortest merging words for pairs of states.

use std::collections::VecDeque;

use crate::automaton::{Dfa, Word};

const UNREACHED: u32 = u32::MAX;

/// Backward breadth-first search over unordered state pairs, starting from
/// the diagonal. Stores, for every pair, the length of its shortest merging
/// word and the first letter of one such word.
pub(crate) struct PairMergeTable<'a> {
    dfa: &'a Dfa,
    dist: Vec<u32>,
    first: Vec<u32>,
}

impl<'a> PairMergeTable<'a> {
    pub(crate) fn new(dfa: &'a Dfa) -> Self {
        let n = dfa.num_states();
        let k = dfa.num_letters();
        // inverse[l][q] = states p with δ(p, l) = q
        let mut inverse = vec![vec![Vec::new(); n]; k];
        for p in 0..n {
            for l in 0..k {
                inverse[l][dfa.target(p, l)].push(p);
            }
        }
        let mut dist = vec![UNREACHED; n * n];
        let mut first = vec![UNREACHED; n * n];
        let mut queue = VecDeque::new();
        for q in 0..n {
            dist[q * n + q] = 0;
            queue.push_back((q, q));
        }
        while let Some((p, q)) = queue.pop_front() {
            let d = dist[p * n + q];
            for (l, inv) in inverse.iter().enumerate() {
                for &pp in &inv[p] {
                    for &qq in &inv[q] {
                        if pp == qq {
                            continue;
                        }
                        let (lo, hi) = if pp < qq { (pp, qq) } else { (qq, pp) };
                        let idx = lo * n + hi;
                        if dist[idx] == UNREACHED {
                            dist[idx] = d + 1;
                            first[idx] = l as u32;
                            queue.push_back((lo, hi));
                        }
                    }
                }
            }
        }
        PairMergeTable { dfa, dist, first }
    }

    fn index(&self, p: usize, q: usize) -> usize {
        let n = self.dfa.num_states();
        if p < q {
            p * n + q
        } else {
            q * n + p
        }
    }

    /// Length of the shortest word merging `p` and `q`, if any.
    pub(crate) fn distance(&self, p: usize, q: usize) -> Option<u32> {
        let d = self.dist[self.index(p, q)];
        (d != UNREACHED).then_some(d)
    }

    pub(crate) fn all_mergeable(&self) -> bool {
        let n = self.dfa.num_states();
        (0..n).all(|p| (p + 1..n).all(|q| self.distance(p, q).is_some()))
    }

    /// A shortest word merging `p` and `q`.
    pub(crate) fn merging_word(&self, mut p: usize, mut q: usize) -> Option<Word> {
        self.distance(p, q)?;
        let mut w = Word::new();
        while p != q {
            let l = self.first[self.index(p, q)] as usize;
            w.push(l);
            p = self.dfa.target(p, l);
            q = self.dfa.target(q, l);
        }
        Some(w)
    }
}
