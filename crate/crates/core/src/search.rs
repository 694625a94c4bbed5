//! Extremal search over binary almost-permutation automata with a sink.
//!
//! Candidates are normalized so that the sink is state 0 and letter `a` is
//! the collapsing letter: `a` sends the pre-sink `r` to 0 and permutes the
//! other states, `b` permutes all states. Findings are deduplicated up to
//! relabelings fixing state 0.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{Dfa, Word};
use crate::error::{Error, Result};
use crate::solver::{exact_reset_threshold, SolveError, SolverLimits};

/// Largest state count accepted in exhaustive mode.
pub const EXHAUSTIVE_MAX_STATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Random,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "random" => Ok(SearchMode::Random),
            other => Err(Error::InvalidParameter(format!("unknown search mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub n: usize,
    pub min_rt: usize,
    pub mode: SearchMode,
    pub seed: u64,
    /// Candidates drawn in random mode.
    pub samples: usize,
    /// Worker threads; `None` uses the global pool.
    pub worker_count: Option<usize>,
    pub limits: SolverLimits,
}

impl SearchConfig {
    pub fn exhaustive(n: usize, min_rt: usize) -> Self {
        SearchConfig {
            n,
            min_rt,
            mode: SearchMode::Exhaustive,
            seed: 0,
            samples: 0,
            worker_count: None,
            limits: SolverLimits::default(),
        }
    }

    pub fn random(n: usize, min_rt: usize, seed: u64, samples: usize) -> Self {
        SearchConfig { mode: SearchMode::Random, seed, samples, ..Self::exhaustive(n, min_rt) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidParameter(format!("search needs n >= 3, got {}", self.n)));
        }
        if self.mode == SearchMode::Exhaustive && self.n > EXHAUSTIVE_MAX_STATES {
            return Err(Error::InvalidParameter(format!(
                "exhaustive search is limited to n <= {EXHAUSTIVE_MAX_STATES}; use random mode for n = {}",
                self.n
            )));
        }
        if self.worker_count == Some(0) {
            return Err(Error::InvalidParameter("worker count must be positive".into()));
        }
        self.limits.validate()
    }
}

/// An automaton reaching the requested threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    /// The canonical representative of the isomorphism class.
    pub dfa: Dfa,
    pub rt: usize,
    pub witness: Word,
}

/// One line of the JSON-lines summary.
#[derive(Debug, Clone, Serialize)]
pub struct FindingSummary {
    pub n: usize,
    pub rt: usize,
    pub witness: String,
    pub table: Vec<Vec<usize>>,
}

impl Finding {
    pub fn summary(&self) -> FindingSummary {
        FindingSummary {
            n: self.dfa.num_states(),
            rt: self.rt,
            witness: self.witness.display_with(&self.dfa),
            table: (0..self.dfa.num_states()).map(|q| self.dfa.row(q).to_vec()).collect(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.summary()).expect("summary serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    /// Sorted by threshold descending, then canonical table.
    pub findings: Vec<Finding>,
    /// Synchronizing candidates examined.
    pub candidates: u64,
    /// Candidates whose exact search hit a limit.
    pub skipped: u64,
}

/// Candidate with pre-sink `r`, `b` sending `i` to `b_images[i - 1]`, and `a`
/// sending the states of `0..n` other than 0 and `r`, in increasing order,
/// to `a_images`.
fn build_candidate(n: usize, r: usize, b_images: &[usize], a_images: &[usize]) -> Dfa {
    let mut delta = vec![0; 2 * n];
    let mut next_a = a_images.iter();
    for q in 1..n {
        delta[2 * q] = if q == r { 0 } else { *next_a.next().expect("one image per state") };
        delta[2 * q + 1] = b_images[q - 1];
    }
    Dfa::new(n, 2, delta).expect("images are states")
}

/// All `(r, b)` prefixes of the exhaustive space, in enumeration order.
fn exhaustive_prefixes(n: usize) -> Vec<(usize, Vec<usize>)> {
    (1..n).cartesian_product((1..n).permutations(n - 1)).collect()
}

fn a_permutations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let domain: Vec<usize> = (1..n).filter(|&q| q != r).collect();
    let len = domain.len();
    domain.into_iter().permutations(len)
}

fn random_candidates(n: usize, seed: u64, samples: usize) -> Vec<Dfa> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let r = rng.random_range(1..n);
            let mut b: Vec<usize> = (1..n).collect();
            b.shuffle(&mut rng);
            let mut a: Vec<usize> = (1..n).filter(|&q| q != r).collect();
            a.shuffle(&mut rng);
            build_candidate(n, r, &b, &a)
        })
        .collect()
}

/// Synchronizing candidates of the configured space.
pub fn enumerate_candidates(config: &SearchConfig) -> Result<Box<dyn Iterator<Item = Dfa>>> {
    config.validate()?;
    let n = config.n;
    let raw: Box<dyn Iterator<Item = Dfa>> = match config.mode {
        SearchMode::Exhaustive => Box::new(
            exhaustive_prefixes(n)
                .into_iter()
                .flat_map(move |(r, b)| a_permutations(n, r).map(move |a| build_candidate(n, r, &b, &a))),
        ),
        SearchMode::Random => Box::new(random_candidates(n, config.seed, config.samples).into_iter()),
    };
    Ok(Box::new(raw.filter(Dfa::is_synchronizing)))
}

/// Minimum row-major table over all relabelings fixing state 0, with the
/// relabeling achieving it.
pub fn canonical_form(dfa: &Dfa) -> (Vec<usize>, Vec<usize>) {
    let n = dfa.num_states();
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for tail in (1..n).permutations(n.saturating_sub(1)) {
        let perm: Vec<usize> = std::iter::once(0).chain(tail).collect();
        let table = dfa.relabel(&perm).expect("bijection").table().to_vec();
        if best.as_ref().is_none_or(|(t, _)| table < *t) {
            best = Some((table, perm));
        }
    }
    best.expect("at least one relabeling")
}

/// The canonical representative of `dfa`'s class.
pub fn canonicalize(dfa: &Dfa) -> Dfa {
    let (_, perm) = canonical_form(dfa);
    dfa.relabel(&perm).expect("bijection")
}

#[derive(Default)]
struct Tally {
    found: BTreeMap<Vec<usize>, Finding>,
    candidates: u64,
    skipped: u64,
}

impl Tally {
    fn add(&mut self, dfa: Dfa, config: &SearchConfig) {
        if !dfa.is_synchronizing() {
            return;
        }
        self.candidates += 1;
        match exact_reset_threshold(&dfa, &config.limits) {
            Ok(res) if res.threshold >= config.min_rt => {
                let (key, perm) = canonical_form(&dfa);
                self.found.entry(key).or_insert_with(|| Finding {
                    dfa: dfa.relabel(&perm).expect("bijection"),
                    rt: res.threshold,
                    // reset words do not depend on state names
                    witness: res.witness,
                });
            }
            Ok(_) => {}
            Err(SolveError::LimitExceeded { .. }) => self.skipped += 1,
            Err(_) => {}
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.candidates += other.candidates;
        self.skipped += other.skipped;
        for (k, v) in other.found {
            self.found.entry(k).or_insert(v);
        }
        self
    }
}

/// Exact-solves every candidate and keeps one representative per
/// isomorphism class with threshold at least `min_rt`.
pub fn search_extremal(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let run = || {
        let n = config.n;
        let tally = match config.mode {
            SearchMode::Exhaustive => exhaustive_prefixes(n)
                .into_par_iter()
                .fold(Tally::default, |mut t, (r, b)| {
                    for a in a_permutations(n, r) {
                        t.add(build_candidate(n, r, &b, &a), config);
                    }
                    t
                })
                .reduce(Tally::default, Tally::merge),
            SearchMode::Random => random_candidates(n, config.seed, config.samples)
                .into_par_iter()
                .fold(Tally::default, |mut t, d| {
                    t.add(d, config);
                    t
                })
                .reduce(Tally::default, Tally::merge),
        };
        let mut findings: Vec<Finding> = tally.found.into_values().collect();
        findings.sort_by(|x, y| y.rt.cmp(&x.rt).then_with(|| x.dfa.table().cmp(y.dfa.table())));
        SearchReport { findings, candidates: tally.candidates, skipped: tally.skipped }
    };
    match config.worker_count {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::a_series;
    use crate::solver::verify_reset_word;

    #[test]
    fn candidates_are_profiled_and_synchronizing() {
        let cfg = SearchConfig::exhaustive(5, 0);
        let mut count = 0;
        for d in enumerate_candidates(&cfg).unwrap() {
            let p = d.almost_permutation_profile().unwrap();
            assert_eq!((p.sink, p.perm_letter, p.collapse_letter), (0, 1, 0));
            assert!(d.is_synchronizing());
            count += 1;
        }
        assert!(count > 0);
    }

    #[test]
    fn candidate_count_matches_table_enumeration() {
        // all binary tables on 5 states with state 0 fixed, filtered by profile
        let n = 5usize;
        let free = 2 * (n - 1);
        let mut expected = 0u64;
        let mut digits = vec![0usize; free];
        loop {
            let mut delta = vec![0, 0];
            delta.extend_from_slice(&digits);
            let d = Dfa::new(n, 2, delta).unwrap();
            if let Some(p) = d.almost_permutation_profile() {
                if p.sink == 0 && p.collapse_letter == 0 && d.is_synchronizing() {
                    expected += 1;
                }
            }
            let mut pos = free;
            while pos > 0 {
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < n {
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&x| x == 0) {
                break;
            }
        }
        let got = enumerate_candidates(&SearchConfig::exhaustive(n, 0)).unwrap().count() as u64;
        assert_eq!(got, expected);
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::exhaustive(9, 0).validate().is_err());
        assert!(SearchConfig::exhaustive(2, 0).validate().is_err());
        assert!(SearchConfig::random(12, 0, 1, 10).validate().is_ok());
        let mut c = SearchConfig::exhaustive(5, 0);
        c.worker_count = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn findings_are_valid_and_distinct() {
        let report = search_extremal(&SearchConfig::exhaustive(6, 5)).unwrap();
        assert!(!report.findings.is_empty());
        for f in &report.findings {
            assert!(f.rt >= 5);
            assert!(f.rt <= 15);
            assert_eq!(f.witness.len(), f.rt);
            assert!(verify_reset_word(&f.dfa, &f.witness).unwrap());
            assert_eq!(canonicalize(&f.dfa), f.dfa);
        }
        let keys: std::collections::HashSet<_> = report.findings.iter().map(|f| f.dfa.table().to_vec()).collect();
        assert_eq!(keys.len(), report.findings.len());
        assert!(report.findings.windows(2).all(|w| w[0].rt >= w[1].rt));
    }

    #[test]
    fn impossible_threshold_gives_nothing() {
        assert!(search_extremal(&SearchConfig::exhaustive(7, 1000)).unwrap().findings.is_empty());
    }

    #[test]
    fn random_mode_is_seeded() {
        let cfg = SearchConfig::random(7, 10, 42, 2000);
        let a = search_extremal(&cfg).unwrap();
        let b = search_extremal(&SearchConfig { worker_count: Some(2), ..cfg.clone() }).unwrap();
        assert_eq!(a, b);
        assert!(a.candidates > 0);
    }

    #[test]
    fn canonical_form_is_invariant() {
        let d = a_series(6).unwrap();
        let r = d.relabel(&[0, 3, 5, 1, 2, 4]).unwrap();
        assert_eq!(canonical_form(&d).0, canonical_form(&r).0);
        assert_eq!(canonicalize(&d), canonicalize(&r));
    }

    #[test]
    fn json_line_shape() {
        let report = search_extremal(&SearchConfig::exhaustive(5, 0)).unwrap();
        let line = report.findings[0].to_json_line();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["n"], 5);
        assert_eq!(v["witness"].as_str().unwrap().len(), v["rt"].as_u64().unwrap() as usize);
        assert_eq!(v["table"].as_array().unwrap().len(), 5);
    }
}
