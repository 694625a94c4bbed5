//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p sinksync --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sinksync::constructions::{
    a_series, b_series, cerny, fig1_chain, fig2_body, martyugin, paper_reset_word, tail_append, TailSpec,
};
use sinksync::experiments::{check_tail_lemma, martyugin_formula};
use sinksync::format::{parse_automaton, serialize_automaton};
use sinksync::search::{canonical_form, enumerate_candidates, search_extremal, SearchConfig};
use sinksync::solver::{brute_force_rt, exact_reset_threshold, verify_reset_word};
use sinksync::{Dfa, SolveError, SolverLimits};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn limits() -> SolverLimits {
    SolverLimits::default()
}

/// Exact threshold and solve time.
fn rt_timed(dfa: &Dfa) -> Result<(usize, Duration), String> {
    let start = Instant::now();
    let r = exact_reset_threshold(dfa, &limits()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(
        verify_reset_word(dfa, &r.witness).map_err(|e| e.to_string())? && r.witness.len() == r.threshold,
        "witness of length {} does not certify threshold {}",
        r.witness.len(),
        r.threshold
    );
    Ok((r.threshold, elapsed))
}

/// Checks `rt(build(p)) == expected(p)` for every parameter, each within `budget`.
fn exact_family(
    params: impl IntoIterator<Item = usize>,
    build: impl Fn(usize) -> sinksync::Result<Dfa>,
    expected: impl Fn(usize) -> usize,
    budget: Duration,
) -> Outcome {
    let mut seen = Vec::new();
    let mut slowest = Duration::ZERO;
    for p in params {
        let dfa = build(p).map_err(|e| e.to_string())?;
        let (rt, t) = rt_timed(&dfa)?;
        ensure!(rt == expected(p), "param {p}: rt = {rt}, expected {}", expected(p));
        ensure!(t < budget, "param {p}: took {t:?}, budget {budget:?}");
        slowest = slowest.max(t);
        seen.push(format!("{p}:{rt}"));
    }
    Ok(format!("{} (slowest {slowest:.2?})", seen.join(" ")))
}

fn c1_cerny() -> Outcome {
    exact_family(3..=8, cerny, |n| (n - 1) * (n - 1), Duration::from_secs(1))
}

fn c2_fig1() -> Outcome {
    exact_family(3..=8, fig1_chain, |n| n * (n - 1) / 2, Duration::from_secs(1))
}

fn c3_martyugin() -> Outcome {
    let out = exact_family(4..=6, martyugin, |m| martyugin_formula(2 * m as u64) as usize, Duration::from_secs(10))?;
    ensure!(out.starts_with("4:24 5:36 6:50 "), "unexpected values {out}");
    Ok(out)
}

fn c4_a_series() -> Outcome {
    let formula = |n: usize| if n == 8 { 20 } else { 4 * n - 13 };
    let exact = exact_family([7, 8, 9, 10, 11, 12, 13], a_series, formula, Duration::from_secs(10))?;
    let mut lower = Vec::new();
    for n in [5, 6] {
        let (rt, _) = rt_timed(&a_series(n).map_err(|e| e.to_string())?)?;
        ensure!(rt >= 4 * n - 13, "n = {n}: rt = {rt} below 4n-13 = {}", 4 * n - 13);
        lower.push(format!("{n}:{rt}>={}", 4 * n - 13));
    }
    Ok(format!("{exact}; lower bound {}", lower.join(" ")))
}

fn c5_b_series() -> Outcome {
    let (rt16, t16) = rt_timed(&b_series(16).map_err(|e| e.to_string())?)?;
    ensure!(rt16 == 87, "rt(B_16) = {rt16}, expected 87");
    ensure!(t16 < Duration::from_secs(30), "B_16 took {t16:?}");

    let a16 = a_series(16).map_err(|e| e.to_string())?;
    let (rt_a16, t_a16) = rt_timed(&a16)?;
    ensure!(t_a16 < Duration::from_secs(60), "A_16 took {t_a16:?}");
    if rt_a16 != 51 {
        return Err(format!("rt(A_16) = {rt_a16}, expected 51; N = 28 not asserted"));
    }
    let profile = a16.almost_permutation_profile().ok_or("no almost-permutation profile")?;
    let spec = TailSpec { k: 12, r: profile.pre_sink, perm_letter: profile.perm_letter };
    ensure!(
        tail_append(&a16, spec).map_err(|e| e.to_string())? == b_series(28).map_err(|e| e.to_string())?,
        "A_16 with a 12-state tail differs from B_28"
    );
    let ev = check_tail_lemma(&a16, spec, &limits()).map_err(|e| e.to_string())?;
    ensure!(ev.holds && ev.predicted == 243, "tail lemma on A_16: {ev}");
    Ok(format!("rt(B_16) = 87 in {t16:.2?}; rt(A_16) = 51 in {t_a16:.2?}; rt(B_28) = {} = 51 + 16*12", ev.rt_tailed))
}

fn c6_tail_lemma() -> Outcome {
    let cases: [(&str, Dfa, usize); 4] = [
        ("A_7", a_series(7).unwrap(), 6),
        ("A_9", a_series(9).unwrap(), 6),
        ("A_7", a_series(7).unwrap(), 12),
        ("fig2-body(4)", fig2_body(4).unwrap(), 3),
    ];
    let mut out = Vec::new();
    for (name, base, k) in cases {
        let p = base.almost_permutation_profile().ok_or("no almost-permutation profile")?;
        let spec = TailSpec { k, r: p.pre_sink, perm_letter: p.perm_letter };
        let ev = check_tail_lemma(&base, spec, &limits()).map_err(|e| e.to_string())?;
        ensure!(ev.holds, "{name}, k = {k}: {ev}");
        out.push(format!("{name}/k={k}: {}+{}*{k}={}", ev.rt_base, ev.base_states, ev.rt_tailed));
    }
    Ok(out.join("; "))
}

fn c7_martyugin_coincidence() -> Outcome {
    for m in 4..=6 {
        let body = fig2_body(m).map_err(|e| e.to_string())?;
        let p = body.almost_permutation_profile().ok_or("no almost-permutation profile")?;
        // the pre-sink of the body is state m in Martyugin's numbering
        let tailed = tail_append(&body, TailSpec { k: m - 1, r: p.pre_sink, perm_letter: p.perm_letter })
            .map_err(|e| e.to_string())?;
        // body index i is state m-1+i; tail state t_i (index m+1+i) is state i
        let relabeling: Vec<usize> = (0..=m).map(|i| m - 1 + i).chain(0..m - 1).collect();
        let relabeled = tailed.relabel(&relabeling).map_err(|e| e.to_string())?;
        let want = serialize_automaton(&martyugin(m).map_err(|e| e.to_string())?);
        ensure!(serialize_automaton(&relabeled) == want, "m = {m}: relabeled table differs");
    }
    Ok("m = 4, 5, 6 byte-equal after relabeling".into())
}

fn c8_closed_form_words() -> Outcome {
    let mut out = Vec::new();
    for n in [7, 9, 11, 10, 12] {
        let dfa = a_series(n).map_err(|e| e.to_string())?;
        let w = paper_reset_word(n).map_err(|e| e.to_string())?;
        ensure!(w.len() == 4 * n - 13, "n = {n}: word length {} != {}", w.len(), 4 * n - 13);
        ensure!(verify_reset_word(&dfa, &w).map_err(|e| e.to_string())?, "n = {n}: word does not reset");
        out.push(format!("{n}:{}", w.len()));
    }
    Ok(out.join(" "))
}

/// Random binary automaton on `n <= 5` states with state 0 as sink.
fn random_sink_automaton(rng: &mut ChaCha8Rng) -> Dfa {
    let n = rng.random_range(1..=5usize);
    let mut delta = vec![0; 2 * n];
    for t in &mut delta[2..] {
        *t = rng.random_range(0..n);
    }
    Dfa::new(n, 2, delta).unwrap()
}

fn c9_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (mut sync, mut total) = (0, 0);
    while sync < 200 {
        let dfa = random_sink_automaton(&mut rng);
        total += 1;
        // a sink automaton on n states synchronizes within n(n-1)/2 letters
        let n = dfa.num_states();
        let brute = brute_force_rt(&dfa, n * (n - 1) / 2).map(|r| r.threshold);
        let exact = match exact_reset_threshold(&dfa, &limits()) {
            Ok(r) => Some(r.threshold),
            Err(SolveError::NotSynchronizing { .. }) => None,
            Err(e) => return Err(e.to_string()),
        };
        ensure!(brute == exact, "mismatch on {:?}: brute {brute:?}, exact {exact:?}", dfa.table());
        sync += usize::from(exact.is_some());
    }
    Ok(format!("{total} automata ({sync} synchronizing), 0 mismatches"))
}

fn c10_search() -> Outcome {
    let start = Instant::now();
    let report = search_extremal(&SearchConfig::exhaustive(7, 15)).map_err(|e| e.to_string())?;
    ensure!(!report.findings.is_empty(), "no findings at n = 7");
    let (a7, _) = canonical_form(&a_series(7).unwrap());
    ensure!(report.findings.iter().any(|f| f.dfa.table() == a7.as_slice()), "A_7 not among the findings");
    let t7 = start.elapsed();

    let six = SearchConfig::exhaustive(6, 1);
    let best = search_extremal(&six).map_err(|e| e.to_string())?.findings.first().map(|f| f.rt);
    let mut oracle_max = None;
    for dfa in enumerate_candidates(&six).map_err(|e| e.to_string())? {
        let rt = brute_force_rt(&dfa, 15).map(|r| r.threshold).ok_or("candidate without a reset word")?;
        oracle_max = oracle_max.max(Some(rt));
    }
    ensure!(best == oracle_max, "n = 6: search max {best:?}, oracle max {oracle_max:?}");
    Ok(format!(
        "n = 7: {} findings from {} candidates, max rt {} ({t7:.1?}); n = 6 max rt {} (oracle agrees)",
        report.findings.len(),
        report.candidates,
        report.findings[0].rt,
        best.unwrap()
    ))
}

fn c11_round_trip() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dfa"))
        .collect();
    files.sort();
    ensure!(!files.is_empty(), "no bundled automata in {}", dir.display());
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let dfa = parse_automaton(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure!(serialize_automaton(&dfa) == text, "{}: serialization differs from file", path.display());
        ensure!(
            parse_automaton(&serialize_automaton(&dfa)).as_ref() == Ok(&dfa),
            "{}: reparse differs",
            path.display()
        );
    }
    Ok(format!("{} bundled files byte-exact", files.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Cerny baseline", c1_cerny),
        ("fig1 family", c2_fig1),
        ("Martyugin formula", c3_martyugin),
        ("A_n series", c4_a_series),
        ("B_N flagship", c5_b_series),
        ("tail lemma equality", c6_tail_lemma),
        ("Martyugin coincidence", c7_martyugin_coincidence),
        ("closed-form reset words", c8_closed_form_words),
        ("oracle equivalence", c9_oracle),
        ("search sanity", c10_search),
        ("format round trip", c11_round_trip),
    ];
    let suite = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} [{t:.2?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("[FAIL] {:>2} {name}: {why} [{t:.2?}]", i + 1);
            }
        }
    }
    let total = suite.elapsed();
    if total > Duration::from_secs(300) {
        failures += 1;
        println!("[FAIL] suite took {total:.1?}, budget 5 min");
    }
    println!("{} of {} criteria passed in {total:.1?}", criteria.len() - failures.min(criteria.len()), criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
