//! Plain-text automaton files and Graphviz export.
//!
//! ```text
//! # comment
//! dfa <n> <k>
//! letters <name_1> ... <name_k>   (optional)
//! <k targets of state 0>
//! ...
//! <k targets of state n-1>
//! ```

use std::fmt::Write;

use crate::automaton::Dfa;
use crate::error::{Error, Result};

/// Canonical text form. The `letters` line is written only for non-default names.
pub fn serialize_automaton(dfa: &Dfa) -> String {
    let mut out = format!("dfa {} {}\n", dfa.num_states(), dfa.num_letters());
    if !dfa.has_default_letter_names() {
        out.push_str("letters ");
        out.push_str(&dfa.letter_names().join(" "));
        out.push('\n');
    }
    for q in 0..dfa.num_states() {
        let row: Vec<String> = dfa.row(q).iter().map(usize::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_automaton(text: &str) -> Result<Dfa> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| Error::Parse { line, message };

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing `dfa <n> <k>` header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "dfa" {
        return Err(err(hline, format!("expected `dfa <n> <k>`, found {header:?}")));
    }
    let count = |s: &str, what: &str| match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(err(hline, format!("{what} must be a positive integer, found {s:?}"))),
    };
    let n = count(parts[1], "state count")?;
    let k = count(parts[2], "alphabet size")?;

    let mut names = None;
    let mut delta = Vec::with_capacity(n * k);
    let mut rows = 0;
    let mut last_line = hline;
    for (lno, line) in lines {
        last_line = lno;
        let mut tokens = line.split_whitespace().peekable();
        if tokens.peek() == Some(&"letters") {
            if names.is_some() || rows > 0 {
                return Err(err(lno, "`letters` must directly follow the header".into()));
            }
            let list: Vec<String> = tokens.skip(1).map(str::to_string).collect();
            if list.len() != k {
                return Err(err(lno, format!("expected {k} letter names, found {}", list.len())));
            }
            names = Some(list);
            continue;
        }
        if rows == n {
            return Err(err(lno, format!("more than {n} transition rows")));
        }
        let row: Vec<&str> = tokens.collect();
        if row.len() != k {
            return Err(err(lno, format!("expected {k} targets, found {}", row.len())));
        }
        for tok in row {
            match tok.parse::<usize>() {
                Ok(t) if t < n => delta.push(t),
                Ok(t) => return Err(err(lno, format!("target {t} out of range for {n} states"))),
                Err(_) => return Err(err(lno, format!("invalid target {tok:?}"))),
            }
        }
        rows += 1;
    }
    if rows != n {
        return Err(err(last_line, format!("expected {n} transition rows, found {rows}")));
    }
    let dfa = match names {
        Some(names) => Dfa::with_letter_names(n, k, delta, names),
        None => Dfa::new(n, k, delta),
    };
    dfa.map_err(|e| err(hline, e.to_string()))
}

/// Graphviz rendering: the sink is double-circled and parallel edges are
/// merged into one edge with a comma-separated label.
pub fn export_dot(dfa: &Dfa) -> String {
    let sink = dfa.find_sink();
    let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n");
    for q in 0..dfa.num_states() {
        if Some(q) == sink {
            writeln!(out, "  {q} [shape=doublecircle];").unwrap();
        } else {
            writeln!(out, "  {q};").unwrap();
        }
    }
    for q in 0..dfa.num_states() {
        let mut groups: Vec<(usize, Vec<&str>)> = Vec::new();
        for (l, &t) in dfa.row(q).iter().enumerate() {
            match groups.iter_mut().find(|(target, _)| *target == t) {
                Some((_, labels)) => labels.push(dfa.letter_name(l)),
                None => groups.push((t, vec![dfa.letter_name(l)])),
            }
        }
        for (t, labels) in groups {
            writeln!(out, "  {q} -> {t} [label=\"{}\"];", labels.join(",")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{a_series, cerny, fig1_chain};
    use crate::solver::{exact_reset_threshold, SolverLimits};
    use proptest::prelude::*;

    #[test]
    fn round_trip_and_stability() {
        let d = a_series(8).unwrap();
        let text = serialize_automaton(&d);
        assert_eq!(parse_automaton(&text).unwrap(), d);
        assert_eq!(serialize_automaton(&a_series(8).unwrap()), text);
        let f = fig1_chain(4).unwrap();
        assert_eq!(parse_automaton(&serialize_automaton(&f)).unwrap(), f);
    }

    #[test]
    fn cerny_text() {
        assert_eq!(serialize_automaton(&cerny(3).unwrap()), "dfa 3 2\n1 1\n2 1\n0 2\n");
    }

    #[test]
    fn custom_letter_names_survive() {
        let mut d = cerny(3).unwrap();
        d.set_letter_names(vec!["x".into(), "y".into()]).unwrap();
        let text = serialize_automaton(&d);
        assert!(text.contains("letters x y\n"));
        assert_eq!(parse_automaton(&text).unwrap(), d);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# two states\n\ndfa 2 2  # header\n0 0\n\n1 0 # b sends 1 to the sink\n";
        let d = parse_automaton(text).unwrap();
        let r = exact_reset_threshold(&d, &SolverLimits::default()).unwrap();
        assert_eq!(r.threshold, 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_target = "dfa 3 2\n1 1\n2 3\n0 2\n";
        assert_eq!(
            parse_automaton(bad_target),
            Err(Error::Parse { line: 3, message: "target 3 out of range for 3 states".into() })
        );
        let cases = [
            ("", 1),
            ("nfa 2 2\n", 1),
            ("dfa 0 2\n", 1),
            ("dfa 2 2\n0 0\n", 2),
            ("dfa 2 2\n0 0\n1\n", 3),
            ("dfa 2 2\n0 0\n1 x\n", 3),
            ("dfa 1 2\n0 0\n0 0\n", 3),
            ("dfa 1 2\n0 0\nletters a b\n", 3),
            ("dfa 1 2\nletters a\n0 0\n", 2),
            ("dfa 1 2\nletters a a\n0 0\n", 1),
        ];
        for (text, line) in cases {
            match parse_automaton(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn dot_merges_parallel_edges() {
        let dot = export_dot(&a_series(8).unwrap());
        assert!(dot.contains("  0 [shape=doublecircle];\n"));
        assert!(dot.contains("  0 -> 0 [label=\"a,b\"];\n"));
        assert!(dot.contains("  5 -> 6 [label=\"a\"];\n"));
        let edges = dot.matches("->").count();
        // a_series(8): states 0 and 3 have both letters on one edge
        assert_eq!(edges, 8 * 2 - 2);

        let one = Dfa::new(1, 2, vec![0, 0]).unwrap();
        let dot = export_dot(&one);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("0 -> 0 [label=\"a,b\"]"));
        assert!(export_dot(&cerny(3).unwrap()).lines().all(|l| !l.contains("doublecircle")));
    }

    fn arb_dfa() -> impl Strategy<Value = Dfa> {
        (1usize..=12, 1usize..=4)
            .prop_flat_map(|(n, k)| prop::collection::vec(0..n, n * k).prop_map(move |t| Dfa::new(n, k, t).unwrap()))
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(d in arb_dfa()) {
            let text = serialize_automaton(&d);
            let back = parse_automaton(&text).unwrap();
            prop_assert_eq!(serialize_automaton(&back), text);
            prop_assert_eq!(back, d);
        }

        #[test]
        fn dot_edge_count(d in arb_dfa()) {
            let merged: usize = (0..d.num_states())
                .map(|q| {
                    let mut t = d.row(q).to_vec();
                    t.sort();
                    t.dedup();
                    t.len()
                })
                .sum();
            prop_assert_eq!(export_dot(&d).matches("->").count(), merged);
        }
    }
}
