//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when the analysis outcome is negative (not
//! synchronizing, a solver limit hit, a table mismatch), 2 on usage, input
//! or parse errors.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::automaton::{Dfa, SinkStatus};
use crate::constructions::{tail_append, Family, FamilyParams, TailSpec};
use crate::experiments::{format_table, reproduce_paper_table, write_csv, RowStatus, TableOptions};
use crate::format::{export_dot, parse_automaton, serialize_automaton};
use crate::search::{search_extremal, SearchConfig, SearchMode};
use crate::solver::{
    brute_force_rt, exact_reset_threshold, greedy_upper_bound, SolveError, SolverLimits, DEFAULT_MAX_SUBSETS,
};

/// Environment variable naming the default output directory of `search`.
pub const OUT_DIR_ENV: &str = "SINKSYNC_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "sinksync", version, about = "Synchronizing automata with a sink state")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a member of an automaton family.
    Gen {
        /// cerny, fig1, fig2-body, martyugin, a-series or b-series
        #[arg(long)]
        family: String,
        /// Size parameter: n for cerny, fig1, a-series; m for fig2-body and
        /// martyugin; the state count N for b-series.
        #[arg(long)]
        n: usize,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Compute the reset threshold of an automaton file.
    Rt {
        file: String,
        /// Also print a reset word.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Algo::Bfs)]
        algo: Algo,
        #[arg(long, default_value_t = DEFAULT_MAX_SUBSETS)]
        max_subsets: u64,
        /// Longest word searched (default n²; n(n-1)/2 for brute force with a sink).
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Report sink, synchronization, almost-permutation profile and letter orders.
    Check { file: String },
    /// Append a tail of K states walked by letter L, feeding state R.
    Tail {
        file: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        /// Letter name or index.
        #[arg(long)]
        perm_letter: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Recompute the table of known reset thresholds.
    VerifyPaper {
        #[arg(long, default_value_t = 13)]
        max_n: usize,
        /// Write CSV here (`-` for standard output); the table then goes to standard output.
        #[arg(long)]
        csv: Option<String>,
        /// Print the human-readable table instead of CSV.
        #[arg(long)]
        table: bool,
        /// Solve b-series members beyond 16 states exactly.
        #[arg(long)]
        exact_large: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_SUBSETS)]
        max_subsets: u64,
    },
    /// Search almost-permutation automata with large reset thresholds.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        min_rt: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Candidates drawn in random mode.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        jobs: Option<usize>,
        /// Write each finding as an automaton file into this directory.
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
    },
    /// Render an automaton file as Graphviz DOT.
    Dot {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Algo {
    Bfs,
    Brute,
    Greedy,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Exhaustive,
    Random,
}

/// Failure carrying its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn outcome(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::NotSynchronizing { .. } => Failure::outcome("not synchronizing"),
            SolveError::LimitExceeded { .. } => Failure::outcome(e),
            SolveError::Invalid(e) => Failure::usage(e),
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read_input(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s)?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
        }
    }

    fn read_automaton(&mut self, path: &str) -> Result<Dfa, Failure> {
        let text = self.read_input(path)?;
        parse_automaton(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))
    }

    fn write_output(&mut self, path: &str, text: &str) -> Result<(), Failure> {
        if path == "-" {
            self.stdout.write_all(text.as_bytes())?;
            Ok(())
        } else {
            fs::write(path, text).map_err(|e| Failure::usage(format!("{path}: {e}")))
        }
    }
}

/// Runs one command line (including the program name) against the given streams.
pub fn run_command<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let mut io = Io { stdin, stdout, stderr };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32, Failure> {
    match command {
        Command::Gen { family, n, output } => {
            let family: Family = family.parse()?;
            let dfa = FamilyParams::new(family, n).build()?;
            io.write_output(&output, &serialize_automaton(&dfa))?;
            Ok(0)
        }
        Command::Rt { file, witness, algo, max_subsets, max_length } => {
            let dfa = io.read_automaton(&file)?;
            rt_command(&dfa, witness, algo, max_subsets, max_length, io)
        }
        Command::Check { file } => {
            let dfa = io.read_automaton(&file)?;
            io.stdout.write_all(check_report(&dfa).as_bytes())?;
            Ok(0)
        }
        Command::Tail { file, k, r, perm_letter, output } => {
            let dfa = io.read_automaton(&file)?;
            let letter = dfa
                .letter_by_name(&perm_letter)
                .ok_or_else(|| Failure::usage(format!("unknown letter {perm_letter:?}")))?;
            let tailed = tail_append(&dfa, TailSpec { k, r, perm_letter: letter })?;
            io.write_output(&output, &serialize_automaton(&tailed))?;
            Ok(0)
        }
        Command::VerifyPaper { max_n, csv, table, exact_large, max_subsets } => {
            let options =
                TableOptions { limits: SolverLimits::new(max_subsets, None)?, exact_large_b_series: exact_large };
            let rows = reproduce_paper_table(max_n, &options)?;
            match csv {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf)?;
                    io.write_output(&path, &String::from_utf8_lossy(&buf))?;
                    if path != "-" {
                        io.stdout.write_all(format_table(&rows).as_bytes())?;
                    }
                }
                None if table => io.stdout.write_all(format_table(&rows).as_bytes())?,
                None => write_csv(&rows, &mut *io.stdout)?,
            }
            let mismatches = rows.iter().filter(|r| r.status == RowStatus::Mismatch).count();
            if mismatches > 0 {
                writeln!(io.stderr, "{mismatches} row(s) disagree with the closed form")?;
                return Ok(1);
            }
            Ok(0)
        }
        Command::Search { n, min_rt, mode, seed, samples, jobs, out_dir } => {
            let config = SearchConfig {
                n,
                min_rt,
                mode: match mode {
                    Mode::Exhaustive => SearchMode::Exhaustive,
                    Mode::Random => SearchMode::Random,
                },
                seed,
                samples,
                worker_count: jobs,
                limits: SolverLimits::default(),
            };
            let report = search_extremal(&config)?;
            if let Some(dir) = &out_dir {
                write_findings(dir, &report.findings)?;
            }
            for f in &report.findings {
                writeln!(io.stdout, "{}", f.to_json_line())?;
            }
            writeln!(
                io.stderr,
                "{} candidates, {} findings, {} skipped",
                report.candidates,
                report.findings.len(),
                report.skipped
            )?;
            Ok(0)
        }
        Command::Dot { file, output } => {
            let dfa = io.read_automaton(&file)?;
            io.write_output(&output, &export_dot(&dfa))?;
            Ok(0)
        }
    }
}

fn rt_command(
    dfa: &Dfa,
    witness: bool,
    algo: Algo,
    max_subsets: u64,
    max_length: Option<usize>,
    io: &mut Io<'_>,
) -> Result<i32, Failure> {
    let n = dfa.num_states();
    let word = match algo {
        Algo::Bfs => exact_reset_threshold(dfa, &SolverLimits::new(max_subsets, max_length)?)?.witness,
        Algo::Brute => {
            let cap = max_length.unwrap_or(if dfa.find_sink().is_some() { n * (n - 1) / 2 } else { n * n });
            match brute_force_rt(dfa, cap) {
                Some(r) => r.witness,
                None if !dfa.is_synchronizing() => return Err(Failure::outcome("not synchronizing")),
                None => return Err(Failure::outcome(format!("no reset word of length at most {cap}"))),
            }
        }
        Algo::Greedy => {
            let w = greedy_upper_bound(dfa).ok_or_else(|| Failure::outcome("not synchronizing"))?;
            writeln!(io.stderr, "greedy upper bound")?;
            w
        }
    };
    writeln!(io.stdout, "{}", word.len())?;
    if witness {
        writeln!(io.stdout, "{}", word.display_with(dfa))?;
    }
    Ok(0)
}

fn check_report(dfa: &Dfa) -> String {
    let mut s = format!("states: {}\nletters: {}\n", dfa.num_states(), dfa.letter_names().join(" "));
    s += &match dfa.sink_status() {
        SinkStatus::None => "sink: none\n".to_string(),
        SinkStatus::Unique(z) => format!("sink: {z}\n"),
        SinkStatus::Multiple(v) => format!("sink: none (several fixed states: {v:?})\n"),
    };
    s += &format!("synchronizing: {}\n", dfa.is_synchronizing());
    s += &match dfa.classify_almost_permutation() {
        Ok(p) => format!(
            "profile: sink {} pre-sink {} permutation-letter {} collapse-letter {}\n",
            p.sink,
            p.pre_sink,
            dfa.letter_name(p.perm_letter),
            dfa.letter_name(p.collapse_letter)
        ),
        Err(e) => format!("profile: none ({e})\n"),
    };
    for l in 0..dfa.num_letters() {
        let order = dfa.letter_order(l).map_or_else(|| "none".to_string(), |o| o.to_string());
        s += &format!("order {}: {}\n", dfa.letter_name(l), order);
    }
    s
}

fn write_findings(dir: &Path, findings: &[crate::search::Finding]) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    for (i, f) in findings.iter().enumerate() {
        let path = dir.join(format!("finding-{:04}.dfa", i + 1));
        let text = format!("# rt {} witness {}\n{}", f.rt, f.witness.display_with(&f.dfa), serialize_automaton(&f.dfa));
        fs::write(&path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
