//! Generators for the automaton families and the tail-append operator.

use std::fmt;
use std::str::FromStr;

use crate::automaton::{Dfa, Word};
use crate::error::{Error, Result};

const A: usize = 0;
const B: usize = 1;

/// Černý automaton: `a` rotates `i -> i+1 mod n`, `b` sends 0 to 1 and fixes the rest.
pub fn cerny(n: usize) -> Result<Dfa> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cerny needs n >= 2, got {n}")));
    }
    Dfa::from_fn(n, 2, |q, l| match (l, q) {
        (A, _) => (q + 1) % n,
        (_, 0) => 1,
        _ => q,
    })
}

/// Chain with `n - 1` letters: `a_1` sends 1 to the sink 0, `a_i` swaps
/// `i - 1` and `i` for `i >= 2`, every other transition is a loop.
pub fn fig1_chain(n: usize) -> Result<Dfa> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("fig1 needs n >= 2, got {n}")));
    }
    // letter index l is a_{l+1}
    Dfa::from_fn(n, n - 1, |q, l| {
        let i = l + 1;
        match q {
            0 => 0,
            _ if i == 1 && q == 1 => 0,
            _ if i >= 2 && q == i - 1 => i,
            _ if i >= 2 && q == i => i - 1,
            _ => q,
        }
    })
}

/// The almost-permutation body of the even Martyugin automaton.
///
/// The states `m-1, m, ..., 2m-1` are stored at indices `0..=m`; index `i`
/// is state `m - 1 + i`. State `m - 1` is the sink and `m` the pre-sink.
pub fn fig2_body(m: usize) -> Result<Dfa> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("fig2-body needs m >= 4, got {m}")));
    }
    let a = |s: usize| match s {
        s if s == m - 1 || s == 2 * m - 1 => s,
        s if s == m => 2 * m - 2,
        s => s - 1,
    };
    let b = |s: usize| match s {
        s if s == m - 1 || s == m => m - 1,
        s if s == m + 1 => 2 * m - 1,
        s if s == 2 * m - 1 => m + 2,
        s if s == 2 * m - 2 => m + 1,
        s => s + 1,
    };
    Dfa::from_fn(m + 1, 2, |i, l| {
        let s = m - 1 + i;
        let t = if l == A { a(s) } else { b(s) };
        t - (m - 1)
    })
}

/// Martyugin's automaton on `2m` states.
pub fn martyugin(m: usize) -> Result<Dfa> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("martyugin needs m >= 4 (n = 2m >= 8), got {m}")));
    }
    let a = |i: usize| match i {
        0 => 0,
        i if i < m => i - 1,
        i if i == m => 2 * m - 2,
        i if i <= 2 * m - 2 => i - 1,
        i => i,
    };
    let b = |i: usize| match i {
        0 => 0,
        i if i < m => m,
        i if i == m => m - 1,
        i if i == m + 1 => 2 * m - 1,
        i if i <= 2 * m - 3 => i + 1,
        i if i == 2 * m - 2 => m + 1,
        _ => m + 2,
    };
    Dfa::from_fn(2 * m, 2, |i, l| if l == A { a(i) } else { b(i) })
}

/// The slowly synchronizing almost-permutation series `A_n`.
///
/// States 0..=4 follow an explicit table. From state 5 on, `a` pairs
/// `(5,6), (7,8), ...` and `b` pairs `(4,5), (6,7), ...`; an unpaired last
/// state loops.
pub fn a_series(n: usize) -> Result<Dfa> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("a-series needs n >= 5, got {n}")));
    }
    let a = |j: usize| match j {
        0 | 1 => 0,
        2 => 4,
        3 => 2,
        4 => 3,
        j if j % 2 == 0 => j - 1,
        j if j == n - 1 => j,
        j => j + 1,
    };
    let b = |j: usize| match j {
        0 => 0,
        1 => 3,
        2 => 1,
        3 => 2,
        j if j % 2 == 1 => j - 1,
        j if j == n - 1 => j,
        j => j + 1,
    };
    Dfa::from_fn(n, 2, |j, l| if l == A { a(j) } else { b(j) })
}

/// Parameters of the tail-append operator `A(k, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailSpec {
    /// Number of new states `t_0..t_{k-1}`.
    pub k: usize,
    /// State the non-walking letter sends the old sink and the tail to.
    pub r: usize,
    /// Letter that walks down the tail; it must permute the base states.
    pub perm_letter: usize,
}

/// Appends a tail of `spec.k` states to a binary automaton with a sink.
///
/// Tail state `t_i` gets index `n + i`. Under the walking letter the old sink
/// goes to `t_{k-1}` and `t_i` to `t_{i-1}`; under the other letter the old
/// sink and `t_1..t_{k-1}` go to `r`. `t_0` is the new sink.
pub fn tail_append(base: &Dfa, spec: TailSpec) -> Result<Dfa> {
    if base.num_letters() != 2 {
        return Err(Error::Precondition("tail append needs a binary automaton".into()));
    }
    let sink = base.find_sink().ok_or_else(|| Error::Precondition("base automaton has no unique sink".into()))?;
    if spec.perm_letter > 1 {
        return Err(Error::LetterOutOfRange { letter: spec.perm_letter, k: 2 });
    }
    if !base.is_permutation_on(spec.perm_letter, &base.full_set()) {
        return Err(Error::Precondition(format!(
            "letter {} does not permute the states",
            base.letter_name(spec.perm_letter)
        )));
    }
    let n = base.num_states();
    if spec.r >= n {
        return Err(Error::StateOutOfRange { state: spec.r, n });
    }
    if spec.r == sink {
        return Err(Error::Precondition("r must differ from the sink".into()));
    }
    if spec.k == 0 {
        return Ok(base.clone());
    }
    let walk = spec.perm_letter;
    let tail = |i: usize| n + i;
    let mut out = Dfa::from_fn(n + spec.k, 2, |s, l| {
        if s < n && s != sink {
            base.target(s, l)
        } else if l == walk {
            match s {
                s if s == sink => tail(spec.k - 1),
                s if s == tail(0) => tail(0),
                s => s - 1,
            }
        } else if s == tail(0) {
            tail(0)
        } else {
            spec.r
        }
    })?;
    out.set_letter_names(base.letter_names().to_vec())?;
    Ok(out)
}

/// Sizes `(n, k)` of the base automaton and tail making up `b_series(big_n)`.
pub fn b_series_split(big_n: usize) -> Result<(usize, usize)> {
    if big_n < 16 || big_n % 12 != 4 {
        return Err(Error::InvalidParameter(format!("b-series needs N >= 16 with N = 4 (mod 12), got {big_n}")));
    }
    let n = (big_n + 4) / 2;
    Ok((n, n - 4))
}

/// `A_n` with a tail of `n - 4` states walked by `b`, where `n = (N + 4) / 2`.
pub fn b_series(big_n: usize) -> Result<Dfa> {
    let (n, k) = b_series_split(big_n)?;
    tail_append(&a_series(n)?, TailSpec { k, r: 1, perm_letter: B })
}

/// Reset threshold of `A(k, r)` predicted from the base threshold: `rt + n k`.
pub fn predict_tailed_rt(rt_base: u64, n: u64, k: u64) -> u64 {
    rt_base + n * k
}

/// Closed-form reset words of length `4n - 13` for `A_n`, odd `n >= 7` or even `n >= 10`.
pub fn paper_reset_word(n: usize) -> Result<Word> {
    let block = Word::from_ab("abaabbab")?;
    let prefix = Word::from_ab("aba")?;
    let suffix = Word::from_ab("aaba")?;
    let middle = match n {
        n if n >= 7 && n % 2 == 1 => block.power((n - 5) / 2),
        n if n >= 10 && n % 2 == 0 => block.power((n - 8) / 2).concat(&Word::from_ab("abbb")?).concat(&block),
        _ => {
            return Err(Error::Unsupported(format!(
                "no closed-form reset word for n = {n} (needs odd n >= 7 or even n >= 10)"
            )))
        }
    };
    Ok(prefix.concat(&middle).concat(&suffix))
}

/// The automaton families this crate generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Cerny,
    Fig1,
    Fig2Body,
    Martyugin,
    ASeries,
    BSeries,
}

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Cerny, Family::Fig1, Family::Fig2Body, Family::Martyugin, Family::ASeries, Family::BSeries];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cerny => "cerny",
            Family::Fig1 => "fig1",
            Family::Fig2Body => "fig2-body",
            Family::Martyugin => "martyugin",
            Family::ASeries => "a-series",
            Family::BSeries => "b-series",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Family::ALL.into_iter().find(|f| f.name() == key).ok_or_else(|| {
            let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            Error::InvalidParameter(format!("unknown family {s:?}, expected one of {}", names.join(", ")))
        })
    }
}

/// A family together with its size parameter: `n` for cerny, fig1 and
/// a-series; `m` for fig2-body and martyugin; the state count `N` for b-series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyParams {
    pub family: Family,
    pub param: usize,
}

impl FamilyParams {
    pub fn new(family: Family, param: usize) -> Self {
        FamilyParams { family, param }
    }

    pub fn build(&self) -> Result<Dfa> {
        let p = self.param;
        match self.family {
            Family::Cerny => cerny(p),
            Family::Fig1 => fig1_chain(p),
            Family::Fig2Body => fig2_body(p),
            Family::Martyugin => martyugin(p),
            Family::ASeries => a_series(p),
            Family::BSeries => b_series(p),
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.param)
    }
}
