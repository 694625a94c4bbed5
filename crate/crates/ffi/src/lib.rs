//! C ABI for `sinksync`.
//!
//! Conventions:
//!
//! - Every fallible function returns an [`SsStatus`]; `SS_STATUS_OK` is zero.
//! - On failure a thread-local message is available from
//!   [`ss_last_error_message`] until the next failing call on that thread.
//! - Automata and solver results are opaque handles, released with
//!   [`ss_dfa_free`] and [`ss_rt_result_free`].
//! - Strings returned through out-parameters are NUL-terminated and must be
//!   released with [`ss_string_free`].
//! - States and letters are 0-based `size_t` indices; transition tables are
//!   row-major, `table[q * k + l]`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sinksync::constructions::{tail_append, Family, FamilyParams, TailSpec};
use sinksync::format::{export_dot, parse_automaton, serialize_automaton};
use sinksync::solver::{exact_reset_threshold, verify_reset_word, DEFAULT_MAX_SUBSETS};
use sinksync::{Dfa, Error, RtResult, SolveError, SolverLimits, Word};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotSynchronizing = 4,
    LimitExceeded = 5,
    NotFound = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque automaton handle.
pub struct SsDfa(Dfa);

/// Opaque result of an exact reset-threshold computation.
pub struct SsRtResult(RtResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = CString::new(message.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: SsStatus, message: impl Into<String>) -> SsStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> SsStatus {
    let status = match e {
        Error::Parse { .. } => SsStatus::ParseError,
        _ => SsStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn from_solve_error(e: SolveError) -> SsStatus {
    match e {
        SolveError::NotSynchronizing { .. } => fail(SsStatus::NotSynchronizing, e.to_string()),
        SolveError::LimitExceeded { .. } => fail(SsStatus::LimitExceeded, e.to_string()),
        SolveError::Invalid(inner) => from_error(inner),
    }
}

/// Runs `f`, turning a panic into `SS_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> SsStatus) -> SsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SsStatus::Panic, "internal panic"))
}

unsafe fn dfa_ref<'a>(dfa: *const SsDfa) -> Result<&'a Dfa, SsStatus> {
    dfa.as_ref().map(|d| &d.0).ok_or_else(|| fail(SsStatus::NullPointer, "null automaton handle"))
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, SsStatus> {
    if s.is_null() {
        return Err(fail(SsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(SsStatus::InvalidArgument, "string is not valid UTF-8"))
}

unsafe fn put_dfa(out: *mut *mut SsDfa, dfa: Dfa) -> SsStatus {
    *out = Box::into_raw(Box::new(SsDfa(dfa)));
    SsStatus::Ok
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> SsStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            SsStatus::Ok
        }
        Err(_) => fail(SsStatus::InvalidArgument, "output contains a NUL byte"),
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(SsStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds an automaton from a row-major table of `n * k` targets.
///
/// # Safety
/// `table` must point to `n * k` readable `size_t` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_new(n: usize, k: usize, table: *const usize, out: *mut *mut SsDfa) -> SsStatus {
    guard(|| {
        non_null!(out);
        let Some(len) = n.checked_mul(k) else {
            return fail(SsStatus::InvalidArgument, "n * k overflows");
        };
        if len > 0 && table.is_null() {
            return fail(SsStatus::NullPointer, "null pointer: table");
        }
        let entries = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(table, len).to_vec() };
        match Dfa::new(n, k, entries) {
            Ok(d) => put_dfa(out, d),
            Err(e) => from_error(e),
        }
    })
}

/// Generates a family member, e.g. `"b-series"` with parameter 16.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_from_family(family: *const c_char, param: usize, out: *mut *mut SsDfa) -> SsStatus {
    guard(|| {
        non_null!(out);
        let name = try_ffi!(c_str(family));
        let built = name.parse::<Family>().and_then(|f| FamilyParams::new(f, param).build());
        match built {
            Ok(d) => put_dfa(out, d),
            Err(e) => from_error(e),
        }
    })
}

/// Parses the plain-text automaton format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_parse(text: *const c_char, out: *mut *mut SsDfa) -> SsStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(c_str(text));
        match parse_automaton(text) {
            Ok(d) => put_dfa(out, d),
            Err(e) => from_error(e),
        }
    })
}

/// Releases an automaton. NULL is ignored.
///
/// # Safety
/// `dfa` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_free(dfa: *mut SsDfa) {
    if !dfa.is_null() {
        drop(Box::from_raw(dfa));
    }
}

/// Number of states, or 0 for NULL.
///
/// # Safety
/// `dfa` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_num_states(dfa: *const SsDfa) -> usize {
    dfa.as_ref().map_or(0, |d| d.0.num_states())
}

/// Alphabet size, or 0 for NULL.
///
/// # Safety
/// `dfa` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_num_letters(dfa: *const SsDfa) -> usize {
    dfa.as_ref().map_or(0, |d| d.0.num_letters())
}

/// `δ(q, l)`.
///
/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_step(dfa: *const SsDfa, q: usize, l: usize, out: *mut usize) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        match d.step(q, l) {
            Ok(t) => {
                *out = t;
                SsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Writes the sink state to `out`, or returns `SS_STATUS_NOT_FOUND`.
///
/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_find_sink(dfa: *const SsDfa, out: *mut usize) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        match d.find_sink() {
            Some(z) => {
                *out = z;
                SsStatus::Ok
            }
            None => fail(SsStatus::NotFound, "no unique sink state"),
        }
    })
}

/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_is_synchronizing(dfa: *const SsDfa, out: *mut bool) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        *out = d.is_synchronizing();
        SsStatus::Ok
    })
}

/// Appends a tail of `k` states walked by `perm_letter`, feeding state `r`.
///
/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_tail_append(
    dfa: *const SsDfa,
    k: usize,
    r: usize,
    perm_letter: usize,
    out: *mut *mut SsDfa,
) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        match tail_append(d, TailSpec { k, r, perm_letter }) {
            Ok(t) => put_dfa(out, t),
            Err(e) => from_error(e),
        }
    })
}

/// Canonical text form.
///
/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_serialize(dfa: *const SsDfa, out: *mut *mut c_char) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        put_string(out, serialize_automaton(d))
    })
}

/// Graphviz DOT rendering.
///
/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_dfa_to_dot(dfa: *const SsDfa, out: *mut *mut c_char) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        put_string(out, export_dot(d))
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact reset threshold. `max_subsets == 0` and `max_length == 0` select
/// the defaults (2^26 subsets, n² letters).
///
/// # Safety
/// `dfa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_reset_threshold(
    dfa: *const SsDfa,
    max_subsets: u64,
    max_length: usize,
    out: *mut *mut SsRtResult,
) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        let limits = SolverLimits {
            max_subsets: if max_subsets == 0 { DEFAULT_MAX_SUBSETS } else { max_subsets },
            max_length: (max_length != 0).then_some(max_length),
        };
        match exact_reset_threshold(d, &limits) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(SsRtResult(r)));
                SsStatus::Ok
            }
            Err(e) => from_solve_error(e),
        }
    })
}

/// Threshold of a result, or 0 for NULL.
///
/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_rt_result_threshold(res: *const SsRtResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.threshold)
}

/// Number of subsets the search visited, or 0 for NULL.
///
/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_rt_result_explored(res: *const SsRtResult) -> u64 {
    res.as_ref().map_or(0, |r| r.0.explored)
}

/// Copies the witness letters into `buf`. `out_len` always receives the
/// witness length; if `cap` is smaller nothing is copied and
/// `SS_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `res` must be a live handle, `out_len` writable and `buf` writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn ss_rt_result_witness(
    res: *const SsRtResult,
    buf: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> SsStatus {
    guard(|| {
        non_null!(out_len);
        let Some(r) = res.as_ref() else {
            return fail(SsStatus::NullPointer, "null result handle");
        };
        let letters = r.0.witness.letters();
        *out_len = letters.len();
        if letters.is_empty() {
            return SsStatus::Ok;
        }
        if buf.is_null() || cap < letters.len() {
            return fail(SsStatus::BufferTooSmall, format!("witness needs {} entries", letters.len()));
        }
        ptr::copy_nonoverlapping(letters.as_ptr(), buf, letters.len());
        SsStatus::Ok
    })
}

/// Releases a result. NULL is ignored.
///
/// # Safety
/// `res` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_rt_result_free(res: *mut SsRtResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Checks whether `letters[0..len]` is a reset word.
///
/// # Safety
/// `dfa` must be a live handle, `letters` readable for `len` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_verify_reset_word(
    dfa: *const SsDfa,
    letters: *const usize,
    len: usize,
    out: *mut bool,
) -> SsStatus {
    guard(|| {
        non_null!(out);
        let d = try_ffi!(dfa_ref(dfa));
        if len > 0 && letters.is_null() {
            return fail(SsStatus::NullPointer, "null pointer: letters");
        }
        let word =
            if len == 0 { Word::new() } else { Word::from_letters(std::slice::from_raw_parts(letters, len).to_vec()) };
        match verify_reset_word(d, &word) {
            Ok(v) => {
                *out = v;
                SsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
