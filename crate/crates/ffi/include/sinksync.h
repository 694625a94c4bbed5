#ifndef SINKSYNC_H
#define SINKSYNC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_PARSE_ERROR = 3,
  SS_STATUS_NOT_SYNCHRONIZING = 4,
  SS_STATUS_LIMIT_EXCEEDED = 5,
  SS_STATUS_NOT_FOUND = 6,
  SS_STATUS_BUFFER_TOO_SMALL = 7,
  SS_STATUS_PANIC = 8,
} SsStatus;

// Opaque automaton handle.
typedef struct SsDfa SsDfa;

// Opaque result of an exact reset-threshold computation.
typedef struct SsRtResult SsRtResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *ss_last_error_message(void);

// Builds an automaton from a row-major table of `n * k` targets.
//
// # Safety
// `table` must point to `n * k` readable `size_t` values; `out` must be writable.
enum SsStatus ss_dfa_new(size_t n, size_t k, const size_t *table, struct SsDfa **out);

// Generates a family member, e.g. `"b-series"` with parameter 16.
//
// # Safety
// `family` must be a NUL-terminated string; `out` must be writable.
enum SsStatus ss_dfa_from_family(const char *family, size_t param, struct SsDfa **out);

// Parses the plain-text automaton format.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum SsStatus ss_dfa_parse(const char *text, struct SsDfa **out);

// Releases an automaton. NULL is ignored.
//
// # Safety
// `dfa` must come from this library and not have been freed.
void ss_dfa_free(struct SsDfa *dfa);

// Number of states, or 0 for NULL.
//
// # Safety
// `dfa` must be NULL or a live handle.
size_t ss_dfa_num_states(const struct SsDfa *dfa);

// Alphabet size, or 0 for NULL.
//
// # Safety
// `dfa` must be NULL or a live handle.
size_t ss_dfa_num_letters(const struct SsDfa *dfa);

// `δ(q, l)`.
//
// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_dfa_step(const struct SsDfa *dfa, size_t q, size_t l, size_t *out);

// Writes the sink state to `out`, or returns `SS_STATUS_NOT_FOUND`.
//
// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_dfa_find_sink(const struct SsDfa *dfa, size_t *out);

// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_dfa_is_synchronizing(const struct SsDfa *dfa, bool *out);

// Appends a tail of `k` states walked by `perm_letter`, feeding state `r`.
//
// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_dfa_tail_append(const struct SsDfa *dfa,
                                 size_t k,
                                 size_t r,
                                 size_t perm_letter,
                                 struct SsDfa **out);

// Canonical text form.
//
// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_dfa_serialize(const struct SsDfa *dfa, char **out);

// Graphviz DOT rendering.
//
// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_dfa_to_dot(const struct SsDfa *dfa, char **out);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void ss_string_free(char *s);

// Exact reset threshold. `max_subsets == 0` and `max_length == 0` select
// the defaults (2^26 subsets, n² letters).
//
// # Safety
// `dfa` must be a live handle; `out` must be writable.
enum SsStatus ss_reset_threshold(const struct SsDfa *dfa,
                                 uint64_t max_subsets,
                                 size_t max_length,
                                 struct SsRtResult **out);

// Threshold of a result, or 0 for NULL.
//
// # Safety
// `res` must be NULL or a live handle.
size_t ss_rt_result_threshold(const struct SsRtResult *res);

// Number of subsets the search visited, or 0 for NULL.
//
// # Safety
// `res` must be NULL or a live handle.
uint64_t ss_rt_result_explored(const struct SsRtResult *res);

// Copies the witness letters into `buf`. `out_len` always receives the
// witness length; if `cap` is smaller nothing is copied and
// `SS_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `res` must be a live handle, `out_len` writable and `buf` writable for `cap` values.
enum SsStatus ss_rt_result_witness(const struct SsRtResult *res,
                                   size_t *buf,
                                   size_t cap,
                                   size_t *out_len);

// Releases a result. NULL is ignored.
//
// # Safety
// `res` must come from this library and not have been freed.
void ss_rt_result_free(struct SsRtResult *res);

// Checks whether `letters[0..len]` is a reset word.
//
// # Safety
// `dfa` must be a live handle, `letters` readable for `len` values, `out` writable.
enum SsStatus ss_verify_reset_word(const struct SsDfa *dfa,
                                   const size_t *letters,
                                   size_t len,
                                   bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SINKSYNC_H */
