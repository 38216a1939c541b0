#ifndef COARSE_CLT_H
#define COARSE_CLT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_UTF8 = 2,
  CC_STATUS_MALFORMED = 3,
  CC_STATUS_INVALID_INPUT = 4,
  CC_STATUS_BUDGET_EXCEEDED = 5,
  CC_STATUS_NOT_SEMISIMPLE = 6,
  CC_STATUS_BUFFER_TOO_SMALL = 7,
  CC_STATUS_IO = 8,
  CC_STATUS_PANIC = 9,
} CcStatus;

/**
 * Opaque isometric action.
 */
typedef struct CcAction CcAction;

/**
 * Opaque graph structure.
 */
typedef struct CcGraph CcGraph;

/**
 * Opaque sampler with its own random stream.
 */
typedef struct CcSampler CcSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; valid until the next call.
 */
const char *cc_last_error(void);

/**
 * Library version as a static string.
 */
const char *cc_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cc_string_free(char *s);

/**
 * Parses an automaton document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CcStatus cc_graph_from_json(const char *json, struct CcGraph **out);

/**
 * No-backtracking automaton of the free group of the given rank.
 *
 * # Safety
 * `out` must be writable.
 */
enum CcStatus cc_graph_free_combing(size_t rank, struct CcGraph **out);

/**
 * # Safety
 * `g` must come from this library and not have been freed.
 */
void cc_graph_free(struct CcGraph *g);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_graph_vertex_count(const struct CcGraph *g, size_t *out);

/**
 * Exact number of length-`n` paths from `vertex`, as a decimal string.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable. Free the result with
 * [`cc_string_free`].
 */
enum CcStatus cc_graph_count_paths(const struct CcGraph *g, size_t vertex, size_t n, char **out);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_graph_leading_eigenvalue(const struct CcGraph *g, double *out);

/**
 * Spectral data as JSON.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable. Free the result with
 * [`cc_string_free`].
 */
enum CcStatus cc_graph_spectral_json(const struct CcGraph *g, char **out);

/**
 * Sampler for paths of length at most `max_len`, seeded with `seed`.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_sampler_new(const struct CcGraph *g,
                             size_t max_len,
                             uint64_t seed,
                             struct CcSampler **out);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cc_sampler_free(struct CcSampler *s);

/**
 * Draws a uniform length-`n` path from the initial vertex and writes its
 * edge indices to `edges` (capacity `cap`); `len` receives `n`.
 *
 * # Safety
 * `s` must be a live handle; `edges` must have room for `cap` entries;
 * `len` must be writable.
 */
enum CcStatus cc_sampler_sample(struct CcSampler *s,
                                size_t n,
                                size_t *edges,
                                size_t cap,
                                size_t *len);

/**
 * Builds an action from its JSON specification (`{"kind": ..., "params": ...}`)
 * over the group of `g`.
 *
 * # Safety
 * `g` must be a live handle, `spec_json` a NUL-terminated string and `out`
 * writable.
 */
enum CcStatus cc_action_new(const struct CcGraph *g, const char *spec_json, struct CcAction **out);

/**
 * # Safety
 * `a` must come from this library and not have been freed.
 */
void cc_action_free(struct CcAction *a);

/**
 * `d(o, go)` for a space-separated word such as `"a b A"`.
 *
 * # Safety
 * `a` must be a live handle, `word` a NUL-terminated string and `out` writable.
 */
enum CcStatus cc_action_displacement(const struct CcAction *a, const char *word, double *out);

/**
 * Translation length of a space-separated word.
 *
 * # Safety
 * `a` must be a live handle, `word` a NUL-terminated string and `out` writable.
 */
enum CcStatus cc_action_translation_length(const struct CcAction *a, const char *word, double *out);

/**
 * Runs an experiment from a JSON config (automaton paths resolve against
 * the working directory) and returns the report as JSON.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` writable. Free the
 * result with [`cc_string_free`].
 */
enum CcStatus cc_run_experiment_json(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COARSE_CLT_H */
