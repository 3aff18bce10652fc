#ifndef PEERNOM_H
#define PEERNOM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum PnStatus {
  PN_STATUS_OK = 0,
  // A required pointer was null or a string was not valid UTF-8.
  PN_STATUS_NULL_OR_INVALID_ARGUMENT = 1,
  // Parameters rejected by the library.
  PN_STATUS_INVALID_PARAMS = 2,
  // Agent index outside `0..n`.
  PN_STATUS_OUT_OF_RANGE = 3,
  // The caller's buffer is shorter than the result; nothing was copied.
  PN_STATUS_BUFFER_TOO_SMALL = 4,
  // The requested value is undefined for this input.
  PN_STATUS_UNDEFINED = 5,
  // Assignment construction kept producing disconnected graphs.
  PN_STATUS_CONSTRUCTION_FAILED = 6,
  // A Rust panic was caught at the boundary.
  PN_STATUS_PANIC = 7,
  PN_STATUS_INTERNAL = 8,
} PnStatus;

// Opaque review assignment.
typedef struct PnAssignment PnAssignment;

// Opaque outcome of one simulated trial.
typedef struct PnTrial PnTrial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *pn_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *pn_version(void);

// Builds an Euler-based assignment for `n` agents each reviewing `m` others.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PnStatus pn_assignment_build(size_t n, size_t m, uint64_t seed, struct PnAssignment **out);

// # Safety
// `handle` must be null or come from [`pn_assignment_build`] and not have
// been freed.
void pn_assignment_free(struct PnAssignment *handle);

// Number of agents, or 0 for a null handle.
//
// # Safety
// `handle` must be null or a live assignment handle.
size_t pn_assignment_n(const struct PnAssignment *handle);

// Agents reviewed by `agent`, ascending.
//
// # Safety
// `handle` must be a live handle, `buf` must hold `capacity` elements and
// `len_out` must be writable.
enum PnStatus pn_assignment_reviewees(const struct PnAssignment *handle,
                                      size_t agent,
                                      size_t *buf,
                                      size_t capacity,
                                      size_t *len_out);

// Agents reviewing `agent`, ascending.
//
// # Safety
// Same contract as [`pn_assignment_reviewees`].
enum PnStatus pn_assignment_reviewers(const struct PnAssignment *handle,
                                      size_t agent,
                                      size_t *buf,
                                      size_t capacity,
                                      size_t *len_out);

// Stores whether the assignment has no mutual reviews and no shared reviewee
// between a reviewer and the agent it reviews.
//
// # Safety
// `handle` must be a live handle and `ok_out` writable.
enum PnStatus pn_assignment_check_sp(const struct PnAssignment *handle, bool *ok_out);

// Simulates one trial: random ground truth, a population with
// `share_accurate` of agents at `phi_accurate` and the rest at
// `phi_inaccurate`, an Euler assignment, beliefs and nominations, then the
// weighted choice under `scheme` (for example `"distance:20"`).
//
// # Safety
// `scheme` must be a NUL-terminated string and `out` writable.
enum PnStatus pn_trial_run(size_t n,
                           size_t k,
                           size_t m,
                           double epsilon,
                           double share_accurate,
                           double phi_accurate,
                           double phi_inaccurate,
                           const char *scheme,
                           uint64_t seed,
                           struct PnTrial **out);

// # Safety
// `handle` must be null or a live trial handle.
void pn_trial_free(struct PnTrial *handle);

// Recall against the ground-truth top k; NaN for a null handle.
//
// # Safety
// `handle` must be null or a live trial handle.
double pn_trial_recall(const struct PnTrial *handle);

// Number of selected agents; 0 for a null handle.
//
// # Safety
// `handle` must be null or a live trial handle.
size_t pn_trial_size(const struct PnTrial *handle);

// Selected agents, ascending.
//
// # Safety
// `handle` must be live, `buf` must hold `capacity` elements and `len_out`
// must be writable.
enum PnStatus pn_trial_selected(const struct PnTrial *handle,
                                size_t *buf,
                                size_t capacity,
                                size_t *len_out);

// Per-agent reviewer weights.
//
// # Safety
// Same contract as [`pn_trial_selected`].
enum PnStatus pn_trial_weights(const struct PnTrial *handle,
                               double *buf,
                               size_t capacity,
                               size_t *len_out);

// Spearman correlation between weights and dispersions. Returns
// `PN_STATUS_UNDEFINED` when either side is constant.
//
// # Safety
// `handle` must be live and `out` writable.
enum PnStatus pn_trial_weight_phi_correlation(const struct PnTrial *handle, double *out);

// Probability that an inaccurate-majority decision is corrected, for
// inaccuracy rate `q`, `m` reviews per agent and identification threshold
// `j`.
//
// # Safety
// `out` must be writable.
enum PnStatus pn_theory_correction_probability(double q, size_t m, size_t j, double *out);

// Draws a Mallows ranking of `reference` (best first) with extended
// dispersion `phi_ext` in `[0, 2]` into `out`, which must hold `len` items.
//
// # Safety
// `reference` and `out` must each point to `len` elements.
enum PnStatus pn_mallows_sample(const size_t *reference,
                                size_t len,
                                double phi_ext,
                                uint64_t seed,
                                size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEERNOM_H */
