/*
 * poisntt — Poisson-structure verification and new-time transformation
 * analysis for finite-dimensional systems x' = J(x) grad(H(x)).
 *
 * C interface of the shared library. Objects are opaque handles; every
 * command returns a status code that doubles as the CLI exit code:
 *
 *   0  pass                      3  transformation premise violated
 *   1  a check failed            4  inconclusive
 *   2  malformed input           5  runtime abort (integration)
 *
 * Handles are created by poisntt_load_* and freed by the matching *_free.
 * Strings returned through accessors stay owned by the handle and remain
 * valid until it is freed. A single handle must not be mutated while other
 * threads read it; distinct handles are independent.
 */

#ifndef POISNTT_H
#define POISNTT_H

#include <stddef.h>

/* Symbols are hidden by default when the shared library is built; only the
 * functions below are exported. */
#if defined(POISNTT_BUILD_SHARED) && (defined(__GNUC__) || defined(__clang__))
#define POISNTT_API __attribute__((visibility("default")))
#else
#define POISNTT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum poisntt_status {
  POISNTT_OK = 0,
  POISNTT_CHECK_FAILED = 1,
  POISNTT_INPUT_ERROR = 2,
  POISNTT_PREMISE_VIOLATION = 3,
  POISNTT_INCONCLUSIVE = 4,
  POISNTT_RUNTIME_ABORT = 5,
} poisntt_status;

typedef enum poisntt_flow {
  POISNTT_FLOW_T = 0,
  POISNTT_FLOW_TAU = 1,
  POISNTT_FLOW_BOTH = 2,
} poisntt_flow;

typedef struct poisntt_system poisntt_system;  /* parsed system document */
typedef struct poisntt_result poisntt_result;  /* outcome of one command */

POISNTT_API const char* poisntt_version(void);

/* --- loading ----------------------------------------------------------- */

/* Parses a system-definition file (or in-memory text). On failure returns
 * a nonzero status and, when errbuf is non-NULL, copies a diagnostic into
 * it (truncated to errbuf_len - 1 characters). */
POISNTT_API poisntt_status poisntt_load_file(const char* path, poisntt_system** out_sys,
                                 char* errbuf, size_t errbuf_len);
POISNTT_API poisntt_status poisntt_load_string(const char* text, poisntt_system** out_sys,
                                   char* errbuf, size_t errbuf_len);
POISNTT_API void poisntt_system_free(poisntt_system* sys);

POISNTT_API int poisntt_system_dimension(const poisntt_system* sys);

/* Overrides a sampling/tolerance setting carried by the file. Keys:
 * "points", "seed", "atol", "rtol", "min_eta", "drift_tol". */
POISNTT_API poisntt_status poisntt_system_set(poisntt_system* sys, const char* key,
                                  double value);

/* --- commands ---------------------------------------------------------- */

POISNTT_API poisntt_status poisntt_validate(const poisntt_system* sys,
                                poisntt_result** out);
POISNTT_API poisntt_status poisntt_analyze_ntt(const poisntt_system* sys,
                                   poisntt_result** out);
POISNTT_API poisntt_status poisntt_rescale(const poisntt_system* sys,
                               poisntt_result** out);
POISNTT_API poisntt_status poisntt_implicit(const poisntt_system* sys,
                                poisntt_result** out);
POISNTT_API poisntt_status poisntt_classify(const poisntt_system* sys,
                                poisntt_result** out);
POISNTT_API poisntt_status poisntt_simulate(const poisntt_system* sys, const double* x0,
                                int n, double t_end, double dt,
                                poisntt_flow flow, poisntt_result** out);

POISNTT_API void poisntt_result_free(poisntt_result* res);

/* --- result access ------------------------------------------------------ */

POISNTT_API poisntt_status poisntt_result_status(const poisntt_result* res);

/* Human-readable narrative of the run. Never NULL. */
POISNTT_API const char* poisntt_result_text(const poisntt_result* res);

/* Machine-readable report:
 * "check=<name> verdict=<pass|fail> residual=<val> witness=<x1,...,xn>"
 * one line per check. Never NULL (may be empty). */
POISNTT_API const char* poisntt_result_report_lines(const poisntt_result* res);

/* "yes" | "no" | "inconclusive" for transformation commands, else NULL. */
POISNTT_API const char* poisntt_result_verdict(const poisntt_result* res);

/* DSL renderings of the derived quantities, or NULL when not available. */
POISNTT_API const char* poisntt_result_eta(const poisntt_result* res);
POISNTT_API const char* poisntt_result_hstar(const poisntt_result* res);

/* Individual checks. */
POISNTT_API int poisntt_result_check_count(const poisntt_result* res);
POISNTT_API const char* poisntt_result_check_name(const poisntt_result* res, int idx);
POISNTT_API const char* poisntt_result_check_verdict(const poisntt_result* res, int idx);
POISNTT_API double poisntt_result_check_residual(const poisntt_result* res, int idx);
/* Copies up to cap coordinates of the witness point; returns the witness
 * dimension (0 when the check has none). */
POISNTT_API int poisntt_result_check_witness(const poisntt_result* res, int idx,
                                 double* coords, int cap);

/* Trajectories produced by poisntt_simulate, as delimited text with a
 * header line "t,x1,...,xn". tag is "t" or "tau". */
POISNTT_API int poisntt_result_trajectory_count(const poisntt_result* res);
POISNTT_API const char* poisntt_result_trajectory_csv(const poisntt_result* res, int idx);
POISNTT_API const char* poisntt_result_trajectory_tag(const poisntt_result* res, int idx);

#ifdef __cplusplus
}
#endif

#endif /* POISNTT_H */
