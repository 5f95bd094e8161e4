#ifndef VVMF_H
#define VVMF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum VvmfStatus {
  VVMF_STATUS_OK = 0,
  VVMF_STATUS_NULL_POINTER = 1,
  VVMF_STATUS_INVALID_UTF8 = 2,
  VVMF_STATUS_PARSE = 3,
  VVMF_STATUS_INVALID_ARGUMENT = 4,
  VVMF_STATUS_RELATION_FAILED = 5,
  VVMF_STATUS_DIVISION_BY_ZERO = 6,
  VVMF_STATUS_SINGULAR = 7,
  VVMF_STATUS_CHECK_FAILED = 8,
  VVMF_STATUS_INTERNAL = 9,
} VvmfStatus;

/**
 * Binary series operations.
 */
typedef enum VvmfSeriesOp {
  VVMF_SERIES_OP_ADD = 0,
  VVMF_SERIES_OP_SUB = 1,
  VVMF_SERIES_OP_MUL = 2,
  VVMF_SERIES_OP_DIV = 3,
} VvmfSeriesOp;

/**
 * Opaque validated representation of SL2(Z).
 */
typedef struct VvmfRep VvmfRep;

/**
 * Opaque truncated q-series.
 */
typedef struct VvmfSeries VvmfSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null.
 *
 * The pointer stays valid until the next library call on this thread.
 */
const char *vvmf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *vvmf_version(void);

void vvmf_string_free(char *s);

/**
 * Expands `E4`, `E6`, `Delta`, `J`, `delta` or `f:<n>` with `order` trusted q-powers.
 */
enum VvmfStatus vvmf_series_named(const char *name, int64_t order, struct VvmfSeries **out);

/**
 * Parses a series record `{"grid", "lead", "valid_to", "coeffs"}`.
 */
enum VvmfStatus vvmf_series_from_json(const char *json_text, struct VvmfSeries **out);

enum VvmfStatus vvmf_series_to_json(const struct VvmfSeries *s, char **out);

/**
 * Human-readable expansion, e.g. `q^-1 + 196884·q + …`.
 */
enum VvmfStatus vvmf_series_to_string(const struct VvmfSeries *s, char **out);

enum VvmfStatus vvmf_series_binary(enum VvmfSeriesOp op,
                                   const struct VvmfSeries *a,
                                   const struct VvmfSeries *b,
                                   struct VvmfSeries **out);

/**
 * `s^k`; negative `k` requires a nonzero series.
 */
enum VvmfStatus vvmf_series_pow(const struct VvmfSeries *s, int64_t k, struct VvmfSeries **out);

/**
 * Whether `a` and `b` agree exactly on a shared window covering both leading terms.
 */
enum VvmfStatus vvmf_series_agree(const struct VvmfSeries *a,
                                  const struct VvmfSeries *b,
                                  bool *out);

/**
 * Coefficient of `q^(num/den)` as a cyclotomic-number record in JSON.
 */
enum VvmfStatus vvmf_series_coefficient(const struct VvmfSeries *s,
                                        int64_t num,
                                        int64_t den,
                                        char **out);

void vvmf_series_free(struct VvmfSeries *s);

/**
 * Parses and validates a representation file.
 */
enum VvmfStatus vvmf_rep_from_json(const char *json_text, struct VvmfRep **out);

enum VvmfStatus vvmf_rep_to_json(const struct VvmfRep *rep, char **out);

/**
 * The character `κ^j`.
 */
enum VvmfStatus vvmf_rep_kappa(int64_t j, struct VvmfRep **out);

enum VvmfStatus vvmf_rep_twist(const struct VvmfRep *rep, int64_t j, struct VvmfRep **out);

enum VvmfStatus vvmf_rep_direct_sum(const struct VvmfRep *a,
                                    const struct VvmfRep *b,
                                    struct VvmfRep **out);

enum VvmfStatus vvmf_rep_dimension(const struct VvmfRep *rep, size_t *out);

/**
 * `0` for even, `1` for odd.
 */
enum VvmfStatus vvmf_rep_epsilon(const struct VvmfRep *rep, int64_t *out);

/**
 * Analysis report as JSON; candidates are enumerated when `enumerate` is set,
 * constrained to `sum_w` when `has_sum` is set.
 */
enum VvmfStatus vvmf_rep_analyze(const struct VvmfRep *rep,
                                 bool enumerate,
                                 int64_t k_min,
                                 int64_t k_max,
                                 bool has_sum,
                                 int64_t sum_w,
                                 char **out);

/**
 * `Δ_n(ρ)` to `order` trusted q-powers; requires `n ≡ ε (mod 2)`.
 */
enum VvmfStatus vvmf_rep_det(const struct VvmfRep *rep,
                             int64_t n,
                             int64_t order,
                             struct VvmfSeries **out);

void vvmf_rep_free(struct VvmfRep *rep);

/**
 * Checks a generators file against `F_1 ∧ … ∧ F_d = K·δ^{Σw}`; the JSON
 * report goes to `out` and `passed` receives the verdict.
 */
enum VvmfStatus vvmf_check_generators(const char *generators_json,
                                      int64_t order,
                                      char **out,
                                      bool *passed);

/**
 * Runs a verification suite by name; the JSON report goes to `out`.
 */
enum VvmfStatus vvmf_verify_suite(const char *suite,
                                  int64_t order,
                                  uint64_t seed,
                                  char **out,
                                  bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VVMF_H */
