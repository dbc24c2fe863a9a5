#ifndef PSA_PSA_H
#define PSA_PSA_H

/*
 * C interface to the prime-sum asymptotics library.
 *
 * Every fallible call returns psa_status; on failure psa_last_error() holds a
 * message for the calling thread until its next failing call. Handles are
 * opaque and released with the matching *_destroy function. Engines,
 * functions and reports are immutable after creation and may be shared
 * between threads, except psa_prime_count which serializes internally.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PSA_API __declspec(dllexport)
#else
#define PSA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psa_status {
  PSA_OK = 0,
  PSA_ERR_INVALID_ARGUMENT = 1,
  PSA_ERR_INVALID_RANGE = 2,
  PSA_ERR_RANGE_TOO_LARGE = 3,
  PSA_ERR_UNKNOWN_ID = 4,
  PSA_ERR_INVALID_PARAMS = 5,
  PSA_ERR_HYPOTHESIS = 6,
  PSA_ERR_MAX_SUBDIVISIONS = 7,
  PSA_ERR_OVERFLOW = 8,
  PSA_ERR_IO = 9,
  PSA_ERR_CALLBACK = 10,
  PSA_ERR_INTERNAL = 11
} psa_status;

PSA_API const char* psa_last_error(void);
PSA_API const char* psa_status_name(psa_status status);

/* ---- prime engine ------------------------------------------------------ */

typedef struct psa_engine psa_engine;

/* segment_odds == 0 selects the default (2^20). cache_dir == NULL reads
 * PSA_CACHE_DIR; an empty string disables caching. threads == 0 means 1. */
PSA_API psa_status psa_engine_create(uint64_t segment_odds, const char* cache_dir, unsigned threads,
                                     psa_engine** out);
PSA_API void psa_engine_destroy(psa_engine* engine);

PSA_API psa_status psa_prime_count(psa_engine* engine, uint64_t n, uint64_t* count);

/* Packed odd-index bitset of [lo, hi), same layout as the cache file body.
 * bits may be NULL to query only the count; otherwise bits_len must be at
 * least ceil(odd_count / 8). */
PSA_API psa_status psa_sieve_range(const psa_engine* engine, uint64_t lo, uint64_t hi, uint8_t* bits,
                                   size_t bits_len, uint64_t* count);

/* Return nonzero from the visitor to abort; the call then reports
 * PSA_ERR_CALLBACK. */
typedef int (*psa_prime_visitor)(uint64_t prime, void* user);
PSA_API psa_status psa_stream_primes(const psa_engine* engine, uint64_t n, psa_prime_visitor visit,
                                     void* user);

/* ---- functions --------------------------------------------------------- */

typedef struct psa_function psa_function;

typedef enum psa_monotone {
  PSA_INCREASING = 0,
  PSA_DECREASING = 1,
  PSA_CONSTANT = 2,
  PSA_NOT_MONOTONE = 3
} psa_monotone;

typedef enum psa_growth { PSA_BOUNDED = 0, PSA_POLYLOG = 1, PSA_POLYNOMIAL = 2, PSA_EXPONENTIAL = 3 } psa_growth;

typedef struct psa_function_info {
  psa_monotone monotone;
  psa_growth growth;
  int has_closed_main;
} psa_function_info;

/* m and k may be NULL when the family does not take them. */
PSA_API psa_status psa_function_create(const char* id, const double* m, const double* k, psa_function** out);
PSA_API void psa_function_destroy(psa_function* fn);
PSA_API const char* psa_function_label(const psa_function* fn);
PSA_API psa_status psa_function_info_get(const psa_function* fn, psa_function_info* info);
PSA_API psa_status psa_function_eval(const psa_function* fn, double t, double* value, double* deriv);
/* Number of derivative / monotonicity violations on the probe grid. */
PSA_API psa_status psa_function_validate(const psa_function* fn, size_t* violations);

/* ---- quadrature -------------------------------------------------------- */

typedef double (*psa_integrand)(double t, void* user);

typedef struct psa_quad_result {
  double value;
  double abs_error_estimate;
  uint64_t subdivisions;
} psa_quad_result;

PSA_API psa_status psa_integrate(psa_integrand g, void* user, double a, double b, double rel_tol,
                                 psa_quad_result* out);
PSA_API psa_status psa_li_main(const psa_function* fn, double n, double rel_tol, psa_quad_result* out);

typedef struct psa_parts_identity {
  double lhs;
  double rhs;
  double rel_diff;
} psa_parts_identity;

PSA_API psa_status psa_parts_identity_check(const psa_function* fn, double n, psa_parts_identity* out);

/* ---- exact sums -------------------------------------------------------- */

typedef struct psa_exact_sum {
  uint64_t n;
  double value;
  uint64_t terms;
  double compensation;
  int log_space;  /* log_abs / sign are meaningful when nonzero */
  double log_abs;
  int sign;
} psa_exact_sum;

PSA_API psa_status psa_exact_sum_compute(const psa_engine* engine, const psa_function* fn, uint64_t n,
                                         psa_exact_sum* out);
PSA_API psa_status psa_abel_sum_compute(const psa_engine* engine, const psa_function* fn, uint64_t n,
                                        psa_exact_sum* out);
PSA_API psa_status psa_log_product_primes(const psa_engine* engine, uint64_t n, double* out);

/* ---- asymptotic estimates ---------------------------------------------- */

typedef enum psa_model_kind { PSA_MODEL_CRUDE = 0, PSA_MODEL_PNT = 1, PSA_MODEL_RH = 2 } psa_model_kind;

typedef struct psa_model {
  psa_model_kind kind;
  double c;
  double c1;
  double c2;
  double epsilon;
  double theta;
} psa_model;

PSA_API void psa_model_default(psa_model* model);

typedef struct psa_estimate {
  double n;
  double main;
  double bound;
} psa_estimate;

PSA_API psa_status psa_estimate_compute(const psa_function* fn, double n, const psa_model* model,
                                        psa_estimate* out);
/* *supported is set to 0 (and *out untouched) for quadrature-only families. */
PSA_API psa_status psa_closed_main(const psa_function* fn, double n, double* out, int* supported);
PSA_API psa_status psa_product_bound_log(double n, const psa_model* model, double* out);

typedef struct psa_consistency {
  double main_li;
  double main_crude;
  double difference;
  double predicted_difference;
  double crude_bound;
  double bound_ratio;
  int within_crude_bound;
} psa_consistency;

PSA_API psa_status psa_consistency_transform(const psa_function* fn, double n, psa_consistency* out);

/* ---- condition reports ------------------------------------------------- */

typedef enum psa_verdict {
  PSA_HOLDS = 0,
  PSA_FAILS = 1,
  PSA_INCONCLUSIVE = 2,
  PSA_DEGENERATE_CONVERGENT = 3
} psa_verdict;

typedef struct psa_report psa_report;

PSA_API psa_status psa_b_sum(uint64_t n, double* out);
/* Writes up to capacity entries; *len receives the full grid length. */
PSA_API psa_status psa_default_grid(uint64_t* grid, size_t capacity, size_t* len);
PSA_API psa_status psa_default_prime_grid(uint64_t* grid, size_t capacity, size_t* len);

PSA_API psa_status psa_check_sufficient(const psa_function* fn, const uint64_t* grid, size_t len,
                                        psa_report** out);
PSA_API psa_status psa_check_necessary(const psa_function* fn, const uint64_t* primes, size_t len,
                                       psa_report** out);
PSA_API psa_status psa_check_monotone_increasing(const psa_function* fn, psa_report** out);
PSA_API psa_status psa_ratio_trail(const psa_engine* engine, const psa_function* fn, const uint64_t* grid,
                                   size_t len, psa_report** out);
PSA_API void psa_report_destroy(psa_report* report);

PSA_API size_t psa_report_condition_count(const psa_report* report);
PSA_API const char* psa_report_condition_name(const psa_report* report, size_t i);
PSA_API psa_verdict psa_report_condition_verdict(const psa_report* report, size_t i);
PSA_API const char* psa_report_condition_note(const psa_report* report, size_t i);
PSA_API int psa_report_condition_log_scale(const psa_report* report, size_t i);
PSA_API size_t psa_report_evidence_count(const psa_report* report, size_t i);
PSA_API psa_status psa_report_evidence(const psa_report* report, size_t i, size_t j, double* n,
                                       double* statistic);
PSA_API int psa_report_any_fails(const psa_report* report);
PSA_API const char* psa_verdict_name(psa_verdict verdict);

/* ---- report rows ------------------------------------------------------- */

typedef struct psa_table_row {
  uint64_t n;
  double exact;
  double main_crude;
  double bound_crude;
  double main_li;
  double bound_pnt;
  double bound_rh;
  double ratio_exact_over_li;
  double err_li;
  double err_over_bound_pnt;
  double err_over_bound_rh;
} psa_table_row;

/* model supplies the constants; its kind is ignored. Fails with
 * PSA_ERR_HYPOTHESIS for non-monotone or exponential-growth functions. */
PSA_API psa_status psa_table_row_compute(const psa_engine* engine, const psa_function* fn, uint64_t n,
                                         const psa_model* model, psa_table_row* out);

typedef struct psa_product_row {
  uint64_t n;
  double theta;
  double bound_crude_log;
  double bound_rh_log;
  double slack;  /* min(bound_crude_log, bound_rh_log) - theta */
} psa_product_row;

PSA_API psa_status psa_product_row_compute(const psa_engine* engine, uint64_t n, const psa_model* model,
                                           psa_product_row* out);

#ifdef __cplusplus
}
#endif

#endif /* PSA_PSA_H */
